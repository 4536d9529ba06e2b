#include "phdelay/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phdelay/errors.hpp"

namespace phdelay {

namespace {

std::string shape(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

class Checker {
 public:
  explicit Checker(const Tolerance& tol) : tol_(tol) {}

  void dims(const char* field, const Matrix& m, Eigen::Index rows, Eigen::Index cols) {
    if (m.rows() != rows || m.cols() != cols) {
      std::ostringstream os;
      os << field << " has shape " << shape(m) << ", expected " << rows << "x" << cols;
      out_.push_back(os.str());
      bad_shape_ = true;
    }
  }

  bool finite(const char* field, const Matrix& m) {
    if (all_finite(m)) return true;
    out_.push_back(std::string(field) + " has non-finite entries");
    return false;
  }

  bool symmetric(const char* field, const Matrix& m) {
    const double asym = relative_asymmetry(m);
    if (asym <= kSymmetryTolerance) return true;
    std::ostringstream os;
    os << field << " not symmetric, relative asymmetry " << asym;
    out_.push_back(os.str());
    return false;
  }

  void antisymmetric(const char* field, const Matrix& m) {
    if (m.size() == 0) return;
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0) return;
    const double dev = (m + m.transpose()).cwiseAbs().maxCoeff() / scale;
    if (dev > kSymmetryTolerance) {
      std::ostringstream os;
      os << field << " not antisymmetric, relative deviation " << dev;
      out_.push_back(os.str());
    }
  }

  void positive_definite(const char* field, const Matrix& m) {
    if (m.size() == 0 || !finite(field, m) || !symmetric(field, m)) return;
    const PsdReport rep = is_psd(m, tol_);
    if (rep.min_eigenvalue <= rep.slack) {
      std::ostringstream os;
      os << field << " not positive definite, min eigenvalue " << rep.min_eigenvalue;
      out_.push_back(os.str());
    }
  }

  void semidefinite(const char* field, const Matrix& m) {
    if (m.size() == 0 || !finite(field, m) || !symmetric(field, m)) return;
    const PsdReport rep = is_psd(m, tol_);
    if (!rep.psd()) {
      std::ostringstream os;
      os << field << " not positive semidefinite, min eigenvalue " << rep.min_eigenvalue;
      out_.push_back(os.str());
    }
  }

  void delay(double tau) {
    if (!std::isfinite(tau) || tau <= 0.0) {
      std::ostringstream os;
      os << "tau must be a positive finite delay, got " << tau;
      out_.push_back(os.str());
    }
  }

  bool shapes_ok() const { return !bad_shape_; }
  std::vector<std::string> take() { return std::move(out_); }

 private:
  const Tolerance& tol_;
  std::vector<std::string> out_;
  bool bad_shape_ = false;
};

Matrix solve_spd(const Matrix& h, const Matrix& rhs) {
  Eigen::LLT<Matrix> llt(h);
  if (llt.info() != Eigen::Success) {
    throw PreconditionError("H is not positive definite");
  }
  return llt.solve(rhs);
}

}  // namespace

HistoryFunction HistoryFunction::constant(const Vector& c, double tau) {
  HistoryFunction h;
  h.grid = {-tau, 0.0};
  h.values.resize(c.size(), 2);
  h.values.col(0) = c;
  h.values.col(1) = c;
  return h;
}

Vector HistoryFunction::operator()(double t) const {
  if (grid.empty()) throw PreconditionError("empty history function");
  if (t <= grid.front()) return values.col(0);
  if (t >= grid.back()) return values.col(values.cols() - 1);
  const auto it = std::upper_bound(grid.begin(), grid.end(), t);
  const auto hi = static_cast<Eigen::Index>(it - grid.begin());
  const Eigen::Index lo = hi - 1;
  const double w = (t - grid[lo]) / (grid[hi] - grid[lo]);
  return (1.0 - w) * values.col(lo) + w * values.col(hi);
}

std::string kind_name(const System& system) {
  struct {
    std::string operator()(const StandardLTISystem&) const { return "standard_lti"; }
    std::string operator()(const StandardPHSystem&) const { return "standard_ph"; }
    std::string operator()(const GeneralDelaySystem&) const { return "general_delay"; }
    std::string operator()(const DelayPHSystem&) const { return "delay_ph"; }
  } visitor;
  return std::visit(visitor, system);
}

std::vector<std::string> validate(const StandardLTISystem& sys, const Tolerance& tol) {
  Checker c(tol);
  const auto n = sys.A.rows(), m = sys.B.cols();
  c.dims("A", sys.A, n, n);
  c.dims("B", sys.B, n, m);
  c.dims("C", sys.C, m, n);
  c.finite("A", sys.A);
  c.finite("B", sys.B);
  c.finite("C", sys.C);
  return c.take();
}

std::vector<std::string> validate(const StandardPHSystem& sys, const Tolerance& tol) {
  Checker c(tol);
  const auto n = sys.H.rows(), m = sys.G.cols();
  c.dims("H", sys.H, n, n);
  c.dims("J", sys.J, n, n);
  c.dims("R", sys.R, n, n);
  c.dims("G", sys.G, n, m);
  if (!c.shapes_ok()) return c.take();
  c.positive_definite("H", sys.H);
  if (c.finite("J", sys.J)) c.antisymmetric("J", sys.J);
  c.semidefinite("R", sys.R);
  c.finite("G", sys.G);
  return c.take();
}

std::vector<std::string> validate(const GeneralDelaySystem& sys, const Tolerance& tol) {
  Checker c(tol);
  const auto n = sys.A0.rows(), m = sys.B.cols();
  c.dims("A0", sys.A0, n, n);
  c.dims("A1", sys.A1, n, n);
  c.dims("B", sys.B, n, m);
  c.dims("C", sys.C, m, n);
  c.finite("A0", sys.A0);
  c.finite("A1", sys.A1);
  c.finite("B", sys.B);
  c.finite("C", sys.C);
  c.delay(sys.tau);
  return c.take();
}

std::vector<std::string> validate(const DelayPHSystem& sys, const Tolerance& tol) {
  Checker c(tol);
  const auto n = sys.H.rows(), m = sys.G.cols();
  c.dims("H", sys.H, n, n);
  c.dims("J", sys.J, n, n);
  c.dims("R", sys.R, n, n);
  c.dims("Z", sys.Z, n, n);
  c.dims("G", sys.G, n, m);
  if (sys.theta) c.dims("theta", *sys.theta, n, n);
  c.delay(sys.tau);
  if (!c.shapes_ok()) return c.take();
  c.positive_definite("H", sys.H);
  if (c.finite("J", sys.J)) c.antisymmetric("J", sys.J);
  if (c.finite("R", sys.R)) c.symmetric("R", sys.R);
  c.finite("Z", sys.Z);
  c.finite("G", sys.G);
  if (sys.theta) c.semidefinite("theta", *sys.theta);
  return c.take();
}

std::vector<std::string> validate(const HistoryFunction& history, Eigen::Index n, double tau) {
  std::vector<std::string> out;
  const auto& g = history.grid;
  if (g.size() < 2) {
    out.emplace_back("history grid needs at least 2 points");
    return out;
  }
  if (history.values.rows() != n || history.values.cols() != static_cast<Eigen::Index>(g.size())) {
    std::ostringstream os;
    os << "history values have shape " << shape(history.values) << ", expected " << n << "x"
       << g.size();
    out.push_back(os.str());
  }
  for (std::size_t k = 1; k < g.size(); ++k) {
    if (!(g[k] > g[k - 1])) {
      out.emplace_back("history grid not strictly increasing");
      break;
    }
  }
  const double slack = 1e-12 * std::max(1.0, tau);
  if (std::abs(g.front() + tau) > slack || std::abs(g.back()) > slack) {
    std::ostringstream os;
    os << "history grid spans [" << g.front() << ", " << g.back() << "], expected [" << -tau
       << ", 0]";
    out.push_back(os.str());
  }
  if (!all_finite(history.values)) out.emplace_back("history values have non-finite entries");
  return out;
}

std::vector<std::string> validate(const System& sys, const Tolerance& tol) {
  return std::visit([&](const auto& s) { return validate(s, tol); }, sys);
}

GeneralDelaySystem delay_ph_to_general(const DelayPHSystem& sys) {
  GeneralDelaySystem out;
  out.A0 = solve_spd(sys.H, sys.J - sys.R);
  out.A1 = -solve_spd(sys.H, sys.Z);
  out.B = solve_spd(sys.H, sys.G);
  out.C = sys.G.transpose();
  out.tau = sys.tau;
  return out;
}

StandardLTISystem standard_ph_to_lti(const StandardPHSystem& sys) {
  return {solve_spd(sys.H, sys.J - sys.R), solve_spd(sys.H, sys.G), sys.G.transpose()};
}

DelayPHConversion general_to_delay_ph(const GeneralDelaySystem& sys, const Matrix& h,
                                      const std::optional<Matrix>& theta, const Tolerance& tol) {
  require_valid(sys, tol);
  if (h.rows() != sys.n() || h.cols() != sys.n()) {
    throw DimensionError("energy matrix H has shape " + shape(h) + ", expected " +
                         std::to_string(sys.n()) + "x" + std::to_string(sys.n()));
  }
  require_symmetric(h, "H");
  const PsdReport hrep = is_psd(h, tol);
  if (hrep.min_eigenvalue <= hrep.slack) {
    throw PreconditionError("H is not positive definite");
  }

  DelayPHConversion out;
  const Matrix btH = sys.B.transpose() * h;
  out.output_residual = spectral_norm(sys.C - btH);
  const double scale = std::max(spectral_norm(sys.C), spectral_norm(btH));
  if (out.output_residual > tol.rank_tol * scale) return out;

  const Matrix hA0 = h * sys.A0;
  DelayPHSystem ph;
  ph.H = h;
  ph.J = skew_part(hA0);
  ph.R = -sym_part(hA0);
  ph.Z = -h * sys.A1;
  ph.G = h * sys.B;
  ph.tau = sys.tau;
  ph.theta = theta;
  out.system = std::move(ph);
  return out;
}

}  // namespace phdelay
