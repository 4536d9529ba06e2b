#include "phdelay/composition.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "phdelay/errors.hpp"

namespace phdelay {

namespace {

constexpr double kPowerConservingTolerance = 1e-12;

struct Aggregate {
  Matrix H, J, R, Z, G;
  double tau = 0.0;
  std::optional<Matrix> theta;
};

Aggregate aggregate(const DelayPHSystem& a, const DelayPHSystem& b, const Matrix& f) {
  require_valid(a);
  require_valid(b);
  const Eigen::Index m = a.m() + b.m();
  if (f.rows() != m || f.cols() != m) {
    std::ostringstream os;
    os << "F has shape " << f.rows() << "x" << f.cols() << ", expected " << m << "x" << m;
    throw DimensionError(os.str());
  }
  if (!all_finite(f)) throw PreconditionError("F has non-finite entries");

  Aggregate out;
  if (a.n() == 0) {
    out.tau = b.tau;
  } else if (b.n() == 0) {
    out.tau = a.tau;
  } else if (a.tau != b.tau) {
    std::ostringstream os;
    os << "delays differ: " << a.tau << " vs " << b.tau;
    throw PreconditionError(os.str());
  } else {
    out.tau = a.tau;
  }
  out.H = block_diag(a.H, b.H);
  out.J = block_diag(a.J, b.J);
  out.R = block_diag(a.R, b.R);
  out.Z = block_diag(a.Z, b.Z);
  out.G = block_diag(a.G, b.G);
  if (a.theta && b.theta) out.theta = block_diag(*a.theta, *b.theta);
  return out;
}

}  // namespace

const char* to_string(FeedbackClass c) {
  switch (c) {
    case FeedbackClass::kPowerConserving:
      return "power_conserving";
    case FeedbackClass::kDissipative:
      return "dissipative";
    case FeedbackClass::kGeneral:
      return "general";
  }
  return "unknown";
}

FeedbackClass classify_feedback(const Matrix& f, const Tolerance& tol) {
  if (f.rows() != f.cols()) throw DimensionError("F must be square");
  const Matrix s = sym_part(f);
  if (spectral_norm(s) <= kPowerConservingTolerance * (1.0 + spectral_norm(f))) {
    return FeedbackClass::kPowerConserving;
  }
  if (is_psd(-s, tol).psd()) return FeedbackClass::kDissipative;
  return FeedbackClass::kGeneral;
}

DelayPHSystem interconnect(const DelayPHSystem& sys1, const DelayPHSystem& sys2, const Matrix& f) {
  Aggregate agg = aggregate(sys1, sys2, f);
  const Matrix gfg = agg.G * f * agg.G.transpose();
  DelayPHSystem out;
  out.H = std::move(agg.H);
  out.J = agg.J + skew_part(gfg);
  out.R = agg.R - sym_part(gfg);
  out.Z = std::move(agg.Z);
  out.G = std::move(agg.G);
  out.tau = agg.tau;
  out.theta = std::move(agg.theta);
  return out;
}

Certificate certify_interconnection(const DelayPHSystem& sys1, const DelayPHSystem& sys2,
                                    const Matrix& f, const Tolerance& tol) {
  if (!sys1.theta || !sys2.theta) {
    throw PreconditionError("both subsystems must carry Theta");
  }
  const Aggregate agg = aggregate(sys1, sys2, f);
  const Matrix& theta = *agg.theta;
  const Matrix r_closed = agg.R - agg.G * sym_part(f) * agg.G.transpose();

  Certificate cert;
  cert.theta_used = theta;
  const Matrix block = ph_condition_matrix(sym_part(r_closed), agg.Z, theta);
  const PsdReport rep = is_psd(block, tol);
  cert.condition_matrix = block;
  cert.min_eigenvalue = rep.min_eigenvalue;
  cert.witness = rep.witness;
  cert.slack = rep.slack;
  cert.matrix_psd = rep.psd();

  if (!is_psd(theta, tol).psd()) {
    cert.reason = "theta_not_psd";
  } else if (!cert.matrix_psd) {
    cert.reason = "condition_not_psd";
  } else {
    cert.reason = "condition_psd";
    cert.verdict = Verdict::kCertified;
  }
  return cert;
}

DelayPHSystem close_delayed_feedback(const StandardPHSystem& sys, const Matrix& f, double tau) {
  auto violations = validate(sys);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  if (f.rows() != sys.m() || f.cols() != sys.m()) {
    std::ostringstream os;
    os << "F has shape " << f.rows() << "x" << f.cols() << ", expected " << sys.m() << "x"
       << sys.m();
    throw DimensionError(os.str());
  }
  if (!all_finite(f)) throw PreconditionError("F has non-finite entries");
  if (!std::isfinite(tau) || tau <= 0.0) throw PreconditionError("tau must be positive");

  DelayPHSystem out;
  out.H = sys.H;
  out.J = sys.J;
  out.R = sys.R;
  out.Z = sys.G * f * sys.G.transpose();
  out.G = sys.G;
  out.tau = tau;
  return out;
}

FeedbackConditions check_feedback_conditions(const Matrix& r, const Matrix& g,
                                             const Tolerance& tol) {
  if (r.rows() != r.cols() || g.rows() != r.rows()) {
    throw DimensionError("R must be n x n and G must have n rows");
  }
  require_symmetric(r, "R");
  const Matrix ker_r = kernel_basis(r, tol);
  FeedbackConditions out;
  out.gt_injective = g.rows() == 0 || (g.cols() > 0 && numerical_rank(g, tol) == g.rows());
  out.kernel_r_in_kernel_gt = subspace_contained(ker_r, g.transpose(), tol);
  out.kernel_r_meets_image_g_trivially = intersection_trivial(ker_r, g, tol);
  return out;
}

GainBound feedback_gain_bound(const Matrix& h, const Matrix& r, const Matrix& g,
                              const Tolerance& tol) {
  const Eigen::Index n = r.rows();
  if (h.rows() != n || h.cols() != n || r.cols() != n || g.rows() != n) {
    throw DimensionError("H, R must be n x n and G must have n rows");
  }
  require_symmetric(r, "R");
  if (!is_psd(r, tol).psd()) throw PreconditionError("R is not positive semidefinite");
  const FeedbackConditions cond = check_feedback_conditions(r, g, tol);
  if (!cond.kernel_r_in_kernel_gt) {
    throw PreconditionError("ker(R) is not contained in ker(G^T)");
  }
  if (!cond.kernel_r_meets_image_g_trivially) {
    throw PreconditionError("ker(R) intersects image(G) nontrivially");
  }

  const WhiteningBasis w = whitening_basis(r, tol);
  const double norm = spectral_norm(w.v1.transpose() * g);
  GainBound out;
  if (norm == 0.0) {
    out.unbounded = true;
    out.beta = std::numeric_limits<double>::infinity();
  } else {
    out.beta = 1.0 / (norm * norm);
  }
  return out;
}

}  // namespace phdelay
