#include "phdelay/standard_ph.hpp"

#include <algorithm>
#include <sstream>

#include "phdelay/errors.hpp"

namespace phdelay {

namespace {

void require_compatible(const StandardLTISystem& sys, const Matrix& h) {
  auto violations = validate(sys);
  if (!violations.empty()) throw DimensionError(violations.front());
  if (h.rows() != sys.n() || h.cols() != sys.n()) {
    std::ostringstream os;
    os << "H has shape " << h.rows() << "x" << h.cols() << ", expected " << sys.n() << "x"
       << sys.n();
    throw DimensionError(os.str());
  }
}

}  // namespace

Matrix sigma_H(const StandardLTISystem& sys, const Matrix& h) {
  require_compatible(sys, h);
  const auto n = sys.n(), m = sys.m();
  Matrix s = Matrix::Zero(n + m, n + m);
  s.topLeftCorner(n, n) = h * sys.A;
  s.topRightCorner(n, m) = h * sys.B;
  s.bottomLeftCorner(m, n) = -sys.C;
  return s;
}

StandardCertificate certify_ph_standard(const StandardLTISystem& sys, const Matrix& h,
                                        const Tolerance& tol) {
  require_compatible(sys, h);
  require_symmetric(h, "H");
  const PsdReport hrep = is_psd(h, tol);
  if (hrep.min_eigenvalue <= hrep.slack) {
    std::ostringstream os;
    os << "H is not positive definite (min eigenvalue " << hrep.min_eigenvalue << ")";
    throw PreconditionError(os.str());
  }

  const auto n = sys.n(), m = sys.m();
  const Matrix sigma = sigma_H(sys, h);
  const Matrix neg_sym = -sym_part(sigma);
  const PsdReport rep = is_psd(neg_sym, tol);

  StandardCertificate cert;
  cert.min_eigenvalue = rep.min_eigenvalue;
  cert.witness = rep.witness;
  cert.slack = rep.slack;
  const Matrix hb = h * sys.B;
  cert.output_residual = spectral_norm(hb - sys.C.transpose());

  if (!rep.psd()) {
    cert.reason = "dissipativity_violated";
    return cert;
  }
  const double scale = std::max(1.0, spectral_norm(sys.C));
  if (cert.output_residual > tol.rank_tol * scale) {
    cert.reason = "output_structure_mismatch";
    return cert;
  }

  const Matrix skew = skew_part(sigma);
  SigmaDecomposition d;
  d.R = neg_sym.topLeftCorner(n, n);
  d.J = skew.topLeftCorner(n, n);
  d.G = skew.topRightCorner(n, m);
  cert.decomposition = std::move(d);
  cert.verdict = StandardVerdict::kPH;
  cert.reason = "ok";
  return cert;
}

Matrix kyp_matrix(const StandardLTISystem& sys, const Matrix& h) {
  require_compatible(sys, h);
  const auto n = sys.n(), m = sys.m();
  Matrix w = Matrix::Zero(n + m, n + m);
  w.topLeftCorner(n, n) = -sys.A.transpose() * h - h * sys.A;
  w.topRightCorner(n, m) = sys.C.transpose() - h * sys.B;
  w.bottomLeftCorner(m, n) = sys.C - sys.B.transpose() * h;
  return w;
}

MinimalityReport check_minimality(const StandardLTISystem& sys, const Tolerance& tol) {
  auto violations = validate(sys);
  if (!violations.empty()) throw DimensionError(violations.front());
  const auto n = sys.n(), m = sys.m();

  Matrix ctrb(n, n * m);
  Matrix obsv(n * m, n);
  Matrix ak_b = sys.B;
  Matrix c_ak = sys.C;
  for (Eigen::Index k = 0; k < n; ++k) {
    ctrb.middleCols(k * m, m) = ak_b;
    obsv.middleRows(k * m, m) = c_ak;
    ak_b = sys.A * ak_b;
    c_ak = c_ak * sys.A;
  }

  MinimalityReport rep;
  rep.controllability_rank = numerical_rank(ctrb, tol);
  rep.observability_rank = numerical_rank(obsv, tol);
  rep.controllable = rep.controllability_rank == n;
  rep.observable = rep.observability_rank == n;
  return rep;
}

const char* to_string(Minimality m) {
  switch (m) {
    case Minimality::kMinimal:
      return "minimal";
    case Minimality::kNotControllable:
      return "not_controllable";
    case Minimality::kNotObservable:
      return "not_observable";
  }
  return "unknown";
}

double hamiltonian_standard(const Matrix& h, const Vector& x) {
  if (h.rows() != x.size() || h.cols() != x.size()) {
    throw DimensionError("hamiltonian_standard: H and x sizes differ");
  }
  return 0.5 * x.dot(h * x);
}

}  // namespace phdelay
