#include "phdelay/delay_cert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "phdelay/errors.hpp"

namespace phdelay {

namespace {

// Slack on ||V1^T Z V1||_2 <= 1 so that couplings scaled to exactly one
// survive round-off in the norm computation.
constexpr double kCouplingSlack = 1e-12;

void require_square_of(const Matrix& m, Eigen::Index n, const char* what) {
  if (m.rows() != n || m.cols() != n) {
    std::ostringstream os;
    os << what << " has shape " << m.rows() << "x" << m.cols() << ", expected " << n << "x" << n;
    throw DimensionError(os.str());
  }
}

void require_definite(const Matrix& m, const char* what, const Tolerance& tol) {
  require_symmetric(m, what);
  const PsdReport rep = is_psd(m, tol);
  if (rep.min_eigenvalue <= rep.slack) {
    std::ostringstream os;
    os << what << " is not positive definite (min eigenvalue " << rep.min_eigenvalue << ")";
    throw PreconditionError(os.str());
  }
}

void require_semidefinite(const Matrix& m, const char* what, const Tolerance& tol) {
  require_symmetric(m, what);
  const PsdReport rep = is_psd(m, tol);
  if (!rep.psd()) {
    std::ostringstream os;
    os << what << " is not positive semidefinite (min eigenvalue " << rep.min_eigenvalue << ")";
    throw PreconditionError(os.str());
  }
}

double output_residual(const GeneralDelaySystem& sys, const Matrix& q, double* scale) {
  const Matrix btq = sys.B.transpose() * q;
  *scale = std::max(spectral_norm(sys.C), spectral_norm(btq));
  return spectral_norm(sys.C - btq);
}

void fill_from(Certificate& cert, Matrix condition, const Tolerance& tol) {
  const PsdReport rep = is_psd(condition, tol);
  cert.condition_matrix = std::move(condition);
  cert.min_eigenvalue = rep.min_eigenvalue;
  cert.witness = rep.witness;
  cert.slack = rep.slack;
  cert.matrix_psd = rep.psd();
}

// Theta^{-1} X for symmetric positive definite Theta.
Matrix theta_solve(const Matrix& theta, const Matrix& x) {
  Eigen::LLT<Matrix> llt(theta);
  if (llt.info() != Eigen::Success) throw PreconditionError("Theta is not positive definite");
  return llt.solve(x);
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kCertified:
      return "CERTIFIED";
    case Verdict::kRefuted:
      return "REFUTED";
    case Verdict::kInconclusive:
      return "INCONCLUSIVE";
  }
  return "UNKNOWN";
}

const char* to_string(ThetaStatus s) {
  switch (s) {
    case ThetaStatus::kSuccess:
      return "success";
    case ThetaStatus::kRNotPsd:
      return "r_not_psd";
    case ThetaStatus::kKernelHypothesisViolated:
      return "kernel_hypothesis_violated";
    case ThetaStatus::kSufficientConditionViolated:
      return "sufficient_condition_violated";
  }
  return "unknown";
}

Matrix ph_condition_matrix(const Matrix& r, const Matrix& z, const Matrix& theta) {
  const Eigen::Index n = r.rows();
  require_square_of(r, n, "R");
  require_square_of(z, n, "Z");
  require_square_of(theta, n, "Theta");
  Matrix m(2 * n, 2 * n);
  m << r - theta, 0.5 * z, 0.5 * z.transpose(), theta;
  return m;
}

Certificate certify_delay_ph(const DelayPHSystem& sys, const Matrix& theta, const Tolerance& tol) {
  require_valid(sys, tol);
  require_square_of(theta, sys.n(), "Theta");
  require_symmetric(theta, "Theta");

  Certificate cert;
  cert.theta_used = theta;
  fill_from(cert, ph_condition_matrix(sys.R, sys.Z, theta), tol);
  const bool theta_psd = is_psd(theta, tol).psd();

  if (!theta_psd) {
    cert.reason = "theta_not_psd";
  } else if (!cert.matrix_psd) {
    cert.reason = "condition_not_psd";
  } else {
    cert.reason = "condition_psd";
    cert.verdict = Verdict::kCertified;
  }
  return cert;
}

std::optional<ScalarThetaInterval> scalar_theta_interval(double alpha0, double alpha1) {
  if (!(alpha0 >= std::abs(alpha1))) return std::nullopt;
  const double radius = 0.5 * std::sqrt(std::max(0.0, alpha0 * alpha0 - alpha1 * alpha1));
  return ScalarThetaInterval{0.5 * alpha0 - radius, 0.5 * alpha0 + radius};
}

NecessaryConditions check_necessary(const Matrix& r, const Matrix& theta, const Matrix& z,
                                    const Tolerance& tol) {
  const Eigen::Index n = r.rows();
  require_square_of(r, n, "R");
  require_square_of(theta, n, "Theta");
  require_square_of(z, n, "Z");
  require_symmetric(r, "R");
  require_symmetric(theta, "Theta");

  const Matrix ker_r = kernel_basis(r, tol);
  const Matrix ker_theta = kernel_basis(theta, tol);

  NecessaryConditions out;
  out.kernel_r_in_kernel_theta = subspace_contained(ker_r, theta, tol);
  out.kernel_theta_in_kernel_z = subspace_contained(ker_theta, z, tol);
  out.b = intersection_trivial(ker_r, z, tol);
  out.c = intersection_trivial(ker_r, theta, tol);
  out.kernel_r_in_kernel_zt = subspace_contained(ker_r, z.transpose(), tol);
  return out;
}

ThetaConstruction construct_theta(const Matrix& r, const Matrix& z, const Tolerance& tol) {
  const Eigen::Index n = r.rows();
  require_square_of(r, n, "R");
  require_square_of(z, n, "Z");
  require_symmetric(r, "R");
  if (!all_finite(z)) throw PreconditionError("Z has non-finite entries");

  ThetaConstruction out;
  out.coupling_norm = std::numeric_limits<double>::quiet_NaN();

  const PsdReport rrep = is_psd(r, tol);
  if (!rrep.psd()) {
    std::ostringstream os;
    os << "R is not positive semidefinite (min eigenvalue " << rrep.min_eigenvalue << ")";
    out.status = ThetaStatus::kRNotPsd;
    out.detail = os.str();
    return out;
  }

  const WhiteningBasis w = whitening_basis(r, tol);
  out.rank = w.rank;
  if (!subspace_contained(w.kernel, z, tol)) {
    out.status = ThetaStatus::kKernelHypothesisViolated;
    out.detail = "ker(R) is not contained in ker(Z)";
    return out;
  }
  if (!intersection_trivial(w.kernel, z, tol)) {
    out.status = ThetaStatus::kKernelHypothesisViolated;
    out.detail = "ker(R) intersects image(Z) nontrivially";
    return out;
  }
  if (!subspace_contained(w.kernel, z.transpose(), tol)) {
    out.status = ThetaStatus::kKernelHypothesisViolated;
    out.detail = "ker(R) is not contained in ker(Z^T)";
    return out;
  }

  const double s = spectral_norm(w.v1.transpose() * z * w.v1);
  out.coupling_norm = s;
  out.interval.sigma = 0.5 * s;
  if (s > 1.0 + kCouplingSlack) {
    std::ostringstream os;
    os << "sufficient condition violated: ||V1^T Z V1||_2 = " << s << " > 1";
    out.status = ThetaStatus::kSufficientConditionViolated;
    out.detail = os.str();
    return out;
  }

  // Roots of alpha^2 - alpha + s^2/4; the small root via the product keeps
  // full relative accuracy for tiny s.
  const double hi = 0.5 + 0.5 * std::sqrt(std::max(0.0, 1.0 - s * s));
  const double lo = 0.25 * s * s / hi;
  out.interval.lo = std::max(lo, kAlphaEndpointClamp);
  out.interval.hi = std::min(hi, 1.0 - kAlphaEndpointClamp);
  out.interval.feasible = true;
  out.theta = 0.5 * r;
  out.status = ThetaStatus::kSuccess;
  return out;
}

Certificate classical_passivity_check(const GeneralDelaySystem& sys, const Matrix& q,
                                      const Matrix& theta, const Tolerance& tol) {
  require_valid(sys, tol);
  require_square_of(q, sys.n(), "Q");
  require_square_of(theta, sys.n(), "Theta");
  require_definite(q, "Q", tol);
  require_symmetric(theta, "Theta");
  {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym_part(theta), Eigen::EigenvaluesOnly);
    const Vector& lambda = eig.eigenvalues();
    const double scale = lambda.cwiseAbs().maxCoeff();
    if (!(lambda(0) > tol.rank_tol * scale) || scale == 0.0) {
      throw PreconditionError("Theta must be positive definite for the classical inequality");
    }
  }

  const Matrix qa1 = q * sys.A1;
  const Matrix lhs = sys.A0.transpose() * q + q * sys.A0 +
                     qa1 * theta_solve(theta, qa1.transpose()) + theta;

  Certificate cert;
  cert.theta_used = theta;
  fill_from(cert, sym_part(-lhs), tol);
  double scale = 0.0;
  cert.output_residual = output_residual(sys, q, &scale);
  const bool output_ok = *cert.output_residual <= tol.rank_tol * scale;

  if (!cert.matrix_psd) {
    cert.reason = "inequality_violated";
  } else if (!output_ok) {
    cert.reason = "output_condition_violated";
  } else {
    cert.reason = "ok";
    cert.verdict = Verdict::kCertified;
  }
  return cert;
}

ClassicalCrosscheck crosscheck_classical_inequality(const DelayPHSystem& sys,
                                                    const Matrix& theta,
                                                    const Tolerance& tol) {
  const Certificate ph = certify_delay_ph(sys, theta, tol);
  if (!ph.certified()) {
    throw PreconditionError("crosscheck requires a certified delay pH system, got " +
                            std::string(to_string(ph.verdict)));
  }
  const GeneralDelaySystem general = delay_ph_to_general(sys);
  const Matrix q = 0.5 * sys.H;

  ClassicalCrosscheck out;
  out.classical = classical_passivity_check(general, q, theta, tol);
  out.inequality_holds = out.classical.matrix_psd;
  out.output_residual = out.classical.output_residual.value_or(0.0);

  const Matrix qa1 = q * general.A1;
  const Matrix lhs = general.A0.transpose() * q + q * general.A0 +
                     qa1 * theta_solve(theta, qa1.transpose()) + theta;
  const Matrix rhs = -sys.R + theta + 0.25 * sys.Z * theta_solve(theta, sys.Z.transpose());
  const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
  out.identity_residual = (lhs - rhs).cwiseAbs().maxCoeff() / scale;
  out.identity_holds = out.identity_residual <= 1e-10;
  return out;
}

Certificate kyp_delay_check(const GeneralDelaySystem& sys, const Matrix& q11, const Matrix& q22,
                            const Tolerance& tol) {
  require_valid(sys, tol);
  require_square_of(q11, sys.n(), "Q11");
  require_square_of(q22, sys.n(), "Q22");
  require_semidefinite(q11, "Q11", tol);
  require_semidefinite(q22, "Q22", tol);

  const Eigen::Index n = sys.n();
  const Matrix q11a1 = q11 * sys.A1;
  Matrix k(2 * n, 2 * n);
  k << -sys.A0.transpose() * q11 - q11 * sys.A0 - q22, -q11a1, -q11a1.transpose(), q22;

  Certificate cert;
  cert.theta_used = q22;
  fill_from(cert, sym_part(k), tol);
  double scale = 0.0;
  cert.output_residual = output_residual(sys, q11, &scale);
  const bool output_ok = *cert.output_residual <= tol.rank_tol * scale;

  if (!cert.matrix_psd) {
    cert.reason = "inequality_violated";
  } else if (!output_ok) {
    cert.reason = "output_condition_violated";
  } else {
    cert.reason = "ok";
    cert.verdict = Verdict::kCertified;
  }
  return cert;
}

}  // namespace phdelay
