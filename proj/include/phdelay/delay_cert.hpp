#pragma once

// Certification of port-Hamiltonian delay systems
//
//   H x'(t) = (J - R) x(t) - Z x(t - tau) + G u(t),   y = G^T x,
//
// against the block condition
//
//   [[R - Theta, Z/2], [Z^T/2, Theta]] >= 0,
//
// plus construction of Theta, the kernel conditions any certifying Theta
// forces, and the classical delay-independent passivity inequalities the
// block condition is compared against.

#include <optional>
#include <string>

#include "phdelay/model.hpp"

namespace phdelay {

enum class Verdict { kCertified, kRefuted, kInconclusive };

const char* to_string(Verdict v);

/// Outcome of a semidefinite certificate check.
///
/// `matrix_psd` refers to `condition_matrix` alone. Checks that also carry
/// an output condition (C = B^T Q) record its residual in `output_residual`
/// and only certify when both parts hold.
struct Certificate {
  Verdict verdict = Verdict::kRefuted;
  std::string reason;
  Matrix condition_matrix;
  double min_eigenvalue = 0.0;
  /// Eigenvector of `condition_matrix` for `min_eigenvalue`.
  Vector witness;
  double slack = 0.0;
  bool matrix_psd = false;
  std::optional<Matrix> theta_used;
  std::optional<double> output_residual;

  bool certified() const { return verdict == Verdict::kCertified; }
};

/// [[R - Theta, Z/2], [Z^T/2, Theta]].
Matrix ph_condition_matrix(const Matrix& r, const Matrix& z, const Matrix& theta);

/// CERTIFIED iff Theta is PSD and the block condition holds. A refutation
/// carries the most negative direction of the block matrix.
Certificate certify_delay_ph(const DelayPHSystem& sys, const Matrix& theta,
                             const Tolerance& tol = {});

/// For x' = -a0 x(t) - a1 x(t - tau) + u with H = 1: the closed set of theta
/// that certify, [a0/2 - sqrt(a0^2 - a1^2)/2, a0/2 + sqrt(a0^2 - a1^2)/2].
/// Empty when a0 < |a1|.
struct ScalarThetaInterval {
  double lo = 0.0;
  double hi = 0.0;
};
std::optional<ScalarThetaInterval> scalar_theta_interval(double alpha0, double alpha1);

/// Kernel relations every certifying Theta forces.
struct NecessaryConditions {
  bool kernel_r_in_kernel_theta = false;
  bool kernel_theta_in_kernel_z = false;
  /// ker(R) ∩ image(Z) = {0}.
  bool b = false;
  /// ker(R) ∩ image(Theta) = {0}.
  bool c = false;
  /// ker(R) ⊆ ker(Z^T). Follows from the zero diagonal block of the
  /// condition matrix on ker(R) and is strictly stronger than `b`.
  bool kernel_r_in_kernel_zt = false;

  /// ker(R) ⊆ ker(Theta) ⊆ ker(Z).
  bool a() const { return kernel_r_in_kernel_theta && kernel_theta_in_kernel_z; }
  bool all() const { return a() && b && c && kernel_r_in_kernel_zt; }
};

NecessaryConditions check_necessary(const Matrix& r, const Matrix& theta, const Matrix& z,
                                    const Tolerance& tol = {});

/// Admissible alpha for Theta(alpha) = alpha R. `sigma` is the largest
/// singular value of the half coupling V1^T Z V1 / 2 in the whitened metric.
struct AlphaInterval {
  double sigma = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool feasible = false;
};

/// Open endpoints of the alpha family (Z = 0) are clamped to [eps, 1 - eps].
inline constexpr double kAlphaEndpointClamp = 1e-9;

enum class ThetaStatus {
  kSuccess,
  /// R has a negative eigenvalue; no PSD Theta can certify.
  kRNotPsd,
  /// A kernel relation between R and Z fails; no Theta can certify.
  kKernelHypothesisViolated,
  /// ||V1^T Z V1||_2 > 1. Other Theta may still certify.
  kSufficientConditionViolated,
};

const char* to_string(ThetaStatus s);

struct ThetaConstruction {
  ThetaStatus status = ThetaStatus::kSufficientConditionViolated;
  std::string detail;
  /// Theta = R/2 on success.
  std::optional<Matrix> theta;
  AlphaInterval interval;
  /// ||V1^T Z V1||_2 (NaN when not computed).
  double coupling_norm = 0.0;
  Eigen::Index rank = 0;

  bool ok() const { return status == ThetaStatus::kSuccess; }
};

/// Whitens R (V1^T R V1 = I_r), checks that Z lives on the range of R and
/// bounds the whitened coupling. If ||V1^T Z V1||_2 <= 1, Theta = alpha R
/// certifies for every alpha in the returned interval and Theta = R/2 is
/// returned.
ThetaConstruction construct_theta(const Matrix& r, const Matrix& z, const Tolerance& tol = {});

/// Delay-independent passivity inequality for x' = A0 x + A1 x(t-tau) + B u,
/// y = C x and storage x^T Q x + int x^T Theta x:
///   A0^T Q + Q A0 + Q A1 Theta^{-1} A1^T Q + Theta <= 0  and  C = B^T Q.
/// Q and Theta must be positive definite (PreconditionError otherwise).
Certificate classical_passivity_check(const GeneralDelaySystem& sys, const Matrix& q,
                                      const Matrix& theta, const Tolerance& tol = {});

struct ClassicalCrosscheck {
  Certificate classical;
  /// The inequality part of `classical` (output condition excluded).
  bool inequality_holds = false;
  /// Entrywise deviation between the classical matrix evaluated on the
  /// converted system and -R + Theta + Z Theta^{-1} Z^T / 4, relative to
  /// max(1, max|rhs|).
  double identity_residual = 0.0;
  bool identity_holds = false;
  /// ||C - B^T Q|| with C = G^T, B = H^{-1} G, Q = H/2. This is ||G^T/2||
  /// rather than zero: y = G^T x pairs with supply rate y^T u, the classical
  /// storage x^T Q x with 2 y^T u.
  double output_residual = 0.0;

  bool consistent() const { return inequality_holds && identity_holds; }
};

/// Runs the classical inequality on delay_ph_to_general(sys) with Q = H/2
/// and the same Theta. Requires certify_delay_ph(sys, theta) CERTIFIED and
/// Theta positive definite (PreconditionError otherwise).
ClassicalCrosscheck crosscheck_classical_inequality(const DelayPHSystem& sys,
                                                    const Matrix& theta,
                                                    const Tolerance& tol = {});

/// Finite-dimensional KYP inequality for the delay operator with storage
/// x^T Q11 x + int x^T Q22 x:
///   [[-A0^T Q11 - Q11 A0 - Q22, -Q11 A1], [-A1^T Q11, Q22]] >= 0
/// and C = B^T Q11.
Certificate kyp_delay_check(const GeneralDelaySystem& sys, const Matrix& q11, const Matrix& q22,
                            const Tolerance& tol = {});

}  // namespace phdelay
