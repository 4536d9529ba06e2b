#pragma once

#include <optional>
#include <string>

#include "phdelay/model.hpp"

namespace phdelay {

/// Blocks read off Sigma_H:
///   [[R, 0], [0, 0]] = -Sym(Sigma_H),  [[J, G], [-G^T, 0]] = Skew(Sigma_H).
struct SigmaDecomposition {
  Matrix J, R, G;
};

enum class StandardVerdict { kPH, kNotPH };

struct StandardCertificate {
  StandardVerdict verdict = StandardVerdict::kNotPH;
  /// "ok", "dissipativity_violated" or "output_structure_mismatch".
  std::string reason;
  /// Smallest eigenvalue of -Sym(Sigma_H) and its eigenvector.
  double min_eigenvalue = 0.0;
  Vector witness;
  double slack = 0.0;
  /// ||H B - C^T||_2.
  double output_residual = 0.0;
  /// Present when verdict is kPH.
  std::optional<SigmaDecomposition> decomposition;

  bool ph() const { return verdict == StandardVerdict::kPH; }
};

/// [[H A, H B], [-C, 0]].
Matrix sigma_H(const StandardLTISystem& sys, const Matrix& h);

/// Dissipativity test Sym(Sigma_H) <= 0 for a given energy matrix H,
/// together with the structural requirement H B = C^T that makes the
/// off-diagonal block of -Sym(Sigma_H) vanish. Throws PreconditionError if H
/// is not symmetric positive definite.
StandardCertificate certify_ph_standard(const StandardLTISystem& sys, const Matrix& h,
                                        const Tolerance& tol = {});

/// KYP matrix W(H) = [[-A^T H - H A, C^T - H B], [C - B^T H, 0]].
Matrix kyp_matrix(const StandardLTISystem& sys, const Matrix& h);

enum class Minimality { kMinimal, kNotControllable, kNotObservable };

struct MinimalityReport {
  bool controllable = false;
  bool observable = false;
  Eigen::Index controllability_rank = 0;
  Eigen::Index observability_rank = 0;

  /// Controllability is reported first when both fail.
  Minimality status() const {
    if (!controllable) return Minimality::kNotControllable;
    if (!observable) return Minimality::kNotObservable;
    return Minimality::kMinimal;
  }
};

/// Kalman rank tests on [B, AB, ..., A^{n-1}B] and its dual.
MinimalityReport check_minimality(const StandardLTISystem& sys, const Tolerance& tol = {});

const char* to_string(Minimality m);

/// 1/2 x^T H x.
double hamiltonian_standard(const Matrix& h, const Vector& x);

}  // namespace phdelay
