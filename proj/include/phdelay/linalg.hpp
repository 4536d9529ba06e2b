#pragma once

// Dense real linear algebra with explicit tolerance policies. Every
// semidefinite, kernel and rank decision in the library goes through here.

#include <Eigen/Dense>

namespace phdelay {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Slack used to turn exact (semi)definiteness and rank statements into
/// floating point decisions.
///
/// With `psd_relative` set (the default) the eigenvalue slack applied to a
/// matrix M is `psd_tol * (1 + ||M||_2)`; otherwise `psd_tol` is used as an
/// absolute bound. `rank_tol` is always relative to the largest singular
/// value (or eigenvalue) of the matrix being tested.
struct Tolerance {
  double psd_tol = 1e-9;
  double rank_tol = 1e-10;
  bool psd_relative = true;

  static Tolerance absolute(double psd, double rank = 1e-10) { return {psd, rank, false}; }

  /// Effective eigenvalue slack for `m`.
  double psd_slack(const Matrix& m) const;
};

enum class PsdVerdict { kPsd, kNotPsd };

struct PsdReport {
  PsdVerdict verdict = PsdVerdict::kPsd;
  double min_eigenvalue = 0.0;
  /// Unit eigenvector for `min_eigenvalue`.
  Vector witness;
  /// Slack that was actually applied.
  double slack = 0.0;

  bool psd() const { return verdict == PsdVerdict::kPsd; }
};

/// Largest relative asymmetry accepted by routines that take a symmetric
/// argument; anything beyond is rejected rather than silently symmetrized.
inline constexpr double kSymmetryTolerance = 1e-12;

Matrix sym_part(const Matrix& f);
Matrix skew_part(const Matrix& f);

bool all_finite(const Matrix& m);

/// max|M - M^T| / max|M| (0 for the zero matrix). Throws on non-square input.
double relative_asymmetry(const Matrix& m);

/// Throws PreconditionError unless `m` is square, finite and symmetric within
/// kSymmetryTolerance. `what` names the operand in the message.
void require_symmetric(const Matrix& m, const char* what);

/// Semidefiniteness by full symmetric eigendecomposition so that a failing
/// matrix comes with its most negative direction.
PsdReport is_psd(const Matrix& m, const Tolerance& tol = {});

/// Orthonormal basis of the numerical null space: right singular vectors
/// whose singular value is <= rank_tol * sigma_max. Returns an n x 0 matrix
/// when `m` has full column rank.
Matrix kernel_basis(const Matrix& m, const Tolerance& tol = {});

/// Orthonormal basis of the numerical column space of `m`.
Matrix image_basis(const Matrix& m, const Tolerance& tol = {});

/// Numerical rank, relative to the largest singular value.
Eigen::Index numerical_rank(const Matrix& m, const Tolerance& tol = {});

/// True iff range(basis) lies in ker(m): ||m * basis||_2 <= rank_tol * max(1, ||m||_2).
/// An empty basis is vacuously contained.
bool subspace_contained(const Matrix& basis, const Matrix& m, const Tolerance& tol = {});

/// True iff range(basis) and image(m) intersect only in zero.
bool intersection_trivial(const Matrix& basis, const Matrix& m, const Tolerance& tol = {});

struct WhiteningBasis {
  /// n x r with V1^T R V1 = I_r.
  Matrix v1;
  /// Orthonormal n x (n - r) basis of the discarded eigenvectors, i.e. of
  /// the numerical kernel of R.
  Matrix kernel;
  Eigen::Index rank = 0;
};

/// V1 = U_+ diag(lambda_+)^{-1/2} over the eigenvalues of R above
/// rank_tol * lambda_max. Throws PreconditionError when R is not PSD.
WhiteningBasis whitening_basis(const Matrix& r, const Tolerance& tol = {});

/// Largest singular value; 0 for empty matrices.
double spectral_norm(const Matrix& m);

/// A - B D^{-1} B^T for M = [[A, B], [B^T, D]] with A of size block_size.
/// Throws PreconditionError when D is numerically singular.
Matrix schur_complement_lower(const Matrix& m, Eigen::Index block_size, const Tolerance& tol = {});

/// diag(a, b).
Matrix block_diag(const Matrix& a, const Matrix& b);

}  // namespace phdelay
