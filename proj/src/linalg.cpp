#include "phdelay/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phdelay/errors.hpp"

namespace phdelay {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << " must be square, got " << m.rows() << "x" << m.cols();
    throw DimensionError(os.str());
  }
}

void require_finite(const Matrix& m, const char* what) {
  if (!all_finite(m)) {
    throw PreconditionError(std::string(what) + " has non-finite entries");
  }
}

// Flip each column so that its largest-magnitude entry is positive. Makes
// eigenvector output reproducible across platforms.
void normalize_signs(Matrix& cols) {
  for (Eigen::Index j = 0; j < cols.cols(); ++j) {
    Eigen::Index arg = 0;
    cols.col(j).cwiseAbs().maxCoeff(&arg);
    if (cols(arg, j) < 0.0) cols.col(j) *= -1.0;
  }
}

Eigen::JacobiSVD<Matrix> svd_of(const Matrix& m, unsigned options) {
  return Eigen::JacobiSVD<Matrix>(m, options);
}

}  // namespace

double Tolerance::psd_slack(const Matrix& m) const {
  return psd_relative ? psd_tol * (1.0 + spectral_norm(m)) : psd_tol;
}

Matrix sym_part(const Matrix& f) {
  require_square(f, "sym_part argument");
  return 0.5 * (f + f.transpose());
}

Matrix skew_part(const Matrix& f) {
  require_square(f, "skew_part argument");
  return 0.5 * (f - f.transpose());
}

bool all_finite(const Matrix& m) { return m.size() == 0 || m.allFinite(); }

double relative_asymmetry(const Matrix& m) {
  require_square(m, "matrix");
  if (m.size() == 0) return 0.0;
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

void require_symmetric(const Matrix& m, const char* what) {
  require_square(m, what);
  require_finite(m, what);
  const double asym = relative_asymmetry(m);
  if (asym > kSymmetryTolerance) {
    std::ostringstream os;
    os << what << " is not symmetric (relative asymmetry " << asym << ")";
    throw PreconditionError(os.str());
  }
}

PsdReport is_psd(const Matrix& m, const Tolerance& tol) {
  require_symmetric(m, "matrix tested for semidefiniteness");
  PsdReport report;
  if (m.size() == 0) return report;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym_part(m));
  if (eig.info() != Eigen::Success) {
    throw PreconditionError("symmetric eigendecomposition did not converge");
  }
  const Vector& lambda = eig.eigenvalues();  // ascending
  report.min_eigenvalue = lambda(0);
  report.witness = eig.eigenvectors().col(0);
  Matrix w = report.witness;
  normalize_signs(w);
  report.witness = w.col(0);

  const double norm = std::max(std::abs(lambda(0)), std::abs(lambda(lambda.size() - 1)));
  report.slack = tol.psd_relative ? tol.psd_tol * (1.0 + norm) : tol.psd_tol;
  report.verdict = report.min_eigenvalue >= -report.slack ? PsdVerdict::kPsd : PsdVerdict::kNotPsd;
  return report;
}

Matrix kernel_basis(const Matrix& m, const Tolerance& tol) {
  require_finite(m, "matrix");
  const Eigen::Index n = m.cols();
  if (n == 0) return Matrix(0, 0);
  if (m.rows() == 0) return Matrix::Identity(n, n);

  auto svd = svd_of(m, Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  const double cutoff = tol.rank_tol * sigma(0);
  Eigen::Index rank = 0;
  if (sigma(0) > 0.0) {
    while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;
  }
  Matrix basis = svd.matrixV().rightCols(n - rank);
  normalize_signs(basis);
  return basis;
}

Matrix image_basis(const Matrix& m, const Tolerance& tol) {
  require_finite(m, "matrix");
  if (m.rows() == 0 || m.cols() == 0) return Matrix(m.rows(), 0);
  auto svd = svd_of(m, Eigen::ComputeThinU);
  const Vector& sigma = svd.singularValues();
  const double cutoff = tol.rank_tol * sigma(0);
  Eigen::Index rank = 0;
  if (sigma(0) > 0.0) {
    while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;
  }
  Matrix basis = svd.matrixU().leftCols(rank);
  normalize_signs(basis);
  return basis;
}

Eigen::Index numerical_rank(const Matrix& m, const Tolerance& tol) {
  require_finite(m, "matrix");
  if (m.size() == 0) return 0;
  const Vector sigma = svd_of(m, 0).singularValues();
  if (sigma(0) <= 0.0) return 0;
  const double cutoff = tol.rank_tol * sigma(0);
  return (sigma.array() > cutoff).count();
}

bool subspace_contained(const Matrix& basis, const Matrix& m, const Tolerance& tol) {
  if (basis.cols() == 0) return true;
  if (m.cols() != basis.rows()) {
    std::ostringstream os;
    os << "subspace_contained: basis has " << basis.rows() << " rows but matrix has " << m.cols()
       << " columns";
    throw DimensionError(os.str());
  }
  const double residual = spectral_norm(m * basis);
  return residual <= tol.rank_tol * std::max(1.0, spectral_norm(m));
}

bool intersection_trivial(const Matrix& basis, const Matrix& m, const Tolerance& tol) {
  if (basis.cols() == 0) return true;
  if (m.rows() != basis.rows()) {
    std::ostringstream os;
    os << "intersection_trivial: basis has " << basis.rows() << " rows but matrix has "
       << m.rows() << " rows";
    throw DimensionError(os.str());
  }
  const Matrix image = image_basis(m, tol);
  if (image.cols() == 0) return true;
  const Eigen::Index expected = basis.cols() + image.cols();
  if (expected > basis.rows()) return false;
  Matrix stacked(basis.rows(), expected);
  stacked << basis, image;
  return numerical_rank(stacked, tol) == expected;
}

WhiteningBasis whitening_basis(const Matrix& r, const Tolerance& tol) {
  require_symmetric(r, "R");
  WhiteningBasis out;
  const Eigen::Index n = r.rows();
  if (n == 0) {
    out.v1 = Matrix(0, 0);
    out.kernel = Matrix(0, 0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym_part(r));
  const Vector& lambda = eig.eigenvalues();
  const double lmax = lambda(n - 1);
  const double norm = std::max(std::abs(lambda(0)), std::abs(lmax));
  const double slack = tol.psd_relative ? tol.psd_tol * (1.0 + norm) : tol.psd_tol;
  if (lambda(0) < -slack) {
    std::ostringstream os;
    os << "R is not positive semidefinite (min eigenvalue " << lambda(0) << ")";
    throw PreconditionError(os.str());
  }
  if (lmax <= 0.0) {
    out.v1 = Matrix(n, 0);
    out.kernel = Matrix::Identity(n, n);
    return out;
  }
  const double cutoff = tol.rank_tol * lmax;
  Eigen::Index rank = 0;
  for (Eigen::Index i = n - 1; i >= 0 && lambda(i) > cutoff; --i) ++rank;

  out.rank = rank;
  out.v1.resize(n, rank);
  for (Eigen::Index j = 0; j < rank; ++j) {
    const Eigen::Index i = n - 1 - j;  // descending eigenvalues
    out.v1.col(j) = eig.eigenvectors().col(i) / std::sqrt(lambda(i));
  }
  normalize_signs(out.v1);
  out.kernel = eig.eigenvectors().leftCols(n - rank);
  normalize_signs(out.kernel);
  return out;
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  require_finite(m, "matrix");
  return svd_of(m, 0).singularValues()(0);
}

Matrix schur_complement_lower(const Matrix& m, Eigen::Index block_size, const Tolerance& tol) {
  require_symmetric(m, "partitioned matrix");
  const Eigen::Index n = m.rows();
  if (block_size < 0 || block_size > n) {
    throw DimensionError("schur_complement_lower: block size out of range");
  }
  const Eigen::Index rest = n - block_size;
  const Matrix a = m.topLeftCorner(block_size, block_size);
  if (rest == 0) return a;
  const Matrix b = m.topRightCorner(block_size, rest);
  const Matrix d = m.bottomRightCorner(rest, rest);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym_part(d), Eigen::EigenvaluesOnly);
  const Vector& lambda = eig.eigenvalues();
  const double dnorm = lambda.cwiseAbs().maxCoeff();
  const double dmin = lambda.cwiseAbs().minCoeff();
  if (dnorm == 0.0 || dmin <= tol.rank_tol * dnorm) {
    throw PreconditionError("schur_complement_lower: lower-right block is singular");
  }
  const Matrix x = d.fullPivLu().solve(b.transpose());
  return sym_part(a - b * x);
}

Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace phdelay
