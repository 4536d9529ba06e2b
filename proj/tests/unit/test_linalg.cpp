#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "phdelay/errors.hpp"
#include "phdelay/linalg.hpp"

namespace phdelay {
namespace {

using testing::Rng;

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double x : r) m(i, j++) = x;
    ++i;
  }
  return m;
}

TEST(SymSkew, Examples) {
  EXPECT_EQ(sym_part(Matrix::Identity(2, 2)), Matrix::Identity(2, 2));
  EXPECT_EQ(sym_part(mat({{0, 1}, {0, 0}})), mat({{0, 0.5}, {0.5, 0}}));
  EXPECT_EQ(sym_part(mat({{1, 2}, {4, 3}})), mat({{1, 3}, {3, 3}}));
  EXPECT_EQ(skew_part(Matrix::Identity(2, 2)), Matrix::Zero(2, 2));
  EXPECT_EQ(skew_part(mat({{0, 1}, {-1, 0}})), mat({{0, 1}, {-1, 0}}));
  EXPECT_EQ(skew_part(mat({{1, 2}, {4, 3}})), mat({{0, -1}, {1, 0}}));
}

TEST(SymSkew, RejectsNonSquare) {
  EXPECT_THROW(sym_part(Matrix::Zero(2, 3)), DimensionError);
  EXPECT_THROW(skew_part(Matrix::Zero(3, 2)), DimensionError);
}

TEST(SymSkew, DecompositionLawOnRandomMatrices) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = testing::uniform_int(rng, 1, 7);
    const Matrix f = testing::random_matrix(rng, n, n);
    const Matrix s = sym_part(f), k = skew_part(f);
    EXPECT_LE((s + k - f).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(s, s.transpose());
    EXPECT_EQ(k, -k.transpose());
  }
}

TEST(IsPsd, Examples) {
  const PsdReport eye = is_psd(Matrix::Identity(3, 3), Tolerance::absolute(0.0));
  EXPECT_TRUE(eye.psd());
  EXPECT_NEAR(eye.min_eigenvalue, 1.0, 1e-15);

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -0.5;
  const PsdReport diag = is_psd(d, Tolerance::absolute(1e-10));
  EXPECT_FALSE(diag.psd());
  EXPECT_NEAR(diag.min_eigenvalue, -0.5, 1e-15);
  EXPECT_NEAR(std::abs(diag.witness(1)), 1.0, 1e-15);
  EXPECT_NEAR(diag.witness(0), 0.0, 1e-15);

  const PsdReport pair = is_psd(mat({{1, 2}, {2, 1}}));
  EXPECT_FALSE(pair.psd());
  EXPECT_NEAR(pair.min_eigenvalue, -1.0, 1e-14);
}

TEST(IsPsd, WitnessRealizesMinimumEigenvalue) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = testing::uniform_int(rng, 2, 6);
    const Matrix m = sym_part(testing::random_matrix(rng, n, n));
    const PsdReport rep = is_psd(m);
    if (rep.psd()) continue;
    EXPECT_LT(rep.min_eigenvalue, -rep.slack);
    const double q = rep.witness.dot(m * rep.witness);
    EXPECT_NEAR(q, rep.min_eigenvalue * rep.witness.squaredNorm(),
                1e-8 * std::abs(rep.min_eigenvalue));
  }
}

TEST(IsPsd, RelativeSlackScalesWithNorm) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1e6;
  m(1, 1) = -1e-4;  // within 1e-9 * (1 + 1e6)
  EXPECT_TRUE(is_psd(m).psd());
  EXPECT_FALSE(is_psd(m, Tolerance::absolute(1e-9)).psd());
}

TEST(IsPsd, SymmetryPolicy) {
  Matrix tiny = Matrix::Identity(2, 2);
  tiny(0, 1) = 1e-14;
  EXPECT_NO_THROW(is_psd(tiny));
  Matrix large = Matrix::Identity(2, 2);
  large(0, 1) = 1e-6;
  EXPECT_THROW(is_psd(large), PreconditionError);
  Matrix nan = Matrix::Identity(2, 2);
  nan(1, 1) = std::nan("");
  EXPECT_THROW(is_psd(nan), PreconditionError);
}

// Sylvester's criterion on all principal minors, for matrices whose
// eigenvalues are kept away from zero.
bool principal_minors_nonnegative(const Matrix& m) {
  const Eigen::Index n = m.rows();
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < n; ++i)
      if (mask & (1 << i)) idx.push_back(i);
    Matrix sub(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b)
        sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = m(idx[a], idx[b]);
    if (sub.determinant() < 0.0) return false;
  }
  return true;
}

TEST(IsPsd, AgreesWithPrincipalMinorOracle) {
  Rng rng(2024);
  int psd_count = 0, indefinite_count = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const Matrix q = testing::random_orthogonal(rng, 3);
    Vector lambda(3);
    for (int i = 0; i < 3; ++i) {
      double v = testing::uniform(rng, -1.0, 2.0);
      if (std::abs(v) < 0.05) v = v < 0 ? -0.05 : 0.05;
      lambda(i) = v;
    }
    const Matrix m = sym_part(q * lambda.asDiagonal() * q.transpose());
    const bool oracle = principal_minors_nonnegative(m);
    EXPECT_EQ(is_psd(m).psd(), oracle) << m;
    (oracle ? psd_count : indefinite_count)++;
  }
  EXPECT_GT(psd_count, 10);
  EXPECT_GT(indefinite_count, 10);
}

TEST(KernelBasis, Examples) {
  EXPECT_EQ(kernel_basis(Matrix::Identity(2, 2)).cols(), 0);
  EXPECT_EQ(kernel_basis(Matrix::Identity(2, 2)).rows(), 2);

  const Matrix k0 = kernel_basis(Matrix::Zero(2, 2));
  EXPECT_LE((k0 * k0.transpose() - Matrix::Identity(2, 2)).norm(), 1e-12);

  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = 1.0;
  const Matrix k = kernel_basis(d);
  ASSERT_EQ(k.cols(), 2);
  EXPECT_LE((d * k).norm(), 1e-14);
  EXPECT_LE((k.transpose() * k - Matrix::Identity(2, 2)).norm(), 1e-12);
  EXPECT_LE(k.row(0).norm(), 1e-14);
}

TEST(KernelBasis, RandomRankDeficient) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = testing::uniform_int(rng, 2, 7);
    const Eigen::Index r = testing::uniform_int(rng, 0, n - 1);
    const Matrix m = testing::random_matrix(rng, n, r) * testing::random_matrix(rng, r, n);
    const Matrix k = kernel_basis(m);
    ASSERT_EQ(k.cols(), n - r);
    const Tolerance tol;
    EXPECT_LE(spectral_norm(m * k), 10 * tol.rank_tol * std::max(spectral_norm(m), 1.0));
    EXPECT_LE((k.transpose() * k - Matrix::Identity(n - r, n - r)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(numerical_rank(m), r);
    EXPECT_EQ(image_basis(m).cols(), r);
  }
}

TEST(SubspaceContained, Examples) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  EXPECT_TRUE(subspace_contained(Vector::Unit(2, 1), d));
  EXPECT_FALSE(subspace_contained(Vector::Unit(2, 0), d));
  EXPECT_TRUE(subspace_contained(Matrix(2, 0), d));
  EXPECT_THROW(subspace_contained(Vector::Unit(3, 0), d), DimensionError);
}

TEST(IntersectionTrivial, Examples) {
  EXPECT_TRUE(intersection_trivial(Vector::Unit(2, 0), mat({{0}, {1}})));
  EXPECT_FALSE(intersection_trivial(Vector::Unit(2, 0), mat({{1}, {0}})));
  EXPECT_TRUE(intersection_trivial(Matrix(2, 0), mat({{1}, {0}})));
  EXPECT_TRUE(intersection_trivial(Vector::Unit(2, 0), Matrix::Zero(2, 2)));
}

TEST(WhiteningBasis, Examples) {
  const WhiteningBasis eye = whitening_basis(Matrix::Identity(3, 3));
  EXPECT_EQ(eye.rank, 3);
  EXPECT_LE((eye.v1.transpose() * eye.v1 - Matrix::Identity(3, 3)).norm(), 1e-12);
  EXPECT_EQ(eye.kernel.cols(), 0);

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 4.0;
  const WhiteningBasis w = whitening_basis(d);
  EXPECT_EQ(w.rank, 1);
  ASSERT_EQ(w.v1.cols(), 1);
  EXPECT_NEAR(w.v1(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(w.v1(1, 0), 0.0, 1e-15);
  ASSERT_EQ(w.kernel.cols(), 1);
  EXPECT_NEAR(std::abs(w.kernel(1, 0)), 1.0, 1e-15);

  const Matrix r = mat({{2, 1}, {1, 2}});
  const WhiteningBasis w2 = whitening_basis(r);
  EXPECT_EQ(w2.rank, 2);
  EXPECT_LE((w2.v1.transpose() * r * w2.v1 - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(WhiteningBasis, ZeroAndEmpty) {
  const WhiteningBasis z = whitening_basis(Matrix::Zero(2, 2));
  EXPECT_EQ(z.rank, 0);
  EXPECT_EQ(z.v1.cols(), 0);
  EXPECT_EQ(z.kernel.cols(), 2);
  EXPECT_EQ(whitening_basis(Matrix(0, 0)).rank, 0);
  EXPECT_THROW(whitening_basis(mat({{1, 0}, {0, -1}})), PreconditionError);
}

TEST(WhiteningBasis, RandomIllConditioned) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = testing::uniform_int(rng, 1, 6);
    const Eigen::Index r = testing::uniform_int(rng, 1, n);
    const Matrix q = testing::random_orthogonal(rng, n);
    Vector lambda = Vector::Zero(n);
    for (Eigen::Index i = 0; i < r; ++i) lambda(i) = std::pow(10.0, testing::uniform(rng, -6, 0));
    lambda(0) = 1.0;
    const Matrix rm = sym_part(q * lambda.asDiagonal() * q.transpose());
    const WhiteningBasis w = whitening_basis(rm);
    ASSERT_EQ(w.rank, r);
    // Rounding in the whitened block grows with the condition number.
    const double kappa = 1.0 / lambda.head(r).minCoeff();
    EXPECT_LE((w.v1.transpose() * rm * w.v1 - Matrix::Identity(r, r)).cwiseAbs().maxCoeff(), 1e-14 * kappa);
    EXPECT_LE((rm * w.kernel).norm(), 1e-12);
  }
}

TEST(SpectralNorm, Examples) {
  EXPECT_NEAR(spectral_norm(Matrix::Identity(2, 2)), 1.0, 1e-15);
  EXPECT_NEAR(spectral_norm(mat({{0, 1 / std::sqrt(3.0)}, {2 / std::sqrt(3.0), 0}})),
              2 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(spectral_norm(mat({{3, 0}, {0, -5}})), 5.0, 1e-14);
  EXPECT_EQ(spectral_norm(Matrix(0, 0)), 0.0);
}

TEST(SchurComplement, Examples) {
  EXPECT_NEAR(schur_complement_lower(mat({{2, 1}, {1, 1}}), 1)(0, 0), 1.0, 1e-15);
  const Matrix a = mat({{3, 1}, {1, 2}});
  const Matrix blk = block_diag(a, Matrix::Identity(2, 2));
  EXPECT_LE((schur_complement_lower(blk, 2) - a).norm(), 1e-15);
  EXPECT_NEAR(schur_complement_lower(mat({{1, 1}, {1, 1}}), 1)(0, 0), 0.0, 1e-15);
  EXPECT_THROW(schur_complement_lower(mat({{1, 0}, {0, 0}}), 1), PreconditionError);
  EXPECT_THROW(schur_complement_lower(Matrix::Identity(2, 2), 3), DimensionError);
}

TEST(SchurComplement, CharacterizesSemidefiniteness) {
  Rng rng(99);
  int agree = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = testing::uniform_int(rng, 1, 4);
    const Eigen::Index k = testing::uniform_int(rng, 1, 4);
    const Matrix d = testing::random_spd(rng, k, 0.1, 2.0);
    const Matrix b = 0.5 * testing::random_matrix(rng, n, k);
    const Matrix a = sym_part(testing::random_matrix(rng, n, n)) +
                     testing::uniform(rng, 0.0, 3.0) * Matrix::Identity(n, n);
    Matrix m(n + k, n + k);
    m << a, b, b.transpose(), d;
    const Matrix s = schur_complement_lower(m, n);
    // Skip instances too close to the boundary for a strict comparison.
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    if (std::abs(es.eigenvalues()(0)) < 1e-6) continue;
    EXPECT_EQ(is_psd(m).psd(), is_psd(d).psd() && is_psd(s).psd());
    ++agree;
  }
  EXPECT_GT(agree, 150);
}

TEST(BlockDiag, HandlesEmptyBlocks) {
  const Matrix a = Matrix::Ones(2, 2);
  EXPECT_EQ(block_diag(a, Matrix(0, 0)), a);
  const Matrix g = block_diag(Matrix::Ones(2, 1), Matrix(0, 0));
  EXPECT_EQ(g.rows(), 2);
  EXPECT_EQ(g.cols(), 1);
}

}  // namespace
}  // namespace phdelay
