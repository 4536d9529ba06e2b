#pragma once

// Seeded random instances shared by unit and acceptance tests.

#include <cmath>
#include <random>

#include "phdelay/delay_cert.hpp"
#include "phdelay/model.hpp"

namespace phdelay::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Eigen::Index uniform_int(Rng& rng, Eigen::Index lo, Eigen::Index hi) {
  return std::uniform_int_distribution<Eigen::Index>(lo, hi)(rng);
}

inline Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

inline Matrix random_orthogonal(Rng& rng, Eigen::Index n) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(rng, n, n));
  return qr.householderQ() * Matrix::Identity(n, n);
}

/// Q diag(lambda) Q^T with eigenvalues drawn from [lo, hi].
inline Matrix random_spd(Rng& rng, Eigen::Index n, double lo = 0.5, double hi = 2.0) {
  const Matrix q = random_orthogonal(rng, n);
  Vector lambda(n);
  for (Eigen::Index i = 0; i < n; ++i) lambda(i) = uniform(rng, lo, hi);
  return sym_part(q * lambda.asDiagonal() * q.transpose());
}

/// PSD of the given rank, nonzero eigenvalues in [lo, hi].
inline Matrix random_psd(Rng& rng, Eigen::Index n, Eigen::Index rank, double lo = 0.5,
                         double hi = 2.0) {
  const Matrix q = random_orthogonal(rng, n);
  Vector lambda = Vector::Zero(n);
  for (Eigen::Index i = 0; i < rank; ++i) lambda(i) = uniform(rng, lo, hi);
  return sym_part(q * lambda.asDiagonal() * q.transpose());
}

inline Matrix random_skew(Rng& rng, Eigen::Index n) { return skew_part(random_matrix(rng, n, n)); }

/// Certified delay pH system with Theta spd: R = Theta + Z Theta^{-1} Z^T / 4
/// + E, E spd with eigenvalues in [margin, 1]. The Schur complement of the
/// condition matrix is then E.
inline DelayPHSystem random_certified(Rng& rng, Eigen::Index n, Eigen::Index m, double tau = 1.0,
                                      double margin = 0.05) {
  DelayPHSystem sys;
  sys.H = random_spd(rng, n);
  sys.J = random_skew(rng, n);
  const Matrix theta = random_spd(rng, n, 0.2, 1.5);
  sys.Z = random_matrix(rng, n, n);
  const Matrix e = random_spd(rng, n, margin, 1.0);
  sys.R = sym_part(theta + 0.25 * sys.Z * theta.llt().solve(sys.Z.transpose()) + e);
  sys.G = random_matrix(rng, n, m);
  sys.tau = tau;
  sys.theta = theta;
  return sys;
}

/// Scalar x' = -a0 x(t) - a1 x(t - tau) + u with H = G = 1.
inline DelayPHSystem scalar_system(double a0, double a1, double tau = 1.0) {
  DelayPHSystem sys;
  sys.H = Matrix::Ones(1, 1);
  sys.J = Matrix::Zero(1, 1);
  sys.R = Matrix::Constant(1, 1, a0);
  sys.Z = Matrix::Constant(1, 1, a1);
  sys.G = Matrix::Ones(1, 1);
  sys.tau = tau;
  return sys;
}

/// 2x2 instance where Theta = R/2 fails but diag(1/2, 1/4)
/// certifies.
inline DelayPHSystem counterexample_system() {
  DelayPHSystem sys;
  sys.H = Matrix::Identity(2, 2);
  sys.J = Matrix::Zero(2, 2);
  sys.R = Matrix::Identity(2, 2);
  sys.Z.resize(2, 2);
  sys.Z << 0.0, 1.0 / std::sqrt(3.0), 2.0 / std::sqrt(3.0), 0.0;
  sys.G = Matrix::Identity(2, 2);
  sys.tau = 1.0;
  return sys;
}

}  // namespace phdelay::testing
