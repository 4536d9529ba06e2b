#include "theta_oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace phdelay::testing {

namespace {

// Closed-form 2x2 semidefiniteness with absolute slack.
bool psd2(double a, double b, double d, double slack) {
  const double mean = 0.5 * (a + d);
  const double radius = std::hypot(0.5 * (a - d), b);
  return mean - radius >= -slack;
}

}  // namespace

std::optional<Matrix> brute_force_theta(const Matrix& r, const Matrix& z, const Tolerance& tol) {
  if (r.rows() != 2 || r.cols() != 2 || z.rows() != 2 || z.cols() != 2) {
    throw std::invalid_argument("brute_force_theta handles 2x2 instances only");
  }
  const double scale = spectral_norm(r);
  if (scale == 0.0) return std::nullopt;
  const double step = 0.02 * scale;
  const int diag_points = 100;  // 0 .. 2||R||
  const int off_points = 100;   // -2||R|| .. 2||R||

  Eigen::Matrix4d block;
  for (int i = 0; i <= diag_points; ++i) {
    const double t11 = i * step;
    for (int j = 0; j <= diag_points; ++j) {
      const double t22 = j * step;
      for (int k = -off_points; k <= off_points; ++k) {
        const double t12 = k * step;
        const double theta_slack = tol.psd_tol * (1.0 + std::max(t11, t22) + std::abs(t12));
        if (!psd2(t11, t12, t22, theta_slack)) continue;
        const double a = r(0, 0) - t11, b = r(0, 1) - t12, d = r(1, 1) - t22;
        if (!psd2(a, b, d, tol.psd_tol * (1.0 + scale))) continue;

        block << a, b, 0.5 * z(0, 0), 0.5 * z(0, 1),  //
            b, d, 0.5 * z(1, 0), 0.5 * z(1, 1),        //
            0.5 * z(0, 0), 0.5 * z(1, 0), t11, t12,    //
            0.5 * z(0, 1), 0.5 * z(1, 1), t12, t22;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(block, Eigen::EigenvaluesOnly);
        const auto& lambda = eig.eigenvalues();
        const double norm = std::max(std::abs(lambda(0)), std::abs(lambda(3)));
        if (lambda(0) >= -tol.psd_tol * (1.0 + norm)) {
          Matrix theta(2, 2);
          theta << t11, t12, t12, t22;
          return theta;
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace phdelay::testing
