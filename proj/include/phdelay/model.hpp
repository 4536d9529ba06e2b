#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "phdelay/errors.hpp"
#include "phdelay/linalg.hpp"

namespace phdelay {

/// x' = A x + B u, y = C x.
struct StandardLTISystem {
  Matrix A, B, C;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m() const { return B.cols(); }
};

/// H x' = (J - R) x + G u, y = G^T x, Hamiltonian 1/2 x^T H x.
struct StandardPHSystem {
  Matrix H, J, R, G;

  Eigen::Index n() const { return H.rows(); }
  Eigen::Index m() const { return G.cols(); }
};

/// x'(t) = A0 x(t) + A1 x(t - tau) + B u(t), y = C x.
struct GeneralDelaySystem {
  Matrix A0, A1, B, C;
  double tau = 1.0;

  Eigen::Index n() const { return A0.rows(); }
  Eigen::Index m() const { return B.cols(); }
};

/// H x'(t) = (J - R) x(t) - Z x(t - tau) + G u(t), y = G^T x, with the
/// Lyapunov-Krasovskii Hamiltonian
///   1/2 x(t)^T H x(t) + int_{t-tau}^{t} x(s)^T Theta x(s) ds.
///
/// R is stored as given. Whether the tuple is port-Hamiltonian depends on the
/// block condition checked by certify_delay_ph, not on R alone.
struct DelayPHSystem {
  Matrix H, J, R, Z, G;
  double tau = 1.0;
  std::optional<Matrix> theta;

  Eigen::Index n() const { return H.rows(); }
  Eigen::Index m() const { return G.cols(); }
};

/// Initial function on [-tau, 0]; column k of `values` is phi(grid[k]).
struct HistoryFunction {
  std::vector<double> grid;
  Matrix values;

  /// phi = c on [-tau, 0].
  static HistoryFunction constant(const Vector& c, double tau);

  /// Piecewise-linear evaluation; clamps to the end values outside the grid.
  Vector operator()(double t) const;
};

using System = std::variant<StandardLTISystem, StandardPHSystem, GeneralDelaySystem, DelayPHSystem>;

/// Kind tag used by the JSON schema ("standard_lti", "standard_ph",
/// "general_delay", "delay_ph").
std::string kind_name(const System& system);

/// Every broken invariant as a human-readable line naming the field and the
/// measured quantity. Empty means valid.
std::vector<std::string> validate(const StandardLTISystem& sys, const Tolerance& tol = {});
std::vector<std::string> validate(const StandardPHSystem& sys, const Tolerance& tol = {});
std::vector<std::string> validate(const GeneralDelaySystem& sys, const Tolerance& tol = {});
std::vector<std::string> validate(const DelayPHSystem& sys, const Tolerance& tol = {});
std::vector<std::string> validate(const HistoryFunction& history, Eigen::Index n, double tau);
std::vector<std::string> validate(const System& sys, const Tolerance& tol = {});

/// Throws ValidationError carrying all violations.
template <typename S>
void require_valid(const S& sys, const Tolerance& tol = {}) {
  auto violations = validate(sys, tol);
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

/// A0 = H^{-1}(J - R), A1 = -H^{-1} Z, B = H^{-1} G, C = G^T.
GeneralDelaySystem delay_ph_to_general(const DelayPHSystem& sys);

/// Realization x' = H^{-1}(J - R) x + H^{-1} G u, y = G^T x.
StandardLTISystem standard_ph_to_lti(const StandardPHSystem& sys);

struct DelayPHConversion {
  /// Set only when the output matrix is compatible with y = G^T x.
  std::optional<DelayPHSystem> system;
  /// ||C - B^T H||_2.
  double output_residual = 0.0;

  bool ok() const { return system.has_value(); }
};

/// Structural splitting of a general delay system for a chosen energy
/// matrix H: J = Skew(H A0), R = -Sym(H A0), Z = -H A1, G = H B. Succeeds
/// only when C = B^T H, which is what y = G^T x requires. Says nothing about
/// whether the result is port-Hamiltonian.
DelayPHConversion general_to_delay_ph(const GeneralDelaySystem& sys, const Matrix& h,
                                      const std::optional<Matrix>& theta = std::nullopt,
                                      const Tolerance& tol = {});

}  // namespace phdelay
