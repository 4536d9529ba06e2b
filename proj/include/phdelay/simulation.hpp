#pragma once

// Fixed-step integration of x'(t) = A0 x(t) + A1 x(t - tau) + B u(t) by the
// method of steps, plus evaluation of the delay Hamiltonian
//   1/2 x(t)^T H x(t) + int_{t-tau}^{t} x(s)^T Theta x(s) ds
// along the result and a per-step dissipation monitor.

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "phdelay/model.hpp"

namespace phdelay {

/// Blow-up threshold on ||x_k||_2.
inline constexpr double kBlowUpNorm = 1e12;

struct Trajectory {
  double h = 0.0;
  double tau = 0.0;
  /// tau / h.
  Eigen::Index delay_steps = 0;
  /// t_k = k h for k = 0..K.
  Vector times;
  /// n x (K+1), column k is x(t_k).
  Matrix states;
  /// m x (K+1) input samples.
  Matrix inputs;
  /// m x (K+1), C x_k.
  Matrix outputs;
  /// n x (delay_steps + 1): the history on t = -tau, ..., -h, 0.
  Matrix history;
  /// Set when the state left the finite range; the arrays then end at
  /// `last_valid`.
  bool aborted = false;
  Eigen::Index last_valid = 0;

  Eigen::Index steps() const { return states.cols() - 1; }

  /// x on the combined grid, j = -delay_steps .. steps().
  Vector state(Eigen::Index j) const;
};

/// m x (K+1) samples of `u` at t_k = k h.
Matrix sample_input(const std::function<Vector(double)>& u, Eigen::Index m, double horizon,
                    double h);
Matrix zero_input(Eigen::Index m, double horizon, double h);
Matrix step_input(Eigen::Index m, double amplitude, double horizon, double h);
Matrix sine_input(Eigen::Index m, double amplitude, double omega, double horizon, double h);

/// Number of steps `horizon / h`; throws PreconditionError unless it is a
/// nonnegative integer within relative 1e-9.
Eigen::Index step_count(double horizon, double h);

/// Classical RK4 with constant step h, tau / h integral. The delayed value at
/// the half step is a cubic Hermite interpolant of the computed grid, or the
/// history function itself while the half step still falls in [-tau, 0].
/// `inputs` holds m x (K+1) samples, taken piecewise linear between them.
Trajectory integrate_dde(const GeneralDelaySystem& sys, const HistoryFunction& history,
                         const Matrix& inputs, double horizon, double h);

/// 1/2 x_k^T H x_k plus the trapezoid rule for the Theta integral on the
/// step grid of [t_k - tau, t_k].
double evaluate_hamiltonian(const Trajectory& traj, const Matrix& h, const Matrix& theta,
                            Eigen::Index k);

struct EnergyViolation {
  Eigen::Index k = 0;
  double gap = 0.0;
};

struct EnergyRecord {
  std::vector<double> hamiltonians;
  /// Cumulative trapezoid of y^T u, supplied[0] = 0.
  std::vector<double> supplied;
  std::vector<EnergyViolation> violations;
  double tol_energy = 0.0;
  /// max_k gap_k (-inf for an empty trajectory).
  double max_gap = 0.0;
};

/// Default tol_energy = 10 h^2 (1 + max_k ||x_k||^2).
double default_energy_tolerance(const Trajectory& traj);

/// gap_k = (H_{k+1} - H_k) - trapezoid of y^T u over [t_k, t_{k+1}]; a
/// violation is recorded whenever gap_k > tol_energy.
EnergyRecord monitor_dissipation(const Trajectory& traj, const Matrix& h, const Matrix& theta,
                                 std::optional<double> tol_energy = std::nullopt);

struct SimulationResult {
  Trajectory trajectory;
  std::optional<EnergyRecord> energy;
};

/// delay_ph_to_general + integrate_dde, and monitor_dissipation with the
/// system's Theta when `monitor` is set (PreconditionError if Theta is unset).
SimulationResult simulate_delay_ph(const DelayPHSystem& sys, const HistoryFunction& history,
                                   const Matrix& inputs, double horizon, double h,
                                   bool monitor = true,
                                   std::optional<double> tol_energy = std::nullopt);

/// Header t,x1..xn,u1..um,y1..ym,H; one row per grid point with %.17g reals.
/// The H column is NaN when no energy record is supplied.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const EnergyRecord* energy = nullptr);

}  // namespace phdelay
