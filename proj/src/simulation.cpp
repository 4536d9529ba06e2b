#include "phdelay/simulation.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "phdelay/errors.hpp"

namespace phdelay {

namespace {

constexpr double kGridTolerance = 1e-9;

void write_real(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

}  // namespace

Vector Trajectory::state(Eigen::Index j) const {
  if (j < -delay_steps || j > steps()) {
    std::ostringstream os;
    os << "trajectory index " << j << " outside [" << -delay_steps << ", " << steps() << "]";
    throw PreconditionError(os.str());
  }
  return j < 0 ? Vector(history.col(j + delay_steps)) : Vector(states.col(j));
}

Eigen::Index step_count(double horizon, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw PreconditionError("step h must be positive");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw PreconditionError("horizon must be nonnegative");
  }
  const double ratio = horizon / h;
  const double k = std::round(ratio);
  if (std::abs(ratio - k) > kGridTolerance * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << horizon << " is not an integer multiple of h = " << h;
    throw PreconditionError(os.str());
  }
  return static_cast<Eigen::Index>(k);
}

Matrix sample_input(const std::function<Vector(double)>& u, Eigen::Index m, double horizon,
                    double h) {
  const Eigen::Index steps = step_count(horizon, h);
  Matrix out(m, steps + 1);
  for (Eigen::Index k = 0; k <= steps; ++k) {
    const Vector v = u(static_cast<double>(k) * h);
    if (v.size() != m) throw DimensionError("input function returned a vector of wrong size");
    out.col(k) = v;
  }
  return out;
}

Matrix zero_input(Eigen::Index m, double horizon, double h) {
  return Matrix::Zero(m, step_count(horizon, h) + 1);
}

Matrix step_input(Eigen::Index m, double amplitude, double horizon, double h) {
  return Matrix::Constant(m, step_count(horizon, h) + 1, amplitude);
}

Matrix sine_input(Eigen::Index m, double amplitude, double omega, double horizon, double h) {
  return sample_input(
      [&](double t) { return Vector::Constant(m, amplitude * std::sin(omega * t)); }, m, horizon,
      h);
}

Trajectory integrate_dde(const GeneralDelaySystem& sys, const HistoryFunction& history,
                         const Matrix& inputs, double horizon, double h) {
  require_valid(sys);
  {
    auto v = validate(history, sys.n(), sys.tau);
    if (!v.empty()) throw ValidationError(std::move(v));
  }
  const Eigen::Index steps = step_count(horizon, h);
  const Eigen::Index lag = step_count(sys.tau, h);
  if (lag < 1) throw PreconditionError("tau must be at least one step");
  if (inputs.rows() != sys.m() || inputs.cols() != steps + 1) {
    std::ostringstream os;
    os << "inputs have shape " << inputs.rows() << "x" << inputs.cols() << ", expected "
       << sys.m() << "x" << steps + 1;
    throw DimensionError(os.str());
  }
  if (!all_finite(inputs)) throw PreconditionError("inputs have non-finite entries");

  const Eigen::Index n = sys.n();
  Trajectory traj;
  traj.h = h;
  traj.tau = sys.tau;
  traj.delay_steps = lag;
  traj.history.resize(n, lag + 1);
  for (Eigen::Index j = 0; j <= lag; ++j) {
    traj.history.col(j) = history(static_cast<double>(j - lag) * h);
  }
  traj.states.resize(n, steps + 1);
  traj.states.col(0) = traj.history.col(lag);

  // Derivatives on the computed grid, for the Hermite midpoint.
  Matrix slopes(n, steps + 1);
  auto delayed = [&](Eigen::Index j) -> Vector {
    return j < 0 ? Vector(traj.history.col(j + lag)) : Vector(traj.states.col(j));
  };
  auto rhs = [&](const Vector& x, const Vector& xd, const Vector& u) -> Vector {
    return sys.A0 * x + sys.A1 * xd + sys.B * u;
  };

  Eigen::Index last = steps;
  for (Eigen::Index k = 0; k < steps; ++k) {
    const Vector xk = traj.states.col(k);
    const Vector uk = inputs.col(k);
    const Vector uk1 = inputs.col(k + 1);
    const Vector umid = 0.5 * (uk + uk1);
    const Eigen::Index j = k - lag;

    const Vector d0 = delayed(j);
    const Vector d1 = delayed(j + 1);
    const Vector k1 = rhs(xk, d0, uk);
    slopes.col(k) = k1;
    Vector dmid;
    if (j >= 0) {
      dmid = 0.5 * (d0 + d1) + (h / 8.0) * (slopes.col(j) - slopes.col(j + 1));
    } else {
      dmid = history((static_cast<double>(j) + 0.5) * h);
    }

    const Vector k2 = rhs(xk + 0.5 * h * k1, dmid, umid);
    const Vector k3 = rhs(xk + 0.5 * h * k2, dmid, umid);
    const Vector k4 = rhs(xk + h * k3, d1, uk1);
    const Vector next = xk + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (!next.allFinite() || next.norm() > kBlowUpNorm) {
      last = k;
      traj.aborted = true;
      break;
    }
    traj.states.col(k + 1) = next;
  }

  traj.last_valid = last;
  if (traj.aborted) traj.states.conservativeResize(n, last + 1);
  traj.times.resize(last + 1);
  for (Eigen::Index k = 0; k <= last; ++k) traj.times(k) = static_cast<double>(k) * h;
  traj.inputs = inputs.leftCols(last + 1);
  traj.outputs = sys.C * traj.states;
  return traj;
}

double evaluate_hamiltonian(const Trajectory& traj, const Matrix& h, const Matrix& theta,
                            Eigen::Index k) {
  const Eigen::Index n = traj.states.rows();
  if (h.rows() != n || h.cols() != n || theta.rows() != n || theta.cols() != n) {
    throw DimensionError("H and Theta must match the state dimension");
  }
  if (k < 0 || k > traj.steps()) {
    std::ostringstream os;
    os << "index " << k << " outside [0, " << traj.steps() << "]";
    throw PreconditionError(os.str());
  }
  const Vector xk = traj.states.col(k);
  double integral = 0.0;
  for (Eigen::Index j = k - traj.delay_steps; j <= k; ++j) {
    const Vector x = traj.state(j);
    const double w = (j == k - traj.delay_steps || j == k) ? 0.5 : 1.0;
    integral += w * x.dot(theta * x);
  }
  return 0.5 * xk.dot(h * xk) + traj.h * integral;
}

double default_energy_tolerance(const Trajectory& traj) {
  double peak = 0.0;
  for (Eigen::Index k = 0; k < traj.states.cols(); ++k) {
    peak = std::max(peak, traj.states.col(k).squaredNorm());
  }
  return 10.0 * traj.h * traj.h * (1.0 + peak);
}

EnergyRecord monitor_dissipation(const Trajectory& traj, const Matrix& h, const Matrix& theta,
                                 std::optional<double> tol_energy) {
  const Eigen::Index n = traj.states.rows();
  if (h.rows() != n || h.cols() != n || theta.rows() != n || theta.cols() != n) {
    throw DimensionError("H and Theta must match the state dimension");
  }
  EnergyRecord rec;
  rec.tol_energy = tol_energy.value_or(default_energy_tolerance(traj));
  rec.max_gap = -std::numeric_limits<double>::infinity();
  const Eigen::Index count = traj.states.cols();
  const Eigen::Index lag = traj.delay_steps;
  const double step = traj.h;

  // q[j + lag] = x_j^T Theta x_j on the combined grid.
  std::vector<double> q(static_cast<std::size_t>(count + lag));
  for (Eigen::Index j = -lag; j < count; ++j) {
    const Vector x = traj.state(j);
    q[static_cast<std::size_t>(j + lag)] = x.dot(theta * x);
  }
  auto qa = [&](Eigen::Index j) { return q[static_cast<std::size_t>(j + lag)]; };
  std::vector<double> quad(static_cast<std::size_t>(count));
  for (Eigen::Index k = 0; k < count; ++k) {
    const Vector x = traj.states.col(k);
    quad[static_cast<std::size_t>(k)] = 0.5 * x.dot(h * x);
  }

  // Window integral by the trapezoid rule, updated by the entering and
  // leaving intervals.
  double window = 0.0;
  for (Eigen::Index j = -lag; j < 0; ++j) window += 0.5 * step * (qa(j) + qa(j + 1));

  rec.hamiltonians.reserve(count);
  rec.supplied.reserve(count);
  rec.hamiltonians.push_back(quad[0] + window);
  rec.supplied.push_back(0.0);
  for (Eigen::Index k = 0; k + 1 < count; ++k) {
    const double entering = 0.5 * step * (qa(k) + qa(k + 1));
    const double leaving = 0.5 * step * (qa(k - lag) + qa(k - lag + 1));
    const double supply = 0.5 * step *
                          (traj.outputs.col(k).dot(traj.inputs.col(k)) +
                           traj.outputs.col(k + 1).dot(traj.inputs.col(k + 1)));
    const double gap = (quad[static_cast<std::size_t>(k + 1)] - quad[static_cast<std::size_t>(k)]) +
                       (entering - leaving) - supply;
    window += entering - leaving;
    rec.hamiltonians.push_back(quad[static_cast<std::size_t>(k + 1)] + window);
    rec.supplied.push_back(rec.supplied.back() + supply);
    rec.max_gap = std::max(rec.max_gap, gap);
    if (gap > rec.tol_energy) rec.violations.push_back({k, gap});
  }
  return rec;
}

SimulationResult simulate_delay_ph(const DelayPHSystem& sys, const HistoryFunction& history,
                                   const Matrix& inputs, double horizon, double h, bool monitor,
                                   std::optional<double> tol_energy) {
  require_valid(sys);
  if (monitor && !sys.theta) {
    throw PreconditionError("energy monitoring needs Theta on the system");
  }
  SimulationResult out;
  out.trajectory = integrate_dde(delay_ph_to_general(sys), history, inputs, horizon, h);
  if (monitor) out.energy = monitor_dissipation(out.trajectory, sys.H, *sys.theta, tol_energy);
  return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const EnergyRecord* energy) {
  const Eigen::Index n = traj.states.rows();
  const Eigen::Index m = traj.inputs.rows();
  os << "t";
  for (Eigen::Index i = 1; i <= n; ++i) os << ",x" << i;
  for (Eigen::Index i = 1; i <= m; ++i) os << ",u" << i;
  for (Eigen::Index i = 1; i <= m; ++i) os << ",y" << i;
  os << ",H\n";
  for (Eigen::Index k = 0; k < traj.states.cols(); ++k) {
    write_real(os, traj.times(k));
    for (Eigen::Index i = 0; i < n; ++i) os << ',', write_real(os, traj.states(i, k));
    for (Eigen::Index i = 0; i < m; ++i) os << ',', write_real(os, traj.inputs(i, k));
    for (Eigen::Index i = 0; i < m; ++i) os << ',', write_real(os, traj.outputs(i, k));
    os << ',';
    const bool have = energy && static_cast<std::size_t>(k) < energy->hamiltonians.size();
    write_real(os, have ? energy->hamiltonians[k] : std::numeric_limits<double>::quiet_NaN());
    os << '\n';
  }
}

}  // namespace phdelay
