#include "cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>

#include "phdelay/composition.hpp"
#include "phdelay/delay_cert.hpp"
#include "phdelay/errors.hpp"
#include "phdelay/report.hpp"
#include "phdelay/serialization.hpp"
#include "phdelay/simulation.hpp"
#include "phdelay/standard_ph.hpp"

namespace phdelay::cli {

namespace {

/// Raised for malformed flag values that CLI11 cannot see (history and input
/// specs, missing companion files).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Session {
  Tolerance tol;
  Json inputs = Json::array();

  std::string load(const std::string& path, const std::string& role) {
    std::string text = read_text_file(path);
    inputs.push_back({{"role", role}, {"path", path}, {"sha256", sha256_hex(text)}});
    return text;
  }
};

struct Outcome {
  Json result;
  int exit_code = kSuccess;
};

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::kCertified:
      return kSuccess;
    case Verdict::kRefuted:
      return kRefuted;
    case Verdict::kInconclusive:
      return kInconclusive;
  }
  return kUsageError;
}

Verdict construction_verdict(ThetaStatus s) {
  return s == ThetaStatus::kSufficientConditionViolated ? Verdict::kInconclusive
                                                        : Verdict::kRefuted;
}

std::vector<double> parse_reals(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("cannot read '" + item + "' as a number in " + what);
    }
  }
  if (out.empty()) throw UsageError("no numbers given in " + what);
  return out;
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

HistoryFunction load_history(Session& session, const std::string& spec, Eigen::Index n,
                             double tau) {
  if (starts_with(spec, "const:")) {
    const auto values = parse_reals(spec.substr(6), "--history");
    Vector c(n);
    if (values.size() == 1) {
      c.setConstant(values[0]);
    } else if (static_cast<Eigen::Index>(values.size()) == n) {
      for (Eigen::Index i = 0; i < n; ++i) c(i) = values[static_cast<std::size_t>(i)];
    } else {
      throw UsageError("--history const: needs 1 or " + std::to_string(n) + " values");
    }
    return HistoryFunction::constant(c, tau);
  }
  HistoryFunction h = read_history(session.load(spec, "history"));
  auto v = validate(h, n, tau);
  if (!v.empty()) throw ValidationError(std::move(v));
  return h;
}

Matrix csv_input(Session& session, const std::string& path, Eigen::Index m, double horizon,
                 double h) {
  std::stringstream text(session.load(path, "input"));
  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(text, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const char first = line.front();
    if (!(std::isdigit(static_cast<unsigned char>(first)) || first == '-' || first == '+' ||
          first == '.')) {
      continue;  // header
    }
    auto values = parse_reals(line, "input CSV");
    if (static_cast<Eigen::Index>(values.size()) != m + 1) {
      throw UsageError("input CSV rows need t and " + std::to_string(m) + " values");
    }
    if (!times.empty() && !(values[0] > times.back())) {
      throw UsageError("input CSV times must be strictly increasing");
    }
    times.push_back(values[0]);
    rows.emplace_back(values.begin() + 1, values.end());
  }
  if (times.empty()) throw UsageError("input CSV has no data rows");
  return sample_input(
      [&](double t) {
        Vector u(m);
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        if (it == times.begin()) {
          for (Eigen::Index i = 0; i < m; ++i) u(i) = rows.front()[static_cast<std::size_t>(i)];
        } else if (it == times.end()) {
          for (Eigen::Index i = 0; i < m; ++i) u(i) = rows.back()[static_cast<std::size_t>(i)];
        } else {
          const auto hi = static_cast<std::size_t>(it - times.begin());
          const std::size_t lo = hi - 1;
          const double w = (t - times[lo]) / (times[hi] - times[lo]);
          for (Eigen::Index i = 0; i < m; ++i) {
            const auto ii = static_cast<std::size_t>(i);
            u(i) = (1.0 - w) * rows[lo][ii] + w * rows[hi][ii];
          }
        }
        return u;
      },
      m, horizon, h);
}

Matrix load_input(Session& session, const std::string& spec, Eigen::Index m, double horizon,
                  double h) {
  if (spec == "zero") return zero_input(m, horizon, h);
  if (starts_with(spec, "step:")) {
    const auto v = parse_reals(spec.substr(5), "--input step:");
    if (v.size() != 1) throw UsageError("--input step: takes one amplitude");
    return step_input(m, v[0], horizon, h);
  }
  if (starts_with(spec, "sine:")) {
    const auto v = parse_reals(spec.substr(5), "--input sine:");
    if (v.size() != 2) throw UsageError("--input sine: takes amplitude,omega");
    return sine_input(m, v[0], v[1], horizon, h);
  }
  if (starts_with(spec, "csv:")) return csv_input(session, spec.substr(4), m, horizon, h);
  throw UsageError("unknown --input '" + spec + "' (zero, step:a, sine:a,w, csv:file)");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

Matrix square_matrix(Session& session, const std::string& path, const std::string& role) {
  Matrix m = read_matrix(session.load(path, role));
  if (m.rows() != m.cols()) throw DimensionError(role + " must be square");
  return m;
}

// certify ----------------------------------------------------------------

struct CertifyArgs {
  std::string system;
  std::string theta;
  std::string energy;
};

Outcome certify_delay(Session& s, const DelayPHSystem& sys, const std::string& theta_path) {
  Outcome out;
  Matrix theta;
  if (!theta_path.empty()) {
    theta = square_matrix(s, theta_path, "theta");
    out.result["theta_source"] = "flag";
  } else if (sys.theta) {
    theta = *sys.theta;
    out.result["theta_source"] = "embedded";
  } else {
    out.result["theta_source"] = "constructed";
    const ThetaConstruction tc = construct_theta(sys.R, sys.Z, s.tol);
    out.result["construction"] = to_json(tc);
    if (!tc.ok()) {
      const Verdict v = construction_verdict(tc.status);
      out.result["verdict"] = to_string(v);
      out.result["reason"] = to_string(tc.status);
      out.exit_code = verdict_exit(v);
      return out;
    }
    theta = *tc.theta;
  }
  const Certificate cert = certify_delay_ph(sys, theta, s.tol);
  out.result["verdict"] = to_string(cert.verdict);
  out.result["reason"] = cert.reason;
  out.result["certificate"] = to_json(cert);
  out.exit_code = verdict_exit(cert.verdict);
  return out;
}

Outcome cmd_certify(Session& s, const CertifyArgs& a) {
  const System system = read_system(s.load(a.system, "system"), s.tol);
  Outcome out;
  if (const auto* ph = std::get_if<StandardPHSystem>(&system)) {
    const StandardCertificate cert = certify_ph_standard(standard_ph_to_lti(*ph), ph->H, s.tol);
    out.result["verdict"] = cert.ph() ? "CERTIFIED" : "REFUTED";
    out.result["reason"] = cert.reason;
    out.result["certificate"] = to_json(cert);
    out.exit_code = cert.ph() ? kSuccess : kRefuted;
    return out;
  }
  if (const auto* lti = std::get_if<StandardLTISystem>(&system)) {
    if (a.energy.empty()) throw UsageError("certifying a standard_lti system needs --energy");
    const Matrix h = square_matrix(s, a.energy, "energy");
    const StandardCertificate cert = certify_ph_standard(*lti, h, s.tol);
    out.result["verdict"] = cert.ph() ? "CERTIFIED" : "REFUTED";
    out.result["reason"] = cert.reason;
    out.result["certificate"] = to_json(cert);
    out.exit_code = cert.ph() ? kSuccess : kRefuted;
    return out;
  }
  if (const auto* gen = std::get_if<GeneralDelaySystem>(&system)) {
    if (a.energy.empty()) throw UsageError("certifying a general_delay system needs --energy");
    const Matrix h = square_matrix(s, a.energy, "energy");
    const DelayPHConversion conv = general_to_delay_ph(*gen, h, std::nullopt, s.tol);
    if (!conv.ok()) {
      out.result["verdict"] = to_string(Verdict::kRefuted);
      out.result["reason"] = "output_structure_mismatch";
      out.result["output_residual"] = conv.output_residual;
      out.exit_code = kRefuted;
      return out;
    }
    return certify_delay(s, *conv.system, a.theta);
  }
  return certify_delay(s, std::get<DelayPHSystem>(system), a.theta);
}

// construct-theta ----------------------------------------------------------

DelayPHSystem require_delay_ph(const System& system, const std::string& what) {
  if (const auto* d = std::get_if<DelayPHSystem>(&system)) return *d;
  throw UsageError(what + " must be a delay_ph system, got " + kind_name(system));
}

Outcome cmd_construct_theta(Session& s, const std::string& path, const std::string& out_path) {
  const DelayPHSystem sys = require_delay_ph(read_system(s.load(path, "system"), s.tol), path);
  const ThetaConstruction tc = construct_theta(sys.R, sys.Z, s.tol);
  Outcome out;
  out.result["construction"] = to_json(tc);
  if (tc.ok()) {
    out.result["verdict"] = to_string(Verdict::kCertified);
    if (!out_path.empty()) write_file(out_path, dump_canonical(matrix_to_json(*tc.theta)));
    out.exit_code = kSuccess;
  } else {
    const Verdict v = construction_verdict(tc.status);
    out.result["verdict"] = to_string(v);
    out.exit_code = verdict_exit(v);
  }
  return out;
}

// interconnect -------------------------------------------------------------

struct InterconnectArgs {
  std::string sys1, sys2, feedback, out;
  bool certify = false;
};

Outcome cmd_interconnect(Session& s, const InterconnectArgs& a) {
  const DelayPHSystem s1 = require_delay_ph(read_system(s.load(a.sys1, "system1"), s.tol), a.sys1);
  const DelayPHSystem s2 = require_delay_ph(read_system(s.load(a.sys2, "system2"), s.tol), a.sys2);
  const Matrix f = square_matrix(s, a.feedback, "feedback");
  const DelayPHSystem closed = interconnect(s1, s2, f);

  Outcome out;
  out.result["feedback_class"] = to_string(classify_feedback(f, s.tol));
  if (a.out.empty()) {
    out.result["system"] = system_to_json(System(closed));
  } else {
    write_file(a.out, write_system(System(closed)));
    out.result["system_file"] = a.out;
  }
  if (a.certify) {
    const Certificate cert = certify_interconnection(s1, s2, f, s.tol);
    out.result["verdict"] = to_string(cert.verdict);
    out.result["certificate"] = to_json(cert);
    out.exit_code = verdict_exit(cert.verdict);
  }
  return out;
}

// feedback -------------------------------------------------------------------

struct FeedbackArgs {
  std::string system, feedback, out;
  double tau = 0.0;
  bool certify = false;
};

Outcome cmd_feedback(Session& s, const FeedbackArgs& a) {
  const System system = read_system(s.load(a.system, "system"), s.tol);
  const auto* ph = std::get_if<StandardPHSystem>(&system);
  if (!ph) throw UsageError(a.system + " must be a standard_ph system, got " + kind_name(system));
  const Matrix f = read_matrix(s.load(a.feedback, "feedback"));
  const DelayPHSystem closed = close_delayed_feedback(*ph, f, a.tau);

  Outcome out;
  const FeedbackConditions fc = check_feedback_conditions(ph->R, ph->G, s.tol);
  out.result["feedback_conditions"] = to_json(fc);
  try {
    out.result["gain_bound"] = to_json(feedback_gain_bound(ph->H, ph->R, ph->G, s.tol));
  } catch (const PreconditionError& e) {
    out.result["gain_bound"] = {{"error", e.what()}};
  }
  out.result["feedback_norm"] = spectral_norm(f);
  if (a.out.empty()) {
    out.result["system"] = system_to_json(System(closed));
  } else {
    write_file(a.out, write_system(System(closed)));
    out.result["system_file"] = a.out;
  }
  if (a.certify) {
    Outcome cert = certify_delay(s, closed, "");
    for (auto it = cert.result.begin(); it != cert.result.end(); ++it) out.result[it.key()] = it.value();
    out.exit_code = cert.exit_code;
  }
  return out;
}

// simulate -------------------------------------------------------------------

struct SimulateArgs {
  std::string system, history, input = "zero", out, theta;
  double horizon = 0.0, h = 0.0;
  bool monitor = false;
  std::optional<double> tol_energy;
};

Outcome cmd_simulate(Session& s, const SimulateArgs& a) {
  const System system = read_system(s.load(a.system, "system"), s.tol);
  GeneralDelaySystem general;
  std::optional<DelayPHSystem> ph;
  if (const auto* d = std::get_if<DelayPHSystem>(&system)) {
    ph = *d;
    if (!a.theta.empty()) ph->theta = square_matrix(s, a.theta, "theta");
    general = delay_ph_to_general(*ph);
  } else if (const auto* g = std::get_if<GeneralDelaySystem>(&system)) {
    general = *g;
  } else {
    throw UsageError("simulate needs a delay_ph or general_delay system, got " + kind_name(system));
  }
  if (a.monitor && !(ph && ph->theta)) {
    throw UsageError("--monitor needs a delay_ph system with theta (embedded or --theta)");
  }

  const HistoryFunction history = load_history(s, a.history, general.n(), general.tau);
  const Matrix inputs = load_input(s, a.input, general.m(), a.horizon, a.h);
  const Trajectory traj = integrate_dde(general, history, inputs, a.horizon, a.h);

  Outcome out;
  out.result["trajectory"] = trajectory_summary(traj);
  std::optional<EnergyRecord> energy;
  if (a.monitor) {
    energy = monitor_dissipation(traj, ph->H, *ph->theta, a.tol_energy);
    out.result["energy"] = energy_summary(*energy);
    if (!energy->violations.empty()) out.exit_code = kRefuted;
  }
  if (!a.out.empty()) {
    std::ostringstream csv;
    write_trajectory_csv(csv, traj, energy ? &*energy : nullptr);
    write_file(a.out, csv.str());
    out.result["csv_file"] = a.out;
  }
  return out;
}

// check ------------------------------------------------------------------------

void add_check(Json& checks, const std::string& name, bool pass, Json detail = nullptr) {
  Json c = {{"name", name}, {"pass", pass}};
  if (!detail.is_null()) c["detail"] = std::move(detail);
  checks.push_back(std::move(c));
}

void check_delay_ph(Json& checks, const DelayPHSystem& sys, const Tolerance& tol) {
  const ThetaConstruction tc = construct_theta(sys.R, sys.Z, tol);
  add_check(checks, "r_psd", tc.status != ThetaStatus::kRNotPsd,
            tc.status == ThetaStatus::kRNotPsd ? Json(tc.detail) : Json(nullptr));
  if (tc.status != ThetaStatus::kRNotPsd) {
    const Matrix ker_r = kernel_basis(sys.R, tol);
    add_check(checks, "kernel_r_in_kernel_z", subspace_contained(ker_r, sys.Z, tol));
    add_check(checks, "kernel_r_meets_image_z_trivially", intersection_trivial(ker_r, sys.Z, tol));
    add_check(checks, "kernel_r_in_kernel_zt", subspace_contained(ker_r, sys.Z.transpose(), tol));
    add_check(checks, "theta_construction", tc.ok(), to_json(tc));
  }
  if (sys.theta) {
    const NecessaryConditions nc = check_necessary(sys.R, *sys.theta, sys.Z, tol);
    add_check(checks, "necessary_conditions", nc.all(), to_json(nc));
    const Certificate cert = certify_delay_ph(sys, *sys.theta, tol);
    add_check(checks, "certificate_embedded_theta", cert.certified(),
              {{"verdict", to_string(cert.verdict)}, {"min_eigenvalue", cert.min_eigenvalue}});
  }
}

Outcome cmd_check(Session& s, const std::string& path) {
  const System system = parse_system(s.load(path, "system"));
  Json checks = Json::array();
  const auto violations = validate(system, s.tol);
  add_check(checks, "valid", violations.empty(), violations.empty() ? Json(nullptr) : Json(violations));

  if (violations.empty()) {
    if (const auto* lti = std::get_if<StandardLTISystem>(&system)) {
      const MinimalityReport mr = check_minimality(*lti, s.tol);
      add_check(checks, "minimal", mr.status() == Minimality::kMinimal, to_json(mr));
    } else if (const auto* ph = std::get_if<StandardPHSystem>(&system)) {
      const MinimalityReport mr = check_minimality(standard_ph_to_lti(*ph), s.tol);
      add_check(checks, "minimal", mr.status() == Minimality::kMinimal, to_json(mr));
      const FeedbackConditions fc = check_feedback_conditions(ph->R, ph->G, s.tol);
      add_check(checks, "feedback_conditions", fc.all(), to_json(fc));
    } else if (const auto* d = std::get_if<DelayPHSystem>(&system)) {
      check_delay_ph(checks, *d, s.tol);
      const FeedbackConditions fc = check_feedback_conditions(d->R, d->G, s.tol);
      add_check(checks, "feedback_conditions", fc.all(), to_json(fc));
    }
  }

  Outcome out;
  bool all = true;
  for (const auto& c : checks) all = all && c["pass"].get<bool>();
  out.result["checks"] = std::move(checks);
  out.result["all_pass"] = all;
  out.exit_code = all ? kSuccess : kRefuted;
  return out;
}

}  // namespace

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(digest[i]);
  return os.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certification, composition and simulation of port-Hamiltonian delay systems",
               "phdelay"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<double> psd_tol;
  std::optional<double> rank_tol;
  app.add_option("--psd-tol", psd_tol, "absolute eigenvalue slack (default: relative 1e-9)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--rank-tol", rank_tol, "relative rank cutoff (default 1e-10)")
      ->check(CLI::NonNegativeNumber);

  CertifyArgs certify;
  auto* c_certify = app.add_subcommand("certify", "check the delay pH block condition");
  c_certify->add_option("system", certify.system, "system JSON")->required();
  c_certify->add_option("--theta", certify.theta, "Theta matrix JSON");
  c_certify->add_option("--energy", certify.energy,
                        "energy matrix H for standard_lti and general_delay systems");

  std::string ct_system, ct_out;
  auto* c_theta = app.add_subcommand("construct-theta", "construct Theta = R/2 and its alpha range");
  c_theta->add_option("system", ct_system, "delay_ph system JSON")->required();
  c_theta->add_option("--out", ct_out, "write Theta as a matrix JSON");

  InterconnectArgs ic;
  auto* c_ic = app.add_subcommand("interconnect", "close u = F y + v around two delay pH systems");
  c_ic->add_option("system1", ic.sys1)->required();
  c_ic->add_option("system2", ic.sys2)->required();
  c_ic->add_option("feedback", ic.feedback, "F matrix JSON")->required();
  c_ic->add_option("--out", ic.out, "write the closed loop system JSON");
  c_ic->add_flag("--certify", ic.certify, "certify the closed loop");

  FeedbackArgs fb;
  auto* c_fb = app.add_subcommand("feedback", "delayed output feedback around a standard pH system");
  c_fb->add_option("system", fb.system, "standard_ph system JSON")->required();
  c_fb->add_option("feedback", fb.feedback, "F matrix JSON")->required();
  c_fb->add_option("tau", fb.tau, "delay")->required()->check(CLI::PositiveNumber);
  c_fb->add_option("--out", fb.out, "write the closed loop system JSON");
  c_fb->add_flag("--certify", fb.certify, "construct Theta and certify the closed loop");

  SimulateArgs sim;
  double tol_energy = -1.0;
  auto* c_sim = app.add_subcommand("simulate", "integrate the delay equation");
  c_sim->set_help_flag("--help", "print this help message and exit");
  c_sim->add_option("system", sim.system, "delay_ph or general_delay system JSON")->required();
  c_sim->add_option("--history", sim.history, "history JSON file or const:c[,c2,...]")->required();
  c_sim->add_option("--input", sim.input, "zero | step:a | sine:a,w | csv:file");
  c_sim->add_option("--T", sim.horizon, "horizon")->required()->check(CLI::NonNegativeNumber);
  c_sim->add_option("--h", sim.h, "step")->required()->check(CLI::PositiveNumber);
  c_sim->add_option("--out", sim.out, "trajectory CSV");
  c_sim->add_option("--theta", sim.theta, "Theta matrix JSON for the monitor");
  c_sim->add_option("--tol-energy", tol_energy, "dissipation tolerance (default 10 h^2 (1 + max|x|^2))")
      ->check(CLI::NonNegativeNumber);
  c_sim->add_flag("--monitor", sim.monitor, "check the dissipation inequality at every step");

  std::string check_system;
  auto* c_check = app.add_subcommand("check", "run every structural diagnostic");
  c_check->add_option("system", check_system)->required();

  std::vector<const char*> argv{"phdelay"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kUsageError;
  }

  Session session;
  if (psd_tol || rank_tol) {
    session.tol = Tolerance::absolute(psd_tol.value_or(Tolerance{}.psd_tol),
                                      rank_tol.value_or(Tolerance{}.rank_tol));
    session.tol.psd_relative = !psd_tol.has_value();
  }
  if (tol_energy >= 0.0) sim.tol_energy = tol_energy;

  std::string command = app.get_subcommands().front()->get_name();
  Json report;
  report["command"] = command;
  int code = kUsageError;
  try {
    Outcome o;
    if (command == "certify") {
      o = cmd_certify(session, certify);
    } else if (command == "construct-theta") {
      o = cmd_construct_theta(session, ct_system, ct_out);
    } else if (command == "interconnect") {
      o = cmd_interconnect(session, ic);
    } else if (command == "feedback") {
      o = cmd_feedback(session, fb);
    } else if (command == "simulate") {
      o = cmd_simulate(session, sim);
    } else {
      o = cmd_check(session, check_system);
    }
    report["result"] = std::move(o.result);
    code = o.exit_code;
  } catch (const ValidationError& e) {
    report["error"] = e.what();
    report["violations"] = e.violations();
    err << "phdelay: " << e.what() << "\n";
  } catch (const std::exception& e) {
    report["error"] = e.what();
    err << "phdelay: " << e.what() << "\n";
  }
  report["inputs"] = std::move(session.inputs);
  report["tolerances"] = to_json(session.tol);
  report["exit_code"] = code;
  out << dump_canonical(report);
  return code;
}

}  // namespace phdelay::cli
