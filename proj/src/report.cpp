#include "phdelay/report.hpp"

#include <limits>

namespace phdelay {

Json to_json(const Certificate& cert) {
  Json j;
  j["verdict"] = to_string(cert.verdict);
  j["reason"] = cert.reason;
  j["min_eigenvalue"] = cert.min_eigenvalue;
  j["slack"] = cert.slack;
  j["matrix_psd"] = cert.matrix_psd;
  j["witness"] = vector_to_json(cert.witness);
  j["condition_matrix"] = matrix_to_json(cert.condition_matrix);
  if (cert.theta_used) j["theta"] = matrix_to_json(*cert.theta_used);
  if (cert.output_residual) j["output_residual"] = *cert.output_residual;
  return j;
}

Json to_json(const StandardCertificate& cert) {
  Json j;
  j["verdict"] = cert.ph() ? "PH" : "NOT_PH";
  j["reason"] = cert.reason;
  j["min_eigenvalue"] = cert.min_eigenvalue;
  j["slack"] = cert.slack;
  j["witness"] = vector_to_json(cert.witness);
  j["output_residual"] = cert.output_residual;
  if (cert.decomposition) {
    j["decomposition"] = {{"J", matrix_to_json(cert.decomposition->J)},
                          {"R", matrix_to_json(cert.decomposition->R)},
                          {"G", matrix_to_json(cert.decomposition->G)}};
  }
  return j;
}

Json to_json(const ThetaConstruction& c) {
  Json j;
  j["status"] = to_string(c.status);
  j["detail"] = c.detail;
  j["rank"] = c.rank;
  j["coupling_norm"] = c.coupling_norm;
  j["alpha_interval"] = {{"sigma", c.interval.sigma},
                         {"lo", c.interval.lo},
                         {"hi", c.interval.hi},
                         {"feasible", c.interval.feasible}};
  if (c.theta) j["theta"] = matrix_to_json(*c.theta);
  return j;
}

Json to_json(const NecessaryConditions& nc) {
  return {{"kernel_r_in_kernel_theta", nc.kernel_r_in_kernel_theta},
          {"kernel_theta_in_kernel_z", nc.kernel_theta_in_kernel_z},
          {"a", nc.a()},
          {"b", nc.b},
          {"c", nc.c},
          {"kernel_r_in_kernel_zt", nc.kernel_r_in_kernel_zt},
          {"all", nc.all()}};
}

Json to_json(const FeedbackConditions& fc) {
  return {{"gt_injective", fc.gt_injective},
          {"kernel_r_in_kernel_gt", fc.kernel_r_in_kernel_gt},
          {"kernel_r_meets_image_g_trivially", fc.kernel_r_meets_image_g_trivially},
          {"all", fc.all()}};
}

Json to_json(const GainBound& bound) {
  Json j;
  j["unbounded"] = bound.unbounded;
  j["beta"] = bound.unbounded ? Json(nullptr) : Json(bound.beta);
  return j;
}

Json to_json(const MinimalityReport& r) {
  return {{"controllable", r.controllable},
          {"observable", r.observable},
          {"controllability_rank", r.controllability_rank},
          {"observability_rank", r.observability_rank},
          {"status", to_string(r.status())}};
}

Json to_json(const Tolerance& tol) {
  return {{"psd_tol", tol.psd_tol}, {"rank_tol", tol.rank_tol}, {"psd_relative", tol.psd_relative}};
}

Json trajectory_summary(const Trajectory& traj) {
  double peak = 0.0;
  for (Eigen::Index k = 0; k < traj.states.cols(); ++k) peak = std::max(peak, traj.states.col(k).norm());
  Json j;
  j["h"] = traj.h;
  j["tau"] = traj.tau;
  j["delay_steps"] = traj.delay_steps;
  j["steps"] = traj.steps();
  j["aborted"] = traj.aborted;
  j["last_valid"] = traj.last_valid;
  j["max_state_norm"] = peak;
  j["final_state"] = vector_to_json(traj.states.col(traj.states.cols() - 1));
  return j;
}

Json energy_summary(const EnergyRecord& rec, std::size_t max_listed) {
  Json list = Json::array();
  for (std::size_t i = 0; i < rec.violations.size() && i < max_listed; ++i) {
    list.push_back({{"k", rec.violations[i].k}, {"gap", rec.violations[i].gap}});
  }
  Json j;
  j["tol_energy"] = rec.tol_energy;
  j["max_gap"] = rec.max_gap;
  j["violation_count"] = rec.violations.size();
  j["violations"] = std::move(list);
  if (!rec.hamiltonians.empty()) {
    j["hamiltonian_initial"] = rec.hamiltonians.front();
    j["hamiltonian_final"] = rec.hamiltonians.back();
    j["supplied_total"] = rec.supplied.back();
  }
  return j;
}

}  // namespace phdelay
