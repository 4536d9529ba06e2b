#pragma once

// JSON views of certificates and other results, as emitted by the CLI.

#include "phdelay/composition.hpp"
#include "phdelay/delay_cert.hpp"
#include "phdelay/serialization.hpp"
#include "phdelay/simulation.hpp"
#include "phdelay/standard_ph.hpp"

namespace phdelay {

Json to_json(const Certificate& cert);
Json to_json(const StandardCertificate& cert);
Json to_json(const ThetaConstruction& construction);
Json to_json(const NecessaryConditions& nc);
Json to_json(const FeedbackConditions& fc);
Json to_json(const GainBound& bound);
Json to_json(const MinimalityReport& report);
Json to_json(const Tolerance& tol);

/// Size, abort status and end state; the samples themselves go to CSV.
Json trajectory_summary(const Trajectory& traj);

/// Counts, tolerance, largest gap and at most `max_listed` violations.
Json energy_summary(const EnergyRecord& rec, std::size_t max_listed = 100);

}  // namespace phdelay
