#pragma once

#include <string>

#include "iscc/driver.hpp"

namespace iscc {

/// Comparison schemes: the joint design, its two-tier (no cloud) variant,
/// fixed maximal-ratio beamformers with optimized offloading, and plain
/// local execution.
enum class Scheme { ThcoBo, TtcoBo, ThcoMrc, ThcoMrs, Local };

Scheme scheme_from_string(const std::string& name);  // throws ConfigError
const char* scheme_name(Scheme s);

/// BS with the largest average channel gain (Frobenius norm) toward UT i.
int strongest_bs(const Scenario& s, int i);

/// Full-power beamformer along the dominant singular direction of the
/// channel to BS m: w = sqrt(P_c) * u_max / ||u_max||.
CVec mrc_beamformer(const Scenario& s, int i, int m, const SystemConfig& cfg);

/// Full-power beamformer along the steering direction:
/// w = sqrt(P_c) * a(theta_i) / ||a(theta_i)||.
CVec mrs_beamformer(const Scenario& s, int i, const SystemConfig& cfg);

struct SchemeResult {
  Scheme scheme = Scheme::Local;
  BeamformingSet W;
  OffloadDecision dec;
  double objective = 0.0;
  int outer_iters = 0;
  bool feasible = false;
  FeasibilityReport report;
  SolutionTrace trace;  // only for the optimized schemes
};

/// Joint design with the cloud tier disabled (offloading restricted to
/// local/MEC).
SchemeResult two_tier_scheme(const Scenario& s, const SystemConfig& cfg,
                             const DriverOptions& opts = {});

/// Runs any scheme on one scenario. Fixed-beamformer schemes still optimize
/// their offloading decisions; their feasibility (notably the sensing SINR)
/// is evaluated and reported rather than enforced. A scheme whose
/// initialization is infeasible returns feasible=false with a NaN objective.
SchemeResult run_scheme(Scheme scheme, const Scenario& s,
                        const SystemConfig& cfg,
                        const DriverOptions& opts = {});

}  // namespace iscc
