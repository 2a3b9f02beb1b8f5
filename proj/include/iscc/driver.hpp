#pragma once

#include <string>
#include <vector>

#include "iscc/fp_beamforming.hpp"
#include "iscc/offloading.hpp"

namespace iscc {

struct DriverOptions {
  double outer_tol = 1e-3;  // relative objective change between outer rounds
  int outer_max = 20;
  bool allow_cloud = true;
  InnerOptions inner;
};

/// One trace row per optimization phase.
struct PhaseRecord {
  int iter = 0;
  char phase = 'b';  // 'b' beamforming, 'o' offloading
  double objective = 0.0;
  double elapsed_ms = 0.0;
};

struct SolutionTrace {
  std::vector<PhaseRecord> rows;
};

struct Solution {
  BeamformingSet W;
  OffloadDecision dec;
  SolutionTrace trace;
  std::vector<std::vector<double>> inner_traces;  // one per outer iteration
  std::vector<LatencyBreakdown> breakdown;
  double objective = 0.0;
  int outer_iters = 0;
};

/// Alternates the fractional-programming beamforming step with the
/// offloading LP step, starting from the all-local decision and
/// sensing-aligned beamformers, until the objective stalls or the iteration
/// cap is hit. Throws GammaInfeasibleError when no feasible starting
/// beamformer exists for the scenario.
Solution solve_joint(const Scenario& s, const SystemConfig& cfg,
                     const DriverOptions& opts = {});

/// Constraint margins of a candidate solution; all margins are >= 0 for a
/// feasible pair. sinr and capacity margins are relative, power is absolute
/// (Watts).
struct FeasibilityReport {
  bool feasible = false;
  bool single_mode_ok = false;
  double sinr_margin = 0.0;      // min_i sinr_i / Gamma_th - 1
  double power_margin = 0.0;     // min_i P_c - P_i
  double capacity_margin = 0.0;  // min_m 1 - used_m / C_m
};

std::pair<double, FeasibilityReport> evaluate(const BeamformingSet& W,
                                              const OffloadDecision& dec,
                                              const Scenario& s,
                                              const SystemConfig& cfg);

/// Trace rows as CSV: header "iter,phase,objective_s,elapsed_ms".
std::string trace_to_csv(const SolutionTrace& trace);

}  // namespace iscc
