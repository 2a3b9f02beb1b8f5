#pragma once

#include <tuple>
#include <vector>

#include "iscc/cvxcore.hpp"
#include "iscc/metrics.hpp"

namespace iscc {

/// Column identity in the offloading LP: family (MEC vs cloud), BS, UT.
struct OffloadVar {
  bool is_mec = true;
  int m = 0;
  int i = 0;
};

/// Relaxed decision with entries in [0, 1].
struct RelaxedDecision {
  RMat a;  // M x L
  RMat b;  // M x L
};

struct OffloadLpData {
  cvx::LpProblem lp;
  std::vector<OffloadVar> vars;
  double base_cost = 0.0;  // all-local total time, added to the LP objective
  bool allow_cloud = true;
  // UTs whose transmit power alone exceeds the budget; no decision is
  // power-feasible for them.
  std::vector<int> power_impossible;
};

/// Assembles the relaxed offloading LP for fixed beamformers. Cost
/// coefficients are the latency deltas versus local execution; pairs with a
/// non-positive uplink rate receive a large sentinel cost so they are never
/// selected. Power rows use the fractional-mixture power model; rows that
/// can never bind are dropped.
OffloadLpData build_offloading_lp(const BeamformingSet& W, const Scenario& s,
                                  const SystemConfig& cfg,
                                  bool allow_cloud = true);

RelaxedDecision relaxed_from_vector(const OffloadLpData& data, const RVec& x,
                                    const SystemConfig& cfg);

/// Greedy relax-and-inflate rounding: repeatedly fix the largest fractional
/// variable to 1 when the remaining constraints stay satisfiable (to 0
/// otherwise) and re-solve the reduced LP, until the solution is integral.
/// Falls back to the all-local decision when no feasible rounding exists
/// along the greedy path. The returned decision satisfies the single-mode,
/// capacity, and exact binary power constraints whenever it is not the
/// flagged fallback.
struct RoundResult {
  OffloadDecision dec;
  bool fell_back_all_local = false;
};

RoundResult round_inflate(const RVec& relaxed, const OffloadLpData& data,
                          const BeamformingSet& W, const SystemConfig& cfg);

struct OffloadResult {
  OffloadDecision dec;
  double objective = 0.0;     // true total time of the rounded decision
  double lp_objective = 0.0;  // relaxed optimum (including the local base)
  bool fell_back_all_local = false;
  bool power_feasible = true;  // false when even all-local violates power
};

/// build -> solve -> round pipeline returning the true objective.
OffloadResult optimize_offloading(const BeamformingSet& W, const Scenario& s,
                                  const SystemConfig& cfg,
                                  bool allow_cloud = true);

/// Exact binary feasibility margin checks used by the rounding validator.
bool binary_decision_feasible(const OffloadDecision& dec,
                              const BeamformingSet& W,
                              const SystemConfig& cfg);

}  // namespace iscc
