#pragma once

#include <vector>

#include "iscc/cvxcore.hpp"
#include "iscc/metrics.hpp"

namespace iscc {

/// A (BS, UT) offloading pair: UT i uplinks its task through BS m.
struct OffloadPair {
  int m = -1;
  int i = -1;
};

struct OffloadPairSet {
  std::vector<OffloadPair> pairs;

  static OffloadPairSet from_decision(const OffloadDecision& dec);
  /// Throws std::invalid_argument on out-of-range indices or a UT
  /// appearing in more than one pair.
  void validate(int M, int L) const;
  bool contains_ut(int i) const;
  bool empty() const { return pairs.empty(); }
};

/// Iteration state of the fractional-programming loop: one rate auxiliary
/// vector and one latency auxiliary per offloading pair, plus the expansion
/// point for the sensing-constraint linearization.
struct AuxState {
  std::vector<CVec> z;    // per pair, length N
  std::vector<double> c;  // per pair, seconds, > 0
  BeamformingSet w_tilde;
};

class SubproblemInfeasibleError : public std::runtime_error {
 public:
  explicit SubproblemInfeasibleError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Optimal rate auxiliary for a pair: z = Ninv * H * w_i.
CVec update_aux_z(const BeamformingSet& W, const Scenario& s,
                  const OffloadPair& pair, const SystemConfig& cfg);

/// Concave surrogate rate B*log2(1 + 2Re{z^H H^H w_i} - z^H N z), bits/s.
/// Equal to the true uplink rate when z is the optimal auxiliary; never
/// larger otherwise. Throws std::domain_error when the log argument is
/// non-positive.
double transformed_rate(const BeamformingSet& W, const CVec& z,
                        const OffloadPair& pair, const Scenario& s,
                        const SystemConfig& cfg);

/// Tangent-plane minorant of the sensing numerator quadratic w^H Q w at the
/// expansion point, with the data needed to assemble the linearized sensing
/// constraint: minorant(w) >= gamma_over_alpha2 * (interference(w_others) +
/// noise).
struct SensingLinearization {
  CVec lin;               // v = Q * w_tilde; minorant uses 2 Re{v^H w}
  double tangent = 0.0;   // w_tilde^H Q w_tilde
  double gamma_over_alpha2 = 0.0;
  double noise = 0.0;     // radar noise power
};

SensingLinearization linearize_sensing_constraint(const CVec& w_tilde_i,
                                                  const Scenario& s, int i,
                                                  const SystemConfig& cfg);

/// Minorant value 2Re{v^H w} - tangent at a candidate beamformer.
double sensing_minorant(const SensingLinearization& lin, const CVec& w);

/// Per-pair best-case rate B*log2(1 + P_c * smax(H)^2 / sigma_c^2); the
/// latency auxiliaries are floored at task_bits / this bound.
double rate_upper_bound(const Scenario& s, int m, int i,
                        const SystemConfig& cfg);

struct SubproblemResult {
  BeamformingSet W;
  std::vector<double> c;  // per pair, seconds
  cvx::SolverReport report;
};

/// Solves the convexified joint subproblem for fixed auxiliaries: minimize
/// the sum of latency auxiliaries over all beamformers (offloading and
/// local UTs alike) subject to surrogate-rate, power-budget, and linearized
/// sensing constraints. aux.w_tilde must be strictly feasible. Throws
/// SubproblemInfeasibleError naming the violated constraint families when
/// the start point is rejected.
SubproblemResult solve_rate_subproblem(const Scenario& s,
                                       const OffloadPairSet& A,
                                       const AuxState& aux,
                                       const SystemConfig& cfg,
                                       const cvx::SolveOptions& opts = {});

struct InnerOptions {
  double tol = 1e-4;  // relative objective change
  int max_iter = 30;
  cvx::SolveOptions solver = [] {
    cvx::SolveOptions o;
    o.tol = 1e-9;
    return o;
  }();
};

struct InnerResult {
  BeamformingSet W;
  std::vector<double> c;                 // per pair
  std::vector<double> objective_trace;   // after each subproblem solve
  int iterations = 0;
};

/// Alternates subproblem solves with auxiliary updates until the objective
/// stalls. W_init must be strictly feasible for the power and sensing
/// constraints implied by the pair set. With an empty pair set the loop is
/// degenerate and returns W_init with a zero objective.
InnerResult inner_fp_loop(const Scenario& s, const OffloadPairSet& A,
                          const BeamformingSet& W_init,
                          const SystemConfig& cfg,
                          const InnerOptions& opts = {});

/// Scales the given unit directions into a strictly feasible beamformer
/// set: full budget power first (so downstream rate estimates reflect the
/// real uplink potential), then the minimal joint power found by a
/// power-control fixed point seeded at the zero-interference bound.
/// is_local[i] tightens UT i's budget by the local compute power. Throws
/// GammaInfeasibleError when no scaling meets the SINR threshold.
BeamformingSet scale_to_feasible(const Scenario& s, const SystemConfig& cfg,
                                 const std::vector<bool>& is_local,
                                 const std::vector<CVec>& directions);

/// scale_to_feasible along the steering directions a(theta_i)/||a||.
BeamformingSet initial_beamformers(const Scenario& s, const SystemConfig& cfg,
                                   const std::vector<bool>& is_local);

}  // namespace iscc
