#pragma once

#include <string>
#include <utility>
#include <vector>

#include "iscc/common.hpp"

namespace iscc::cvx {

enum class SolveStatus { Optimal, MaxIter, Infeasible };

const char* to_string(SolveStatus s);

struct SolverReport {
  SolveStatus status = SolveStatus::MaxIter;
  int newton_iters = 0;
  int centering_rounds = 0;
  double kkt_residual = 0.0;  // max of stationarity, duality measure, violation
  double objective = 0.0;
  std::vector<double> center_objectives;   // objective after each centering
  std::vector<std::string> infeasible_tags;  // constraints violated at start
};

/// One diagonal block of a block-diagonal PSD quadratic form. The blocks
/// of one constraint must not overlap.
struct PsdBlock {
  int offset = 0;
  RMat m;  // symmetric PSD
};

/// Convex inequality  x^T P x + q^T x + r <= 0  with P = diag(blocks) PSD.
/// No blocks encodes an affine constraint.
struct QuadraticConstraint {
  std::vector<PsdBlock> P;
  RVec q;
  double r = 0.0;
  std::string tag;
};

/// Rate-style inequality coupling one positive scalar variable with a
/// concave log argument:
///
///   rate_demand / (c_scale * x[c_index])  <=  log2(base + q^T x - x^T P x)
///
/// P is PSD, so the log argument is concave and the constraint convex on
/// the domain { x[c_index] > 0, argument > 0 }. rate_demand is expressed in
/// bits per unit bandwidth; c_scale rescales the latency variable so the
/// solver sees O(1) magnitudes.
struct LogRateConstraint {
  std::vector<PsdBlock> P;
  RVec q;
  double base = 1.0;
  double rate_demand = 0.0;
  int c_index = -1;
  double c_scale = 1.0;
  std::string tag;
};

struct ConvexProgram {
  int n = 0;
  RVec cost;
  std::vector<QuadraticConstraint> quad;
  std::vector<LogRateConstraint> rate;

  int num_constraints() const {
    return static_cast<int>(quad.size() + rate.size());
  }
};

struct SolveOptions {
  double tol = 1e-8;        // target duality measure m/t
  double t0 = 1.0;          // initial barrier weight
  double mu = 10.0;         // barrier weight multiplier per centering round
  double armijo = 0.3;      // sufficient-decrease fraction
  double backtrack = 0.8;   // step shrink factor
  double center_tol = 1e-6;  // Newton decrement^2 / 2 threshold
  int max_center_iters = 80;
  int max_newton_total = 20000;
};

/// Log-barrier interior-point method. `start` must be strictly feasible;
/// otherwise the result carries status Infeasible and the offending
/// constraint tags. On Optimal exits the KKT residual is at most the
/// tolerance and the returned point violates no constraint beyond 1e-8.
/// The final objective can exceed the start value by at most the duality
/// tolerance when the start is already near-optimal.
std::pair<RVec, SolverReport> solve_convex(const ConvexProgram& p,
                                           const RVec& start,
                                           const SolveOptions& opts = {});

/// Linear program  min cost^T x  s.t.  A x <= b,  lo <= x <= hi.
struct LpProblem {
  RVec cost;
  RMat A;  // may have zero rows
  RVec b;
  RVec lo;
  RVec hi;
};

struct LpResult {
  RVec x;
  SolveStatus status = SolveStatus::MaxIter;
  double objective = 0.0;
  double duality_gap = 0.0;
  int newton_iters = 0;
};

/// Two-phase barrier LP solver: phase 1 finds a strictly interior point
/// (or reports infeasibility), phase 2 follows the central path.
LpResult solve_lp(const LpProblem& lp, double tol = 1e-9);

}  // namespace iscc::cvx
