#include "iscc/cvxcore.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

namespace iscc::cvx {

namespace {

constexpr double kLn2 = 0.6931471805599453;

double blocks_quadratic(const std::vector<PsdBlock>& blocks, const RVec& x) {
  double v = 0.0;
  for (const auto& b : blocks) {
    auto seg = x.segment(b.offset, b.m.rows());
    v += seg.dot(b.m * seg);
  }
  return v;
}

// out += scale * 2 * P * x restricted to the blocks
void add_blocks_gradient(const std::vector<PsdBlock>& blocks, const RVec& x,
                         double scale, RVec& out) {
  for (const auto& b : blocks)
    out.segment(b.offset, b.m.rows()).noalias() +=
        (2.0 * scale) * (b.m * x.segment(b.offset, b.m.rows()));
}

void add_blocks_hessian(const std::vector<PsdBlock>& blocks, double scale,
                        RMat& hess) {
  for (const auto& b : blocks)
    hess.block(b.offset, b.offset, b.m.rows(), b.m.rows()).noalias() +=
        scale * b.m;
}

double quad_value(const QuadraticConstraint& c, const RVec& x) {
  double v = c.q.size() ? c.q.dot(x) : 0.0;
  return v + blocks_quadratic(c.P, x) + c.r;
}

struct RateEval {
  bool in_domain = false;
  double u = 0.0;  // log argument
  double g = 0.0;  // constraint value
};

RateEval rate_value(const LogRateConstraint& c, const RVec& x) {
  RateEval e;
  double xc = x[c.c_index];
  if (!(xc > 0.0)) return e;
  double u = c.base + c.q.dot(x) - blocks_quadratic(c.P, x);
  if (!(u > 0.0)) return e;
  e.in_domain = true;
  e.u = u;
  e.g = c.rate_demand / (c.c_scale * xc) - std::log2(u);
  return e;
}

bool strictly_feasible(const ConvexProgram& p, const RVec& x,
                       std::vector<std::string>* violated = nullptr) {
  bool ok = true;
  for (const auto& c : p.quad) {
    if (!(quad_value(c, x) < 0.0)) {
      ok = false;
      if (violated) violated->push_back(c.tag);
    }
  }
  for (const auto& c : p.rate) {
    RateEval e = rate_value(c, x);
    if (!e.in_domain || !(e.g < 0.0)) {
      ok = false;
      if (violated) violated->push_back(c.tag);
    }
  }
  return ok;
}

// Barrier merit t*cost^T x - sum log(-g_i); +inf outside the domain.
double barrier_merit(const ConvexProgram& p, double t, const RVec& x) {
  double f = t * p.cost.dot(x);
  for (const auto& c : p.quad) {
    double g = quad_value(c, x);
    if (!(g < 0.0)) return std::numeric_limits<double>::infinity();
    f -= std::log(-g);
  }
  for (const auto& c : p.rate) {
    RateEval e = rate_value(c, x);
    if (!e.in_domain || !(e.g < 0.0))
      return std::numeric_limits<double>::infinity();
    f -= std::log(-e.g);
  }
  return f;
}

// Scratch space reused across Newton iterations.
struct Workspace {
  RVec grad, dir, gc, du;
  RMat hess;
  RMat rank1;  // columns accumulate the outer-product terms
  void resize(int n, int m_quad, int m_rate) {
    grad.resize(n);
    dir.resize(n);
    gc.resize(n);
    du.resize(n);
    hess.resize(n, n);
    rank1.resize(n, m_quad + 2 * m_rate);
  }
};

// Gradient and Hessian (lower triangle valid) of the barrier merit at a
// strictly feasible x. The rank-one barrier curvature terms are batched
// into a single symmetric rank-k update.
void barrier_derivatives(const ConvexProgram& p, double t, const RVec& x,
                         Workspace& w) {
  w.grad = t * p.cost;
  w.hess.setZero();
  int col = 0;
  for (const auto& c : p.quad) {
    double g = quad_value(c, x);
    double inv = 1.0 / (-g);
    w.gc.setZero();
    if (c.q.size()) w.gc = c.q;
    add_blocks_gradient(c.P, x, 1.0, w.gc);
    w.grad.noalias() += inv * w.gc;
    add_blocks_hessian(c.P, 2.0 * inv, w.hess);
    w.rank1.col(col++) = inv * w.gc;
  }
  for (const auto& c : p.rate) {
    RateEval e = rate_value(c, x);
    double xc = x[c.c_index];
    double k = c.rate_demand / c.c_scale;
    double inv = 1.0 / (-e.g);
    w.du = c.q;
    add_blocks_gradient(c.P, x, -1.0, w.du);  // du = q - 2 P x
    w.gc = -w.du / (e.u * kLn2);
    w.gc[c.c_index] += -k / (xc * xc);
    w.grad.noalias() += inv * w.gc;
    add_blocks_hessian(c.P, 2.0 * inv / (e.u * kLn2), w.hess);
    w.hess(c.c_index, c.c_index) += inv * 2.0 * k / (xc * xc * xc);
    w.rank1.col(col++) = std::sqrt(inv / kLn2) / e.u * w.du;
    w.rank1.col(col++) = inv * w.gc;
  }
  w.hess.selfadjointView<Eigen::Lower>().rankUpdate(w.rank1.leftCols(col));
}

bool newton_direction(Workspace& w) {
  double ridge = 0.0;
  double scale = std::max(w.hess.diagonal().maxCoeff(), 1.0);
  for (int attempt = 0; attempt < 6; ++attempt) {
    RMat h = w.hess;
    if (ridge > 0) h.diagonal().array() += ridge;
    Eigen::LLT<RMat, Eigen::Lower> llt(h);
    if (llt.info() == Eigen::Success) {
      w.dir = llt.solve(-w.grad);
      if (w.dir.allFinite()) return true;
    }
    ridge = (ridge == 0.0) ? 1e-12 * scale : ridge * 1e3;
  }
  return false;
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::MaxIter: return "max_iter";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "?";
}

std::pair<RVec, SolverReport> solve_convex(const ConvexProgram& p,
                                           const RVec& start,
                                           const SolveOptions& opts) {
  SolverReport rep;
  RVec x = start;

  if (!strictly_feasible(p, x, &rep.infeasible_tags)) {
    rep.status = SolveStatus::Infeasible;
    rep.objective = p.cost.dot(x);
    return {x, rep};
  }

  const int m = p.num_constraints();
  double t = opts.t0;
  Workspace w;
  w.resize(p.n, static_cast<int>(p.quad.size()), static_cast<int>(p.rate.size()));
  bool budget_ok = true;
  double last_decrement2 = 0.0;

  while (true) {
    // center for the current t
    for (int it = 0; it < opts.max_center_iters; ++it) {
      if (rep.newton_iters >= opts.max_newton_total) {
        budget_ok = false;
        break;
      }
      barrier_derivatives(p, t, x, w);
      if (!newton_direction(w)) break;
      double decrement2 = -w.grad.dot(w.dir);
      last_decrement2 = std::max(decrement2, 0.0);
      if (!(decrement2 > 0) || 0.5 * decrement2 <= opts.center_tol) break;

      double f0 = barrier_merit(p, t, x);
      double slope = w.grad.dot(w.dir);
      double alpha = 1.0;
      bool stepped = false;
      while (alpha > 1e-14) {
        RVec cand = x + alpha * w.dir;
        double f1 = barrier_merit(p, t, cand);
        if (!std::isfinite(f1)) {
          alpha *= 0.5;  // left the domain; shrink harder
          continue;
        }
        if (f1 <= f0 + opts.armijo * alpha * slope) {
          x = std::move(cand);
          stepped = true;
          break;
        }
        alpha *= opts.backtrack;
      }
      ++rep.newton_iters;
      if (!stepped) break;
    }
    ++rep.centering_rounds;
    rep.center_objectives.push_back(p.cost.dot(x));
    if (!budget_ok) break;
    if (static_cast<double>(m) / t <= opts.tol) break;
    t *= opts.mu;
  }

  // Composite KKT residual: the duality measure m/t (the barrier
  // multipliers' complementarity), the H^-1-scaled stationarity of
  // cost + sum lambda_i grad g_i (Newton decrement over t), and the
  // primal violation (non-positive by construction up to roundoff).
  double viol = 0.0;
  for (const auto& c : p.quad) viol = std::max(viol, quad_value(c, x));
  for (const auto& c : p.rate) {
    RateEval e = rate_value(c, x);
    viol = e.in_domain ? std::max(viol, e.g)
                       : std::numeric_limits<double>::infinity();
  }
  double gap = static_cast<double>(m) / t;
  double stat = 0.5 * last_decrement2 / t;
  rep.kkt_residual = std::max({stat, gap, viol});
  rep.objective = p.cost.dot(x);
  rep.status = (budget_ok && rep.kkt_residual <= opts.tol)
                   ? SolveStatus::Optimal
                   : SolveStatus::MaxIter;
  return {x, rep};
}

namespace {

ConvexProgram lp_as_program(const LpProblem& lp) {
  const int n = static_cast<int>(lp.cost.size());
  ConvexProgram p;
  p.n = n;
  p.cost = lp.cost;
  for (int i = 0; i < lp.A.rows(); ++i) {
    QuadraticConstraint c;
    c.q = lp.A.row(i).transpose();
    c.r = -lp.b[i];
    c.tag = "row" + std::to_string(i);
    p.quad.push_back(std::move(c));
  }
  for (int j = 0; j < n; ++j) {
    QuadraticConstraint up;
    up.q = RVec::Zero(n);
    up.q[j] = 1.0;
    up.r = -lp.hi[j];
    up.tag = "ub" + std::to_string(j);
    p.quad.push_back(std::move(up));
    QuadraticConstraint lo;
    lo.q = RVec::Zero(n);
    lo.q[j] = -1.0;
    lo.r = lp.lo[j];
    lo.tag = "lb" + std::to_string(j);
    p.quad.push_back(std::move(lo));
  }
  return p;
}

}  // namespace

LpResult solve_lp(const LpProblem& lp, double tol) {
  const int n = static_cast<int>(lp.cost.size());
  const int rows = static_cast<int>(lp.A.rows());
  LpResult res;
  if (!lp.cost.allFinite() || (rows && (!lp.A.allFinite() || !lp.b.allFinite())) ||
      !lp.lo.allFinite() || !lp.hi.allFinite())
    throw std::invalid_argument("solve_lp: non-finite problem data");
  for (int j = 0; j < n; ++j)
    if (!(lp.lo[j] < lp.hi[j]))
      throw std::invalid_argument("solve_lp: bounds must satisfy lo < hi");

  // Phase 1: minimize s subject to A x - b <= s, box on x.
  RVec x0 = 0.5 * (lp.lo + lp.hi);
  double s0 = 1.0;
  if (rows) s0 = std::max(1.0, (lp.A * x0 - lp.b).maxCoeff() + 1.0);

  double bscale = 1.0;
  if (rows) bscale = std::max(1.0, lp.b.lpNorm<Eigen::Infinity>());
  const double feas_margin = 1e-9 * bscale;

  RVec x = x0;
  if (rows) {
    ConvexProgram ph1;
    ph1.n = n + 1;
    ph1.cost = RVec::Zero(n + 1);
    ph1.cost[n] = 1.0;
    for (int i = 0; i < rows; ++i) {
      QuadraticConstraint c;
      c.q = RVec::Zero(n + 1);
      c.q.head(n) = lp.A.row(i).transpose();
      c.q[n] = -1.0;
      c.r = -lp.b[i];
      c.tag = "row" + std::to_string(i);
      ph1.quad.push_back(std::move(c));
    }
    for (int j = 0; j < n; ++j) {
      QuadraticConstraint up;
      up.q = RVec::Zero(n + 1);
      up.q[j] = 1.0;
      up.r = -lp.hi[j];
      ph1.quad.push_back(std::move(up));
      QuadraticConstraint lo;
      lo.q = RVec::Zero(n + 1);
      lo.q[j] = -1.0;
      lo.r = lp.lo[j];
      ph1.quad.push_back(std::move(lo));
    }
    RVec y0(n + 1);
    y0.head(n) = x0;
    y0[n] = s0;

    // follow the phase-1 path only until a comfortably interior point shows up
    SolveOptions o1;
    o1.tol = 1e-10;
    o1.center_tol = 1e-9;
    RVec y = y0;
    double t = o1.t0;
    const int m1 = ph1.num_constraints();
    Workspace w;
    w.resize(n + 1, m1, 0);
    bool found = false;
    while (true) {
      for (int it = 0; it < o1.max_center_iters; ++it) {
        barrier_derivatives(ph1, t, y, w);
        if (!newton_direction(w)) break;
        double dec2 = -w.grad.dot(w.dir);
        if (!(dec2 > 0) || 0.5 * dec2 <= o1.center_tol) break;
        double f0 = barrier_merit(ph1, t, y);
        double slope = w.grad.dot(w.dir);
        double alpha = 1.0;
        while (alpha > 1e-14) {
          RVec cand = y + alpha * w.dir;
          double f1 = barrier_merit(ph1, t, cand);
          if (!std::isfinite(f1)) {
            alpha *= 0.5;
            continue;
          }
          if (f1 <= f0 + o1.armijo * alpha * slope) {
            y = std::move(cand);
            break;
          }
          alpha *= o1.backtrack;
        }
        ++res.newton_iters;
        if (y[n] < -10.0 * feas_margin) {
          found = true;
          break;
        }
      }
      if (found || static_cast<double>(m1) / t <= o1.tol) break;
      t *= o1.mu;
    }
    if (y[n] >= -feas_margin * 0.1 && !found) {
      // no certified interior point
      res.status = SolveStatus::Infeasible;
      res.x = y.head(n);
      res.objective = lp.cost.dot(res.x);
      res.duality_gap = std::numeric_limits<double>::quiet_NaN();
      return res;
    }
    x = y.head(n);
  }

  ConvexProgram ph2 = lp_as_program(lp);
  SolveOptions o2;
  o2.tol = tol;
  o2.center_tol = 1e-9;
  auto [xs, rep] = solve_convex(ph2, x, o2);
  res.x = xs;
  res.status = rep.status;
  res.objective = rep.objective;
  res.duality_gap = rep.kkt_residual;
  res.newton_iters += rep.newton_iters;
  return res;
}

}  // namespace iscc::cvx
