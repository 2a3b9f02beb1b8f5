#include "iscc/offloading.hpp"

#include <algorithm>
#include <cmath>

namespace iscc {

namespace {

constexpr double kSentinelCost = 1e6;  // seconds, excludes dead uplinks
constexpr double kPowerSlack = 1e-8;   // relaxed power-row relief, W
constexpr double kIntegralTol = 1e-6;

double local_compute_power(const SystemConfig& cfg) {
  return cfg.epsilon * cfg.f_L * cfg.f_L * cfg.f_L;
}

}  // namespace

OffloadLpData build_offloading_lp(const BeamformingSet& W, const Scenario& s,
                                  const SystemConfig& cfg, bool allow_cloud) {
  OffloadLpData data;
  data.allow_cloud = allow_cloud;
  const int M = cfg.M, L = cfg.L;
  const double t_local = exec_time_local(cfg);
  data.base_cost = L * t_local;

  for (int m = 0; m < M; ++m)
    for (int i = 0; i < L; ++i) data.vars.push_back({true, m, i});
  if (allow_cloud)
    for (int m = 0; m < M; ++m)
      for (int i = 0; i < L; ++i) data.vars.push_back({false, m, i});
  const int n = static_cast<int>(data.vars.size());

  data.lp.cost = RVec::Zero(n);
  for (int v = 0; v < n; ++v) {
    const auto& var = data.vars[v];
    double rate = uplink_rate(W, s, var.m, var.i, cfg);
    double t = var.is_mec ? exec_time_mec(rate, cfg) : exec_time_cloud(rate, cfg);
    data.lp.cost[v] = std::isfinite(t) ? t - t_local : kSentinelCost;
  }

  std::vector<RVec> rows;
  std::vector<double> rhs;

  // single computation mode per UT
  for (int i = 0; i < L; ++i) {
    RVec row = RVec::Zero(n);
    for (int v = 0; v < n; ++v)
      if (data.vars[v].i == i) row[v] = 1.0;
    rows.push_back(std::move(row));
    rhs.push_back(1.0);
  }

  // MEC capacity per BS, normalized by C_m
  for (int m = 0; m < M; ++m) {
    RVec row = RVec::Zero(n);
    for (int v = 0; v < n; ++v)
      if (data.vars[v].is_mec && data.vars[v].m == m) row[v] = cfg.f_M / cfg.C_m;
    rows.push_back(std::move(row));
    rhs.push_back(1.0);
  }

  // fractional-mixture power: ||w||^2 + (1 - s_i) * eps f_L^3 <= P_c.
  // Redundant rows (local already affordable) are dropped; a UT whose
  // transmit power alone exceeds the budget cannot be served at all.
  const double e = local_compute_power(cfg);
  for (int i = 0; i < L; ++i) {
    double headroom = cfg.P_c - W.w[i].squaredNorm();
    if (headroom < -kPowerSlack) {
      data.power_impossible.push_back(i);
      continue;
    }
    if (headroom >= e) continue;  // power row can never bind
    double s_req = 1.0 - (headroom + kPowerSlack) / e;
    s_req = std::min(s_req, 1.0 - 1e-6);  // keep a sliver of interior
    if (s_req <= 0.0) continue;
    RVec row = RVec::Zero(n);
    for (int v = 0; v < n; ++v)
      if (data.vars[v].i == i) row[v] = -1.0;
    rows.push_back(std::move(row));
    rhs.push_back(-s_req);
  }

  data.lp.A.resize(static_cast<int>(rows.size()), n);
  data.lp.b.resize(static_cast<int>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    data.lp.A.row(static_cast<int>(r)) = rows[r].transpose();
    data.lp.b[static_cast<int>(r)] = rhs[r];
  }
  data.lp.lo = RVec::Zero(n);
  data.lp.hi = RVec::Ones(n);
  return data;
}

RelaxedDecision relaxed_from_vector(const OffloadLpData& data, const RVec& x,
                                    const SystemConfig& cfg) {
  RelaxedDecision rd;
  rd.a = RMat::Zero(cfg.M, cfg.L);
  rd.b = RMat::Zero(cfg.M, cfg.L);
  for (int v = 0; v < static_cast<int>(data.vars.size()); ++v) {
    const auto& var = data.vars[v];
    (var.is_mec ? rd.a : rd.b)(var.m, var.i) = x[v];
  }
  return rd;
}

bool binary_decision_feasible(const OffloadDecision& dec,
                              const BeamformingSet& W,
                              const SystemConfig& cfg) {
  if (!dec.valid_single_mode()) return false;
  for (int m = 0; m < cfg.M; ++m) {
    double used = dec.a.row(m).sum() * cfg.f_M;
    if (used > cfg.C_m * (1.0 + 1e-12)) return false;
  }
  const double e = local_compute_power(cfg);
  const double local_margin = 1e-9 * std::max(1.0, cfg.P_c);
  for (int i = 0; i < cfg.L; ++i) {
    double tx = W.w[i].squaredNorm();
    if (dec.offload_sum(i) == 0) {
      // local mode keeps a strict margin so downstream solvers can restart
      if (tx + e > cfg.P_c - local_margin) return false;
    } else {
      if (tx > cfg.P_c * (1.0 + 1e-12)) return false;
    }
  }
  return true;
}

namespace {

struct ReducedLp {
  cvx::LpProblem lp;
  std::vector<int> free_vars;  // indices into the full variable list
};

RVec shifted_rhs(const OffloadLpData& data, const std::vector<int>& fixed) {
  RVec shift = RVec::Zero(data.lp.b.size());
  for (int v = 0; v < static_cast<int>(data.vars.size()); ++v)
    if (fixed[v] == 1) shift += data.lp.A.col(v);
  return data.lp.b - shift;
}

// Saturated rows with nonnegative coefficients force their remaining
// variables to zero; fixing them explicitly keeps the reduced LPs strictly
// interior. Returns false when some row is unsatisfiable.
bool presolve_zero_fixes(const OffloadLpData& data, std::vector<int>& fixed) {
  const int n = static_cast<int>(data.vars.size());
  const int rows = static_cast<int>(data.lp.A.rows());
  bool changed = true;
  while (changed) {
    changed = false;
    RVec bred = shifted_rhs(data, fixed);
    for (int r = 0; r < rows; ++r) {
      bool all_nonneg = true, any_pos = false;
      for (int v = 0; v < n; ++v) {
        if (fixed[v] >= 0) continue;
        double c = data.lp.A(r, v);
        if (c < -1e-15) {
          all_nonneg = false;
          break;
        }
        if (c > 1e-15) any_pos = true;
      }
      if (!all_nonneg) continue;
      if (bred[r] < -1e-9) return false;
      if (bred[r] <= 1e-9 && any_pos) {
        for (int v = 0; v < n; ++v)
          if (fixed[v] < 0 && data.lp.A(r, v) > 1e-15) fixed[v] = 0;
        changed = true;
      }
    }
  }
  return true;
}

ReducedLp make_reduced(const OffloadLpData& data, const std::vector<int>& fixed) {
  ReducedLp red;
  const int n = static_cast<int>(data.vars.size());
  for (int v = 0; v < n; ++v)
    if (fixed[v] < 0) red.free_vars.push_back(v);
  const int nf = static_cast<int>(red.free_vars.size());

  RVec bred = shifted_rhs(data, fixed);
  // keep only rows that still involve a free variable
  std::vector<int> live_rows;
  for (int r = 0; r < data.lp.A.rows(); ++r) {
    bool live = false;
    for (int v : red.free_vars)
      if (std::abs(data.lp.A(r, v)) > 1e-15) live = true;
    if (live) live_rows.push_back(r);
  }

  red.lp.cost.resize(nf);
  red.lp.A.resize(static_cast<int>(live_rows.size()), nf);
  red.lp.b.resize(static_cast<int>(live_rows.size()));
  for (int c = 0; c < nf; ++c) red.lp.cost[c] = data.lp.cost[red.free_vars[c]];
  for (std::size_t rr = 0; rr < live_rows.size(); ++rr) {
    for (int c = 0; c < nf; ++c)
      red.lp.A(static_cast<int>(rr), c) = data.lp.A(live_rows[rr], red.free_vars[c]);
    red.lp.b[static_cast<int>(rr)] = bred[live_rows[rr]];
  }
  red.lp.lo = RVec::Zero(nf);
  red.lp.hi = RVec::Ones(nf);
  return red;
}

bool reduced_feasible(const OffloadLpData& data, const std::vector<int>& fixed) {
  if (data.lp.A.rows() == 0) return true;
  std::vector<int> work = fixed;
  if (!presolve_zero_fixes(data, work)) return false;
  RVec bred = shifted_rhs(data, work);
  // the all-zero completion satisfies A*0 <= b iff b >= 0
  if ((bred.array() >= -1e-12).all()) return true;
  ReducedLp red = make_reduced(data, work);
  if (red.free_vars.empty()) return false;
  cvx::LpResult r = cvx::solve_lp(red.lp, 1e-8);
  return r.status != cvx::SolveStatus::Infeasible;
}

}  // namespace

RoundResult round_inflate(const RVec& relaxed, const OffloadLpData& data,
                          const BeamformingSet& W, const SystemConfig& cfg) {
  const int n = static_cast<int>(data.vars.size());
  std::vector<int> fixed(n, -1);  // -1 free, 0/1 fixed
  RVec x = relaxed;

  auto current_decision = [&]() {
    OffloadDecision dec = OffloadDecision::all_local(cfg.M, cfg.L);
    for (int v = 0; v < n; ++v) {
      int val = fixed[v] >= 0 ? fixed[v] : static_cast<int>(std::lround(x[v]));
      if (val == 1) {
        const auto& var = data.vars[v];
        (var.is_mec ? dec.a : dec.b)(var.m, var.i) = 1;
      }
    }
    return dec;
  };

  for (int pass = 0; pass < n + 1; ++pass) {
    // locate the largest fractional free variable (ties: lowest index)
    int pick = -1;
    double best = -1.0;
    bool integral = true;
    for (int v = 0; v < n; ++v) {
      if (fixed[v] >= 0) continue;
      double frac_dist = std::abs(x[v] - std::round(x[v]));
      if (frac_dist > kIntegralTol) {
        integral = false;
        if (x[v] > best + 1e-15) {
          best = x[v];
          pick = v;
        }
      }
    }
    if (integral) {
      OffloadDecision dec = current_decision();
      if (binary_decision_feasible(dec, W, cfg)) return {dec, false};
      break;
    }

    fixed[pick] = 1;
    if (!reduced_feasible(data, fixed)) fixed[pick] = 0;
    if (!presolve_zero_fixes(data, fixed)) break;

    ReducedLp red = make_reduced(data, fixed);
    if (red.free_vars.empty()) {
      OffloadDecision dec = current_decision();
      if (binary_decision_feasible(dec, W, cfg)) return {dec, false};
      break;
    }
    cvx::LpResult r = cvx::solve_lp(red.lp, 1e-9);
    if (r.status == cvx::SolveStatus::Infeasible) break;
    for (int c = 0; c < static_cast<int>(red.free_vars.size()); ++c)
      x[red.free_vars[c]] = r.x[c];
  }

  return {OffloadDecision::all_local(cfg.M, cfg.L), true};
}

OffloadResult optimize_offloading(const BeamformingSet& W, const Scenario& s,
                                  const SystemConfig& cfg, bool allow_cloud) {
  OffloadLpData data = build_offloading_lp(W, s, cfg, allow_cloud);
  OffloadResult out;

  if (!data.power_impossible.empty()) {
    out.dec = OffloadDecision::all_local(cfg.M, cfg.L);
    out.objective = total_time(W, out.dec, s, cfg).first;
    out.lp_objective = out.objective;
    out.fell_back_all_local = true;
    out.power_feasible = false;
    return out;
  }

  cvx::LpResult lp = cvx::solve_lp(data.lp, 1e-9);
  if (lp.status == cvx::SolveStatus::Infeasible) {
    out.dec = OffloadDecision::all_local(cfg.M, cfg.L);
    out.objective = total_time(W, out.dec, s, cfg).first;
    out.lp_objective = out.objective;
    out.fell_back_all_local = true;
    out.power_feasible = binary_decision_feasible(out.dec, W, cfg);
    return out;
  }

  RoundResult rr = round_inflate(lp.x, data, W, cfg);
  out.dec = rr.dec;
  out.fell_back_all_local = rr.fell_back_all_local;
  out.lp_objective = data.base_cost + lp.objective;
  out.objective = total_time(W, out.dec, s, cfg).first;
  if (rr.fell_back_all_local)
    out.power_feasible = binary_decision_feasible(out.dec, W, cfg);

  // rounding never beats staying local when local is an option
  if (!rr.fell_back_all_local && out.objective > data.base_cost) {
    OffloadDecision local = OffloadDecision::all_local(cfg.M, cfg.L);
    if (binary_decision_feasible(local, W, cfg)) {
      out.dec = std::move(local);
      out.objective = data.base_cost;
    }
  }
  return out;
}

}  // namespace iscc
