#include "iscc/driver.hpp"

#include <Eigen/SVD>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace iscc {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<bool> local_mask(const OffloadDecision& dec) {
  std::vector<bool> mask(dec.num_ut());
  for (int i = 0; i < dec.num_ut(); ++i) mask[i] = dec.offload_sum(i) == 0;
  return mask;
}

// Strict interior check for the beamformer set under the caps implied by
// the decision; the inner loop restarts from this point.
bool strictly_feasible_for(const BeamformingSet& W, const OffloadDecision& dec,
                           const Scenario& s, const SystemConfig& cfg) {
  const double e = cfg.epsilon * cfg.f_L * cfg.f_L * cfg.f_L;
  for (int i = 0; i < cfg.L; ++i) {
    double cap = dec.offload_sum(i) == 0 ? cfg.P_c - e : cfg.P_c;
    if (!(W.w[i].squaredNorm() < cap)) return false;
    if (!(sensing_sinr(W, s, i, cfg) > cfg.Gamma_th)) return false;
  }
  return true;
}

}  // namespace

namespace {

// Candidate starting directions: sensing-aligned steering vectors, their
// interference-whitened variant (own echo gain over the radar interference
// the UT causes to its peers), and the dominant channel directions toward
// each UT's strongest BS. The candidate whose first offloading pass yields
// the lower objective wins; scenarios where only one meets the SINR
// threshold use that one.
BeamformingSet pick_start(const Scenario& s, const SystemConfig& cfg,
                          const std::vector<bool>& is_local, bool allow_cloud) {
  std::vector<std::vector<CVec>> candidates;
  {
    std::vector<CVec> mrs(cfg.L);
    for (int i = 0; i < cfg.L; ++i)
      mrs[i] = steering_vector(s.theta[i], cfg.K,
                               cfg.antenna_spacing_over_wavelength);
    candidates.push_back(std::move(mrs));
  }
  {
    std::vector<CVec> whitened(cfg.L);
    for (int i = 0; i < cfg.L; ++i) {
      CMat R = (cfg.noise_power_radar() / cfg.P_c) *
               CMat::Identity(cfg.K, cfg.K);
      for (int l = 0; l < cfg.L; ++l) {
        if (l == i) continue;
        R.noalias() += s.Hhat[i][l] * s.Hhat[i][l].adjoint();
      }
      CVec a = steering_vector(s.theta[i], cfg.K,
                               cfg.antenna_spacing_over_wavelength);
      whitened[i] = R.llt().solve(a);
    }
    candidates.push_back(std::move(whitened));
  }
  {
    std::vector<CVec> mrc(cfg.L);
    for (int i = 0; i < cfg.L; ++i) {
      int best_m = 0;
      double best = -1.0;
      for (int m = 0; m < cfg.M; ++m) {
        double n = s.H[m][i].norm();
        if (n > best) {
          best = n;
          best_m = m;
        }
      }
      Eigen::JacobiSVD<CMat> svd(s.H[best_m][i], Eigen::ComputeThinU);
      mrc[i] = svd.matrixU().col(0);
    }
    candidates.push_back(std::move(mrc));
  }

  bool have = false;
  BeamformingSet best_W;
  double best_obj = std::numeric_limits<double>::infinity();
  std::string first_error;
  for (const auto& dirs : candidates) {
    try {
      BeamformingSet W = scale_to_feasible(s, cfg, is_local, dirs);
      double obj = optimize_offloading(W, s, cfg, allow_cloud).objective;
      if (!have || obj < best_obj) {
        have = true;
        best_obj = obj;
        best_W = std::move(W);
      }
    } catch (const GammaInfeasibleError& e) {
      if (first_error.empty()) first_error = e.what();
    }
  }
  if (!have) throw GammaInfeasibleError(first_error);
  return best_W;
}

}  // namespace

Solution solve_joint(const Scenario& s, const SystemConfig& cfg,
                     const DriverOptions& opts) {
  cfg.validate();
  Solution sol;
  sol.dec = OffloadDecision::all_local(cfg.M, cfg.L);
  sol.W = pick_start(s, cfg, local_mask(sol.dec), opts.allow_cloud);

  double obj_prev = total_time(sol.W, sol.dec, s, cfg).first;
  for (int iter = 1; iter <= opts.outer_max; ++iter) {
    sol.outer_iters = iter;

    auto t0 = Clock::now();
    OffloadPairSet A = OffloadPairSet::from_decision(sol.dec);
    InnerResult inner = inner_fp_loop(s, A, sol.W, cfg, opts.inner);
    sol.inner_traces.push_back(inner.objective_trace);
    sol.W = inner.W;
    double obj_bf = total_time(sol.W, sol.dec, s, cfg).first;
    sol.trace.rows.push_back({iter, 'b', obj_bf, ms_since(t0)});

    t0 = Clock::now();
    OffloadResult off = optimize_offloading(sol.W, s, cfg, opts.allow_cloud);
    // keep the incoming decision unless the new one is at least as good and
    // leaves the beamformers strictly inside the new caps
    if (off.objective <= obj_bf &&
        strictly_feasible_for(sol.W, off.dec, s, cfg)) {
      sol.dec = off.dec;
    }
    double obj_off = total_time(sol.W, sol.dec, s, cfg).first;
    sol.trace.rows.push_back({iter, 'o', obj_off, ms_since(t0)});

    double change = std::abs(obj_off - obj_prev);
    obj_prev = obj_off;
    if (change < opts.outer_tol * std::max(1.0, std::abs(obj_off))) break;
  }

  auto [obj, breakdown] = total_time(sol.W, sol.dec, s, cfg);
  sol.objective = obj;
  sol.breakdown = std::move(breakdown);
  return sol;
}

std::pair<double, FeasibilityReport> evaluate(const BeamformingSet& W,
                                              const OffloadDecision& dec,
                                              const Scenario& s,
                                              const SystemConfig& cfg) {
  FeasibilityReport rep;
  rep.single_mode_ok = dec.valid_single_mode();

  rep.sinr_margin = std::numeric_limits<double>::infinity();
  rep.power_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cfg.L; ++i) {
    rep.sinr_margin = std::min(
        rep.sinr_margin, sensing_sinr(W, s, i, cfg) / cfg.Gamma_th - 1.0);
    rep.power_margin = std::min(
        rep.power_margin, cfg.P_c - power_consumption(W, dec, i, cfg));
  }
  rep.capacity_margin = std::numeric_limits<double>::infinity();
  for (int m = 0; m < cfg.M; ++m) {
    double used = dec.a.row(m).sum() * cfg.f_M;
    rep.capacity_margin = std::min(rep.capacity_margin, 1.0 - used / cfg.C_m);
  }

  rep.feasible = rep.single_mode_ok && rep.sinr_margin >= -1e-6 &&
                 rep.power_margin >= -1e-8 && rep.capacity_margin >= -1e-12;

  double obj = rep.single_mode_ok ? total_time(W, dec, s, cfg).first
                                  : std::numeric_limits<double>::quiet_NaN();
  return {obj, rep};
}

std::string trace_to_csv(const SolutionTrace& trace) {
  std::ostringstream out;
  out << "iter,phase,objective_s,elapsed_ms\n";
  char buf[128];
  for (const auto& r : trace.rows) {
    std::snprintf(buf, sizeof(buf), "%d,%s,%.12g,%.3f\n", r.iter,
                  r.phase == 'b' ? "beamforming" : "offloading", r.objective,
                  r.elapsed_ms);
    out << buf;
  }
  return out.str();
}

}  // namespace iscc
