#include "iscc/baselines.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace iscc {

Scheme scheme_from_string(const std::string& name) {
  if (name == "thco-bo") return Scheme::ThcoBo;
  if (name == "ttco-bo") return Scheme::TtcoBo;
  if (name == "thco-mrc") return Scheme::ThcoMrc;
  if (name == "thco-mrs") return Scheme::ThcoMrs;
  if (name == "local") return Scheme::Local;
  throw ConfigError("unknown scheme '" + name + "'");
}

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::ThcoBo: return "thco-bo";
    case Scheme::TtcoBo: return "ttco-bo";
    case Scheme::ThcoMrc: return "thco-mrc";
    case Scheme::ThcoMrs: return "thco-mrs";
    case Scheme::Local: return "local";
  }
  return "?";
}

int strongest_bs(const Scenario& s, int i) {
  int best = 0;
  double best_norm = -1.0;
  for (int m = 0; m < s.num_bs(); ++m) {
    double n = s.H[m][i].norm();
    if (n > best_norm) {
      best_norm = n;
      best = m;
    }
  }
  return best;
}

CVec mrc_beamformer(const Scenario& s, int i, int m, const SystemConfig& cfg) {
  Eigen::JacobiSVD<CMat> svd(s.H[m][i], Eigen::ComputeThinU);
  CVec u = svd.matrixU().col(0);
  return std::sqrt(cfg.P_c) * u / u.norm();
}

CVec mrs_beamformer(const Scenario& s, int i, const SystemConfig& cfg) {
  CVec a = steering_vector(s.theta[i], cfg.K, cfg.antenna_spacing_over_wavelength);
  return std::sqrt(cfg.P_c) * a / a.norm();
}

namespace {

SchemeResult fixed_beamformer_scheme(Scheme scheme, const Scenario& s,
                                     const SystemConfig& cfg) {
  SchemeResult res;
  res.scheme = scheme;
  res.W.w.resize(cfg.L);
  for (int i = 0; i < cfg.L; ++i) {
    if (scheme == Scheme::ThcoMrc)
      res.W.w[i] = mrc_beamformer(s, i, strongest_bs(s, i), cfg);
    else
      res.W.w[i] = mrs_beamformer(s, i, cfg);
  }
  OffloadResult off = optimize_offloading(res.W, s, cfg, true);
  res.dec = off.dec;
  auto [obj, rep] = evaluate(res.W, res.dec, s, cfg);
  res.objective = obj;
  res.report = rep;
  res.feasible = rep.feasible;
  return res;
}

SchemeResult all_local_scheme(const Scenario& s, const SystemConfig& cfg) {
  SchemeResult res;
  res.scheme = Scheme::Local;
  res.dec = OffloadDecision::all_local(cfg.M, cfg.L);
  // sensing-aligned beamformers within the local power cap
  double cap = cfg.P_c - cfg.epsilon * cfg.f_L * cfg.f_L * cfg.f_L;
  res.W.w.resize(cfg.L);
  for (int i = 0; i < cfg.L; ++i) {
    CVec a = steering_vector(s.theta[i], cfg.K, cfg.antenna_spacing_over_wavelength);
    res.W.w[i] = std::sqrt(std::max(cap, 0.0)) * a / a.norm();
  }
  auto [obj, rep] = evaluate(res.W, res.dec, s, cfg);
  res.objective = obj;
  res.report = rep;
  res.feasible = rep.feasible;
  return res;
}

SchemeResult joint_scheme(Scheme scheme, const Scenario& s,
                          const SystemConfig& cfg, const DriverOptions& opts) {
  SchemeResult res;
  res.scheme = scheme;
  DriverOptions o = opts;
  o.allow_cloud = scheme == Scheme::ThcoBo;
  try {
    Solution sol = solve_joint(s, cfg, o);
    res.W = std::move(sol.W);
    res.dec = std::move(sol.dec);
    res.outer_iters = sol.outer_iters;
    res.trace = std::move(sol.trace);
    auto [obj, rep] = evaluate(res.W, res.dec, s, cfg);
    res.objective = obj;
    res.report = rep;
    res.feasible = rep.feasible;
  } catch (const GammaInfeasibleError&) {
    res.objective = std::numeric_limits<double>::quiet_NaN();
    res.feasible = false;
  }
  return res;
}

}  // namespace

SchemeResult two_tier_scheme(const Scenario& s, const SystemConfig& cfg,
                             const DriverOptions& opts) {
  return joint_scheme(Scheme::TtcoBo, s, cfg, opts);
}

SchemeResult run_scheme(Scheme scheme, const Scenario& s,
                        const SystemConfig& cfg, const DriverOptions& opts) {
  switch (scheme) {
    case Scheme::ThcoBo:
    case Scheme::TtcoBo:
      return joint_scheme(scheme, s, cfg, opts);
    case Scheme::ThcoMrc:
    case Scheme::ThcoMrs:
      return fixed_beamformer_scheme(scheme, s, cfg);
    case Scheme::Local:
      return all_local_scheme(s, cfg);
  }
  throw ConfigError("unhandled scheme");
}

}  // namespace iscc
