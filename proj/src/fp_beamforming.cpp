#include "iscc/fp_beamforming.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <sstream>

namespace iscc {

namespace {

// Real stacking [Re w; Im w] and the matching embeddings. A Hermitian form
// w^H M w becomes x^T embed(M) x; a linear form 2Re{v^H w} becomes
// (2 embed_vec(v))^T x.
RVec embed_vec(const CVec& v) {
  RVec x(2 * v.size());
  x.head(v.size()) = v.real();
  x.tail(v.size()) = v.imag();
  return x;
}

CVec unembed_vec(const RVec& x) {
  const auto k = x.size() / 2;
  CVec v(k);
  v.real() = x.head(k);
  v.imag() = x.tail(k);
  return v;
}

RMat embed_hermitian(const CMat& M) {
  const auto k = M.rows();
  RMat E(2 * k, 2 * k);
  E.topLeftCorner(k, k) = M.real();
  E.topRightCorner(k, k) = -M.imag();
  E.bottomLeftCorner(k, k) = M.imag();
  E.bottomRightCorner(k, k) = M.real();
  return E;
}

struct VarLayout {
  int L = 0, K = 0, num_pairs = 0;
  int w_offset(int i) const { return 2 * K * i; }
  int c_offset(int j) const { return 2 * K * L + j; }
  int n() const { return 2 * K * L + num_pairs; }
};

double local_power_cap(const SystemConfig& cfg) {
  return cfg.P_c - cfg.epsilon * cfg.f_L * cfg.f_L * cfg.f_L;
}

}  // namespace

OffloadPairSet OffloadPairSet::from_decision(const OffloadDecision& dec) {
  OffloadPairSet A;
  for (int i = 0; i < dec.num_ut(); ++i)
    for (int m = 0; m < dec.num_bs(); ++m)
      if (dec.a(m, i) == 1 || dec.b(m, i) == 1) A.pairs.push_back({m, i});
  return A;
}

void OffloadPairSet::validate(int M, int L) const {
  std::vector<bool> seen(L, false);
  for (const auto& p : pairs) {
    if (p.m < 0 || p.m >= M || p.i < 0 || p.i >= L)
      throw std::invalid_argument("offload pair index out of range");
    if (seen[p.i])
      throw std::invalid_argument("UT appears in more than one offload pair");
    seen[p.i] = true;
  }
}

bool OffloadPairSet::contains_ut(int i) const {
  for (const auto& p : pairs)
    if (p.i == i) return true;
  return false;
}

CVec update_aux_z(const BeamformingSet& W, const Scenario& s,
                  const OffloadPair& pair, const SystemConfig& cfg) {
  CMat cov = interference_covariance(W, s, pair.m, pair.i, cfg);
  CVec rhs = s.H[pair.m][pair.i].adjoint() * W.w[pair.i];
  Eigen::LLT<CMat> llt(cov);
  CVec z = llt.solve(rhs);
  // one step of iterative refinement; the covariance can be ill-conditioned
  // when interference dwarfs the noise floor
  z += llt.solve(rhs - cov * z);
  return z;
}

double transformed_rate(const BeamformingSet& W, const CVec& z,
                        const OffloadPair& pair, const Scenario& s,
                        const SystemConfig& cfg) {
  CMat cov = interference_covariance(W, s, pair.m, pair.i, cfg);
  double arg = 1.0 + 2.0 * std::real(z.dot(s.H[pair.m][pair.i].adjoint() * W.w[pair.i])) -
               std::real(z.dot(cov * z));
  if (!(arg > 0.0))
    throw std::domain_error("transformed_rate: non-positive log argument");
  return cfg.B * std::log2(arg);
}

SensingLinearization linearize_sensing_constraint(const CVec& w_tilde_i,
                                                  const Scenario& s, int i,
                                                  const SystemConfig& cfg) {
  CVec a = steering_vector(s.theta[i], cfg.K, cfg.antenna_spacing_over_wavelength);
  CMat A = a.conjugate() * a.adjoint();
  CMat Q = A.adjoint() * A;
  SensingLinearization lin;
  lin.lin = Q * w_tilde_i;
  lin.tangent = std::real(w_tilde_i.dot(Q * w_tilde_i));
  lin.gamma_over_alpha2 = cfg.Gamma_th / (s.alpha[i] * s.alpha[i]);
  lin.noise = cfg.noise_power_radar();
  return lin;
}

double sensing_minorant(const SensingLinearization& lin, const CVec& w) {
  return 2.0 * std::real(lin.lin.dot(w)) - lin.tangent;
}

double rate_upper_bound(const Scenario& s, int m, int i,
                        const SystemConfig& cfg) {
  Eigen::JacobiSVD<CMat> svd(s.H[m][i]);
  double smax = svd.singularValues()(0);
  return cfg.B * std::log2(1.0 + cfg.P_c * smax * smax / cfg.noise_power_comm());
}

SubproblemResult solve_rate_subproblem(const Scenario& s,
                                       const OffloadPairSet& A,
                                       const AuxState& aux,
                                       const SystemConfig& cfg,
                                       const cvx::SolveOptions& opts) {
  A.validate(cfg.M, cfg.L);
  SubproblemResult out;
  if (A.empty()) {
    out.W = aux.w_tilde;
    out.report.status = cvx::SolveStatus::Optimal;
    out.report.objective = 0.0;
    return out;
  }

  const VarLayout lay{cfg.L, cfg.K, static_cast<int>(A.pairs.size())};
  const double D = cfg.task_bits();

  cvx::ConvexProgram p;
  p.n = lay.n();
  p.cost = RVec::Zero(p.n);

  std::vector<double> c_scale(A.pairs.size());
  for (std::size_t j = 0; j < A.pairs.size(); ++j) {
    c_scale[j] = D / rate_upper_bound(s, A.pairs[j].m, A.pairs[j].i, cfg);
    p.cost[lay.c_offset(static_cast<int>(j))] = c_scale[j];
  }

  // surrogate-rate constraints, one per offloading pair
  for (std::size_t j = 0; j < A.pairs.size(); ++j) {
    const auto& [m, i] = A.pairs[j];
    const CVec& z = aux.z[j];
    cvx::LogRateConstraint rc;
    rc.q = RVec::Zero(p.n);
    rc.q.segment(lay.w_offset(i), 2 * cfg.K) = 2.0 * embed_vec(s.H[m][i] * z);
    for (int l = 0; l < cfg.L; ++l) {
      if (l == i) continue;
      CVec u = s.H[m][l] * z;
      rc.P.push_back({lay.w_offset(l), embed_hermitian(u * u.adjoint())});
    }
    rc.base = 1.0 - cfg.noise_power_comm() * z.squaredNorm();
    rc.rate_demand = D / cfg.B;
    rc.c_index = lay.c_offset(static_cast<int>(j));
    rc.c_scale = c_scale[j];
    rc.tag = "rate[" + std::to_string(m) + "," + std::to_string(i) + "]";
    p.rate.push_back(std::move(rc));

    cvx::QuadraticConstraint floor;
    floor.q = RVec::Zero(p.n);
    floor.q[lay.c_offset(static_cast<int>(j))] = -1.0;
    floor.r = 1.0;
    floor.tag = "c_floor[" + std::to_string(i) + "]";
    p.quad.push_back(std::move(floor));
  }

  // power budgets; local UTs reserve the compute power
  for (int i = 0; i < cfg.L; ++i) {
    double cap = A.contains_ut(i) ? cfg.P_c : local_power_cap(cfg);
    if (!(cap > 0))
      throw SubproblemInfeasibleError(
          "power budget does not cover local compute power");
    cvx::QuadraticConstraint pc;
    pc.P.push_back({lay.w_offset(i), RMat::Identity(2 * cfg.K, 2 * cfg.K)});
    pc.q = RVec::Zero(p.n);
    pc.r = -cap;
    pc.tag = "power[" + std::to_string(i) + "]";
    p.quad.push_back(std::move(pc));
  }

  // linearized sensing constraints, all UTs
  for (int i = 0; i < cfg.L; ++i) {
    SensingLinearization lin =
        linearize_sensing_constraint(aux.w_tilde.w[i], s, i, cfg);
    cvx::QuadraticConstraint sc;
    double scale = 1e-30;  // normalize so row data is O(1)
    for (int l = 0; l < cfg.L; ++l) {
      if (l == i) continue;
      RMat blk = lin.gamma_over_alpha2 *
                 embed_hermitian(s.Hhat[l][i] * s.Hhat[l][i].adjoint());
      scale = std::max(scale, blk.cwiseAbs().maxCoeff());
      sc.P.push_back({lay.w_offset(l), std::move(blk)});
    }
    sc.q = RVec::Zero(p.n);
    sc.q.segment(lay.w_offset(i), 2 * cfg.K) = -2.0 * embed_vec(lin.lin);
    sc.r = lin.gamma_over_alpha2 * lin.noise + lin.tangent;
    scale = std::max({scale, sc.q.cwiseAbs().maxCoeff(), std::abs(sc.r)});
    for (auto& b : sc.P) b.m /= scale;
    sc.q /= scale;
    sc.r /= scale;
    sc.tag = "sensing[" + std::to_string(i) + "]";
    p.quad.push_back(std::move(sc));
  }

  RVec start(p.n);
  for (int i = 0; i < cfg.L; ++i)
    start.segment(lay.w_offset(i), 2 * cfg.K) = embed_vec(aux.w_tilde.w[i]);
  for (std::size_t j = 0; j < A.pairs.size(); ++j)
    start[lay.c_offset(static_cast<int>(j))] = aux.c[j] / c_scale[j];

  auto [x, rep] = cvx::solve_convex(p, start, opts);
  if (rep.status == cvx::SolveStatus::Infeasible) {
    std::ostringstream msg;
    msg << "subproblem start infeasible:";
    for (const auto& t : rep.infeasible_tags) msg << " " << t;
    throw SubproblemInfeasibleError(msg.str());
  }

  out.W.w.resize(cfg.L);
  for (int i = 0; i < cfg.L; ++i)
    out.W.w[i] = unembed_vec(x.segment(lay.w_offset(i), 2 * cfg.K));
  out.c.resize(A.pairs.size());
  for (std::size_t j = 0; j < A.pairs.size(); ++j)
    out.c[j] = c_scale[j] * x[lay.c_offset(static_cast<int>(j))];
  out.report = rep;
  out.report.objective = 0.0;
  for (double cj : out.c) out.report.objective += cj;
  return out;
}

InnerResult inner_fp_loop(const Scenario& s, const OffloadPairSet& A,
                          const BeamformingSet& W_init,
                          const SystemConfig& cfg, const InnerOptions& opts) {
  A.validate(cfg.M, cfg.L);
  InnerResult res;
  res.W = W_init;
  if (A.empty()) {
    res.objective_trace.push_back(0.0);
    return res;
  }

  const double D = cfg.task_bits();
  AuxState aux;
  aux.w_tilde = W_init;
  aux.z.resize(A.pairs.size());
  aux.c.resize(A.pairs.size());
  for (std::size_t j = 0; j < A.pairs.size(); ++j) {
    aux.z[j] = update_aux_z(W_init, s, A.pairs[j], cfg);
    double r = transformed_rate(W_init, aux.z[j], A.pairs[j], s, cfg);
    if (!(r > 0))
      throw SubproblemInfeasibleError(
          "initial beamformer gives zero uplink rate for pair");
    double floor = D / rate_upper_bound(s, A.pairs[j].m, A.pairs[j].i, cfg);
    aux.c[j] = std::max(D / r * (1.0 + 1e-9), floor * (1.0 + 1e-12));
  }

  for (int it = 0; it < opts.max_iter; ++it) {
    SubproblemResult sub;
    for (int attempt = 0;; ++attempt) {
      try {
        sub = solve_rate_subproblem(s, A, aux, cfg, opts.solver);
        break;
      } catch (const SubproblemInfeasibleError& e) {
        // a hairline-active latency auxiliary is recoverable by nudging it
        // back into the interior; anything else is a real infeasibility
        std::string what = e.what();
        bool c_fixable = what.find("rate[") != std::string::npos ||
                         what.find("c_floor[") != std::string::npos;
        if (!c_fixable || attempt >= 3) throw;
        for (auto& cj : aux.c) cj *= 1.0 + 1e-6;
      }
    }
    double obj = 0.0;
    for (double cj : sub.c) obj += cj;
    res.objective_trace.push_back(obj);
    res.W = sub.W;
    res.c = sub.c;
    res.iterations = it + 1;

    aux.w_tilde = sub.W;
    for (std::size_t j = 0; j < A.pairs.size(); ++j) {
      aux.z[j] = update_aux_z(sub.W, s, A.pairs[j], cfg);
      double r = transformed_rate(sub.W, aux.z[j], A.pairs[j], s, cfg);
      aux.c[j] = std::max(sub.c[j], D / r * (1.0 + 1e-9));
    }

    if (it >= 1) {
      double prev = res.objective_trace[it - 1];
      if (std::abs(obj - prev) < opts.tol * std::max(1.0, std::abs(prev))) break;
    }
  }
  return res;
}

BeamformingSet scale_to_feasible(const Scenario& s, const SystemConfig& cfg,
                                 const std::vector<bool>& is_local,
                                 const std::vector<CVec>& directions) {
  const double sigma_r2 = cfg.noise_power_radar();
  // interior margin for the power-control equilibrium; the equilibrium SINR
  // sits at margin * Gamma_th, strictly inside the constraint
  const double margin = 1.02;
  const double strict = 1e-7;  // joint-check strictness, relative

  BeamformingSet W;
  W.w.resize(cfg.L);
  std::vector<CVec> dir(cfg.L);
  std::vector<double> cap(cfg.L), num_gain(cfg.L), p(cfg.L);
  for (int i = 0; i < cfg.L; ++i) {
    dir[i] = directions[i] / directions[i].norm();
    cap[i] = (is_local[i] ? local_power_cap(cfg) : cfg.P_c) * (1.0 - 1e-6);
    if (!(cap[i] > 0))
      throw GammaInfeasibleError("power budget does not cover local compute power");
    // echo numerator per unit transmit power along this direction
    num_gain[i] =
        s.alpha[i] * s.alpha[i] * sensing_numerator_quad(s, i, dir[i], cfg);
    if (!(num_gain[i] > 0))
      throw GammaInfeasibleError("beamforming direction has no echo gain");
    p[i] = cfg.Gamma_th * sigma_r2 / num_gain[i] * margin;
    if (p[i] > cap[i]) {
      std::ostringstream msg;
      msg << "sensing threshold infeasible: UT " << i << " needs power "
          << p[i] << " W > budget " << cap[i] << " W even without interference";
      throw GammaInfeasibleError(msg.str());
    }
  }

  auto joint_ok = [&](const BeamformingSet& cand) {
    for (int i = 0; i < cfg.L; ++i)
      if (sensing_sinr(cand, s, i, cfg) < cfg.Gamma_th * (1.0 + strict))
        return false;
    return true;
  };

  // Full power first: the alternation needs starting rates that reflect the
  // real uplink potential, or the first offloading step sees no reason to
  // leave local execution.
  for (int i = 0; i < cfg.L; ++i) W.w[i] = std::sqrt(cap[i]) * dir[i];
  if (joint_ok(W)) return W;

  // Interference-limited fallback: cap-clamped power-control iteration
  // toward the minimal joint power, seeded at the zero-interference bound.
  for (int iter = 0; iter < 300; ++iter) {
    for (int i = 0; i < cfg.L; ++i) W.w[i] = std::sqrt(p[i]) * dir[i];
    double max_change = 0.0;
    for (int i = 0; i < cfg.L; ++i) {
      double denom = sensing_denominator(W, s, i, cfg);
      double p_new =
          std::min(cfg.Gamma_th * denom / num_gain[i] * margin, cap[i]);
      max_change = std::max(max_change,
                            std::abs(p_new - p[i]) / std::max(p_new, 1e-300));
      p[i] = p_new;
    }
    if (max_change < 1e-10) break;
  }
  // Scale the equilibrium up to the budget: a common factor preserves the
  // interference balance, every SINR grows toward its interference-limited
  // ceiling, and the uplink rates reflect the actual power available.
  double psi = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cfg.L; ++i) psi = std::min(psi, cap[i] / p[i]);
  psi = std::max(psi, 1.0);
  for (int i = 0; i < cfg.L; ++i)
    W.w[i] = std::sqrt(std::min(psi * p[i], cap[i])) * dir[i];
  if (joint_ok(W)) return W;

  double worst = std::numeric_limits<double>::infinity();
  int worst_i = 0;
  for (int i = 0; i < cfg.L; ++i) {
    double v = sensing_sinr(W, s, i, cfg) / cfg.Gamma_th;
    if (v < worst) {
      worst = v;
      worst_i = i;
    }
  }
  std::ostringstream msg;
  msg << "sensing threshold infeasible for this scenario: UT " << worst_i
      << " reaches only " << worst
      << " of the required SINR along the starting directions";
  throw GammaInfeasibleError(msg.str());
}

BeamformingSet initial_beamformers(const Scenario& s, const SystemConfig& cfg,
                                   const std::vector<bool>& is_local) {
  std::vector<CVec> dirs(cfg.L);
  for (int i = 0; i < cfg.L; ++i)
    dirs[i] =
        steering_vector(s.theta[i], cfg.K, cfg.antenna_spacing_over_wavelength);
  return scale_to_feasible(s, cfg, is_local, dirs);
}

}  // namespace iscc
