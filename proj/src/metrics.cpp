#include "iscc/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace iscc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_shapes(const BeamformingSet& W, const Scenario& s,
                  const SystemConfig& cfg) {
  if (W.size() != s.num_ut())
    throw std::invalid_argument("beamforming set size does not match scenario");
  for (const auto& w : W.w)
    if (w.size() != s.ut_antennas())
      throw std::invalid_argument("beamformer length does not match UT antennas");
  if (s.num_bs() != cfg.M || s.num_ut() != cfg.L ||
      s.ut_antennas() != cfg.K || s.bs_antennas() != cfg.N)
    throw std::invalid_argument("scenario dimensions do not match config");
}

}  // namespace

bool OffloadDecision::valid_single_mode() const {
  for (int i = 0; i < num_ut(); ++i) {
    int sum = 0;
    for (int m = 0; m < num_bs(); ++m) {
      int am = a(m, i), bm = b(m, i);
      if ((am != 0 && am != 1) || (bm != 0 && bm != 1)) return false;
      sum += am + bm;
    }
    if (sum > 1) return false;
  }
  return true;
}

std::pair<bool, int> OffloadDecision::offload_target(int i) const {
  for (int m = 0; m < num_bs(); ++m) {
    if (a(m, i) == 1) return {true, m};
    if (b(m, i) == 1) return {false, m};
  }
  return {false, -1};
}

CMat interference_covariance(const BeamformingSet& W, const Scenario& s, int m,
                             int i, const SystemConfig& cfg) {
  const int N = s.bs_antennas();
  CMat cov = cfg.noise_power_comm() * CMat::Identity(N, N);
  for (int l = 0; l < s.num_ut(); ++l) {
    if (l == i) continue;
    CVec g = s.H[m][l].adjoint() * W.w[l];  // N x 1
    cov.noalias() += g * g.adjoint();
  }
  return cov;
}

namespace {

// log2 det of a Hermitian positive-definite matrix via Cholesky
double log2_det_hpd(const CMat& m) {
  Eigen::LLT<CMat> llt(m);
  double acc = 0.0;
  auto L = llt.matrixLLT();
  for (Eigen::Index k = 0; k < m.rows(); ++k)
    acc += std::log2(std::real(L(k, k)));
  return 2.0 * acc;
}

}  // namespace

double uplink_rate(const BeamformingSet& W, const Scenario& s, int m, int i,
                   const SystemConfig& cfg) {
  check_shapes(W, s, cfg);
  CMat cov = interference_covariance(W, s, m, i, cfg);
  CVec g = s.H[m][i].adjoint() * W.w[i];
  // det(I + g g^H cov^-1) = det(cov + g g^H) / det(cov); the determinant
  // ratio is evaluated in log space, which stays accurate at high SNR
  CMat bumped = cov + g * g.adjoint();
  double val = log2_det_hpd(bumped) - log2_det_hpd(cov);
  return cfg.B * std::max(val, 0.0);
}

double uplink_rate_quad(const BeamformingSet& W, const Scenario& s, int m,
                        int i, const SystemConfig& cfg) {
  check_shapes(W, s, cfg);
  CMat cov = interference_covariance(W, s, m, i, cfg);
  CVec g = s.H[m][i].adjoint() * W.w[i];
  double snr = std::real(g.dot(cov.llt().solve(g)));  // g^H cov^-1 g
  return cfg.B * std::log1p(std::max(snr, 0.0)) / std::log(2.0);
}

double sensing_numerator_quad(const Scenario& s, int i, const CVec& w,
                              const SystemConfig& cfg) {
  CVec a = steering_vector(s.theta[i], cfg.K, cfg.antenna_spacing_over_wavelength);
  CMat A = a.conjugate() * a.adjoint();  // K x K
  CVec Aw = A * w;
  return Aw.squaredNorm();  // tr(A w w^H A^H)
}

double sensing_denominator(const BeamformingSet& W, const Scenario& s, int i,
                           const SystemConfig& cfg) {
  double interf = 0.0;
  for (int l = 0; l < s.num_ut(); ++l) {
    if (l == i) continue;
    interf += (s.Hhat[l][i].adjoint() * W.w[l]).squaredNorm();
  }
  return interf + cfg.noise_power_radar();
}

double sensing_sinr(const BeamformingSet& W, const Scenario& s, int i,
                    const SystemConfig& cfg) {
  check_shapes(W, s, cfg);
  double num = s.alpha[i] * s.alpha[i] * sensing_numerator_quad(s, i, W.w[i], cfg);
  return num / sensing_denominator(W, s, i, cfg);
}

double exec_time_local(const SystemConfig& cfg) {
  return cfg.beta * cfg.task_bits() / cfg.f_L;
}

double exec_time_mec(double rate_bps, const SystemConfig& cfg) {
  double d = cfg.task_bits();
  if (!(rate_bps > 0)) return kInf;
  return cfg.beta * d / cfg.f_M + d / rate_bps;
}

double exec_time_cloud(double rate_bps, const SystemConfig& cfg) {
  double d = cfg.task_bits();
  if (!(rate_bps > 0)) return kInf;
  return cfg.beta * d / cfg.f_C + d / rate_bps + d / cfg.r_c;
}

double power_consumption(const BeamformingSet& W, const OffloadDecision& dec,
                         int i, const SystemConfig& cfg) {
  double tx = W.w[i].squaredNorm();
  bool local = dec.offload_sum(i) == 0;
  return local ? tx + cfg.epsilon * cfg.f_L * cfg.f_L * cfg.f_L : tx;
}

std::pair<double, std::vector<LatencyBreakdown>> total_time(
    const BeamformingSet& W, const OffloadDecision& dec, const Scenario& s,
    const SystemConfig& cfg) {
  check_shapes(W, s, cfg);
  if (dec.num_bs() != cfg.M || dec.num_ut() != cfg.L)
    throw std::invalid_argument("decision dimensions do not match config");
  if (!dec.valid_single_mode())
    throw std::invalid_argument("offload decision violates the single-mode constraint");

  std::vector<LatencyBreakdown> per_ut(cfg.L);
  double sum = 0.0;
  for (int i = 0; i < cfg.L; ++i) {
    LatencyBreakdown& lb = per_ut[i];
    lb.t_local = exec_time_local(cfg);
    if (dec.offload_sum(i) == 0) {
      lb.mode = ExecMode::Local;
      lb.bs = -1;
      lb.rate_bps = 0.0;
      lb.t_mec = kInf;
      lb.t_cloud = kInf;
      lb.t_total = lb.t_local;
    } else {
      auto [is_mec, m] = dec.offload_target(i);
      lb.mode = is_mec ? ExecMode::Mec : ExecMode::Cloud;
      lb.bs = m;
      lb.rate_bps = uplink_rate(W, s, m, i, cfg);
      lb.t_mec = exec_time_mec(lb.rate_bps, cfg);
      lb.t_cloud = exec_time_cloud(lb.rate_bps, cfg);
      lb.t_total = is_mec ? lb.t_mec : lb.t_cloud;
    }
    sum += lb.t_total;
  }
  return {sum, std::move(per_ut)};
}

}  // namespace iscc
