#pragma once

#include <utility>
#include <vector>

#include "iscc/scenario.hpp"

namespace iscc {

/// One transmit beamforming vector per UT (single data stream).
struct BeamformingSet {
  std::vector<CVec> w;  // length L, each of length K

  static BeamformingSet zeros(int L, int K) {
    BeamformingSet b;
    b.w.assign(L, CVec::Zero(K));
    return b;
  }
  int size() const { return static_cast<int>(w.size()); }
};

/// Binary offloading decision. a(m,i)=1 sends UT i's task to the MEC server
/// at BS m, b(m,i)=1 routes it through BS m to the cloud. Each UT selects
/// at most one mode; all zeros in column i means local execution.
struct OffloadDecision {
  Eigen::MatrixXi a;  // M x L
  Eigen::MatrixXi b;  // M x L

  static OffloadDecision all_local(int M, int L) {
    OffloadDecision d;
    d.a = Eigen::MatrixXi::Zero(M, L);
    d.b = Eigen::MatrixXi::Zero(M, L);
    return d;
  }

  int num_bs() const { return static_cast<int>(a.rows()); }
  int num_ut() const { return static_cast<int>(a.cols()); }

  /// True iff every entry is 0/1 and each UT selects at most one mode.
  bool valid_single_mode() const;

  /// Offload fraction sum_m a(m,i) + b(m,i) for UT i (0 or 1 when valid).
  int offload_sum(int i) const { return a.col(i).sum() + b.col(i).sum(); }

  /// Returns (is_mec, m) for an offloading UT; only valid when offload_sum(i)==1.
  std::pair<bool, int> offload_target(int i) const;
};

enum class ExecMode { Local, Mec, Cloud };

/// Per-UT timing detail. For offloading UTs all three mode times are
/// evaluated at the chosen BS's uplink rate; for local UTs rate_bps is 0 and
/// the offloading times carry the infinite-latency sentinel.
struct LatencyBreakdown {
  ExecMode mode = ExecMode::Local;
  int bs = -1;  // chosen BS, -1 for local
  double t_local = 0.0;
  double t_mec = 0.0;
  double t_cloud = 0.0;
  double t_total = 0.0;
  double rate_bps = 0.0;
};

/// Interference-plus-noise covariance at BS m for UT i's stream (N x N).
CMat interference_covariance(const BeamformingSet& W, const Scenario& s, int m,
                             int i, const SystemConfig& cfg);

/// Uplink rate from UT i to BS m, bits/s, via the log-det form
/// B*log2(det(I_N + H^H w w^H H Ninv)).
double uplink_rate(const BeamformingSet& W, const Scenario& s, int m, int i,
                   const SystemConfig& cfg);

/// Same rate through the rank-one reduction B*log2(1 + w^H H Ninv H^H w).
/// Kept as an independent evaluation route for cross-checking.
double uplink_rate_quad(const BeamformingSet& W, const Scenario& s, int m,
                        int i, const SystemConfig& cfg);

/// Echo SINR at UT i's radar receiver (linear).
double sensing_sinr(const BeamformingSet& W, const Scenario& s, int i,
                    const SystemConfig& cfg);

/// Numerator quadratic form of the echo SINR: w^H Q w with Q = A(theta)^H A(theta).
double sensing_numerator_quad(const Scenario& s, int i, const CVec& w,
                              const SystemConfig& cfg);

/// Denominator of the echo SINR: sum of interference traces plus radar noise.
double sensing_denominator(const BeamformingSet& W, const Scenario& s, int i,
                           const SystemConfig& cfg);

// Per-mode execution times, seconds. D = cfg.task_bits(). A non-positive
// uplink rate yields +infinity, which compares larger than any finite time.
double exec_time_local(const SystemConfig& cfg);
double exec_time_mec(double rate_bps, const SystemConfig& cfg);
double exec_time_cloud(double rate_bps, const SystemConfig& cfg);

/// Transmit-plus-compute power of UT i under the given decision, W.
double power_consumption(const BeamformingSet& W, const OffloadDecision& dec,
                         int i, const SystemConfig& cfg);

/// Total task execution time over all UTs plus the per-UT breakdown.
/// Throws std::invalid_argument if dec violates the single-mode constraint.
std::pair<double, std::vector<LatencyBreakdown>> total_time(
    const BeamformingSet& W, const OffloadDecision& dec, const Scenario& s,
    const SystemConfig& cfg);

}  // namespace iscc
