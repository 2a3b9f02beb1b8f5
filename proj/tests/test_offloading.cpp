#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "iscc/offloading.hpp"

using namespace iscc;

namespace {

BeamformingSet random_beams(const SystemConfig& cfg, std::mt19937_64& eng,
                            double power) {
  std::normal_distribution<double> g;
  BeamformingSet W;
  W.w.resize(cfg.L);
  for (int i = 0; i < cfg.L; ++i) {
    CVec w(cfg.K);
    for (int k = 0; k < cfg.K; ++k) w(k) = Complex(g(eng), g(eng));
    W.w[i] = w * std::sqrt(power / w.squaredNorm());
  }
  return W;
}

// enumerate all per-UT mode assignments: 0 = local, 1..M = MEC m, M+1..2M =
// cloud via m; returns the best feasible total time
double exhaustive_offloading(const BeamformingSet& W, const Scenario& s,
                             const SystemConfig& cfg) {
  const int M = cfg.M, L = cfg.L;
  const int options = 2 * M + 1;
  long total = 1;
  for (int i = 0; i < L; ++i) total *= options;

  double best = std::numeric_limits<double>::infinity();
  for (long code = 0; code < total; ++code) {
    long rest = code;
    OffloadDecision dec = OffloadDecision::all_local(M, L);
    for (int i = 0; i < L; ++i) {
      int choice = static_cast<int>(rest % options);
      rest /= options;
      if (choice == 0) continue;
      if (choice <= M)
        dec.a(choice - 1, i) = 1;
      else
        dec.b(choice - M - 1, i) = 1;
    }
    // capacity
    bool ok = true;
    for (int m = 0; m < M && ok; ++m)
      if (dec.a.row(m).sum() * cfg.f_M > cfg.C_m * (1 + 1e-12)) ok = false;
    // exact power
    for (int i = 0; i < L && ok; ++i)
      if (power_consumption(W, dec, i, cfg) > cfg.P_c * (1 + 1e-12)) ok = false;
    if (!ok) continue;
    best = std::min(best, total_time(W, dec, s, cfg).first);
  }
  return best;
}

}  // namespace

TEST_CASE("LP cost coefficients") {
  SystemConfig cfg;
  cfg.M = 1;
  cfg.L = 1;
  cfg.K = 1;
  cfg.N = 1;
  cfg.kappa = 0.1;
  cfg.B = 1e7;  // D = 1e6 bits
  cfg.beta = 40.0;
  cfg.f_L = 0.1e9;
  cfg.f_M = 3e9;
  cfg.noise_density_c = 1.0 / cfg.B;  // sigma^2 = 1

  Scenario s = generate_scenario(cfg, 1);
  // pick |h| and |w| so the uplink rate is exactly 100 Mbit/s:
  // rate = B log2(1 + |h w|^2) = 1e8  =>  |h w|^2 = 2^10 - 1
  s.H[0][0](0, 0) = Complex(1.0, 0.0);
  BeamformingSet W;
  W.w = {CVec::Constant(1, Complex(std::sqrt(std::pow(2.0, 10.0) - 1.0), 0.0))};
  REQUIRE(uplink_rate(W, s, 0, 0, cfg) == doctest::Approx(1e8).epsilon(1e-12));

  SystemConfig cfg2 = cfg;
  cfg2.P_c = 1e6;  // keep the power row out of the picture
  OffloadLpData data = build_offloading_lp(W, s, cfg2, true);
  REQUIRE(data.vars.size() == 2);
  CHECK(data.lp.cost[0] ==
        doctest::Approx(40e6 / 3e9 + 1e6 / 1e8 - 0.4).epsilon(1e-9));
  CHECK(data.lp.cost[0] == doctest::Approx(-0.3766666).epsilon(1e-5));
  CHECK(data.base_cost == doctest::Approx(0.4));
}

TEST_CASE("equal compute speeds and infinite rate leave the LP indifferent") {
  SystemConfig cfg;
  cfg.M = 1;
  cfg.L = 1;
  cfg.K = 2;
  cfg.N = 2;
  cfg.f_M = cfg.f_L;
  cfg.P_c = 10.0;
  Scenario s = generate_scenario(cfg, 2);
  // gigantic channel: uplink delay negligible
  s.H[0][0] *= 1e9;
  std::mt19937_64 eng(2);
  BeamformingSet W = random_beams(cfg, eng, 1.0);

  OffloadLpData data = build_offloading_lp(W, s, cfg, false);
  REQUIRE(data.vars.size() == 1);
  // equal compute speeds cancel exactly; only the vanishing uplink term is left
  double rate = uplink_rate(W, s, 0, 0, cfg);
  CHECK(data.lp.cost[0] == doctest::Approx(cfg.task_bits() / rate).epsilon(1e-9));
  CHECK(data.lp.cost[0] < 1e-2 * exec_time_local(cfg));
}

TEST_CASE("capacity below one task forces MEC columns to zero") {
  SystemConfig cfg;
  cfg.M = 1;
  cfg.L = 2;
  cfg.K = 2;
  cfg.N = 2;
  cfg.C_m = cfg.f_M * 0.5;  // cannot host even one task
  cfg.P_c = 10.0;
  Scenario s = generate_scenario(cfg, 3);
  s.H[0][0] *= 1e6;
  s.H[0][1] *= 1e6;
  std::mt19937_64 eng(3);
  BeamformingSet W = random_beams(cfg, eng, 1.0);

  OffloadResult res = optimize_offloading(W, s, cfg, false);
  CHECK(res.dec.a.sum() == 0);
  CHECK(res.dec.b.sum() == 0);
}

TEST_CASE("round_inflate keeps integral solutions") {
  SystemConfig cfg;
  cfg.M = 2;
  cfg.L = 2;
  cfg.K = 2;
  cfg.N = 2;
  Scenario s = generate_scenario(cfg, 4);
  std::mt19937_64 eng(4);
  BeamformingSet W = random_beams(cfg, eng, 0.25);
  OffloadLpData data = build_offloading_lp(W, s, cfg, true);
  RVec x = RVec::Zero(data.vars.size());
  x[1] = 1.0;  // a(0, 1) = 1
  RoundResult rr = round_inflate(x, data, W, cfg);
  CHECK_FALSE(rr.fell_back_all_local);
  CHECK(rr.dec.a(0, 1) == 1);
  CHECK(rr.dec.a.sum() + rr.dec.b.sum() == 1);
}

TEST_CASE("largest fractional variable wins") {
  SystemConfig cfg;
  cfg.M = 1;
  cfg.L = 1;
  cfg.K = 2;
  cfg.N = 2;
  Scenario s = generate_scenario(cfg, 5);
  std::mt19937_64 eng(5);
  BeamformingSet W = random_beams(cfg, eng, 0.25);
  OffloadLpData data = build_offloading_lp(W, s, cfg, true);
  REQUIRE(data.vars.size() == 2);
  RVec x(2);
  x << 0.6, 0.4;  // a fractional 0.6, b fractional 0.4
  RoundResult rr = round_inflate(x, data, W, cfg);
  CHECK_FALSE(rr.fell_back_all_local);
  CHECK(rr.dec.a(0, 0) == 1);
  CHECK(rr.dec.b(0, 0) == 0);
}

TEST_CASE("rounding brackets: LP optimum <= rounded <= 1.10 x exhaustive") {
  SystemConfig cfg;
  cfg.M = 2;
  cfg.L = 3;
  cfg.K = 2;
  cfg.N = 2;
  cfg.C_m = 1.5 * cfg.f_M;  // capacity binds: at most one task per BS
  std::mt19937_64 eng(6);
  for (int trial = 0; trial < 20; ++trial) {
    Scenario s = generate_scenario(cfg, 600 + trial);
    BeamformingSet W = random_beams(cfg, eng, 0.5 * cfg.P_c);
    OffloadResult res = optimize_offloading(W, s, cfg, true);
    double oracle = exhaustive_offloading(W, s, cfg);
    CHECK(res.lp_objective <= res.objective + 1e-8);
    CHECK(res.objective <= 1.10 * oracle + 1e-8);
    CHECK(res.objective <= cfg.L * exec_time_local(cfg) + 1e-8);
    CHECK(res.dec.valid_single_mode());
  }
}

TEST_CASE("ample resources: everyone picks the best-rate MEC") {
  SystemConfig cfg;
  cfg.M = 2;
  cfg.L = 3;
  cfg.K = 2;
  cfg.N = 2;
  cfg.f_C = cfg.f_M;  // cloud strictly worse by the backhaul delay
  cfg.C_m = 100 * cfg.f_M;
  cfg.P_c = 10.0;
  Scenario s = generate_scenario(cfg, 7);
  for (int m = 0; m < cfg.M; ++m)
    for (int i = 0; i < cfg.L; ++i) s.H[m][i] *= 1e5;
  std::mt19937_64 eng(7);
  BeamformingSet W = random_beams(cfg, eng, 1.0);

  OffloadResult res = optimize_offloading(W, s, cfg, true);
  CHECK(res.dec.b.sum() == 0);
  for (int i = 0; i < cfg.L; ++i) {
    REQUIRE(res.dec.offload_sum(i) == 1);
    auto [is_mec, m] = res.dec.offload_target(i);
    CHECK(is_mec);
    // chosen BS has the higher uplink rate
    double r0 = uplink_rate(W, s, 0, i, cfg);
    double r1 = uplink_rate(W, s, 1, i, cfg);
    CHECK(m == (r1 > r0 ? 1 : 0));
  }
}

TEST_CASE("fast cloud absorbs the capacity overflow") {
  SystemConfig cfg;
  cfg.M = 1;
  cfg.L = 3;
  cfg.K = 2;
  cfg.N = 2;
  cfg.f_C = 10 * cfg.f_M;
  cfg.r_c = 1e9;
  cfg.C_m = 1.2 * cfg.f_M;  // one MEC slot
  cfg.P_c = 10.0;
  Scenario s = generate_scenario(cfg, 8);
  s.H[0][0] *= 1e5;
  s.H[0][1] *= 1e5;
  s.H[0][2] *= 1e5;
  std::mt19937_64 eng(8);
  BeamformingSet W = random_beams(cfg, eng, 1.0);

  OffloadResult res = optimize_offloading(W, s, cfg, true);
  double oracle = exhaustive_offloading(W, s, cfg);
  CHECK(res.objective <= 1.10 * oracle + 1e-9);
  CHECK(res.dec.a.sum() <= 1);  // capacity respected
  CHECK(res.dec.b.sum() >= 2);  // overflow goes to the cloud
}

TEST_CASE("dead uplinks keep everyone local") {
  SystemConfig cfg;
  cfg.M = 2;
  cfg.L = 3;
  cfg.K = 2;
  cfg.N = 2;
  Scenario s = generate_scenario(cfg, 9);
  BeamformingSet W = BeamformingSet::zeros(cfg.L, cfg.K);

  OffloadResult res = optimize_offloading(W, s, cfg, true);
  CHECK(res.dec.a.sum() == 0);
  CHECK(res.dec.b.sum() == 0);
  CHECK(res.objective == doctest::Approx(cfg.L * exec_time_local(cfg)));
}

TEST_CASE("transmit power above the budget trips the all-local report") {
  SystemConfig cfg;
  cfg.M = 1;
  cfg.L = 1;
  cfg.K = 2;
  cfg.N = 2;
  Scenario s = generate_scenario(cfg, 10);
  std::mt19937_64 eng(10);
  BeamformingSet W = random_beams(cfg, eng, 2.0 * cfg.P_c);

  OffloadResult res = optimize_offloading(W, s, cfg, true);
  CHECK(res.fell_back_all_local);
  CHECK_FALSE(res.power_feasible);
}

TEST_CASE("full-power beamformers exclude the local mode") {
  SystemConfig cfg;
  cfg.M = 1;
  cfg.L = 2;
  cfg.K = 2;
  cfg.N = 2;
  cfg.C_m = 10 * cfg.f_M;
  Scenario s = generate_scenario(cfg, 11);
  s.H[0][0] *= 1e4;
  s.H[0][1] *= 1e4;
  std::mt19937_64 eng(11);
  BeamformingSet W = random_beams(cfg, eng, cfg.P_c);  // exactly P_c

  OffloadResult res = optimize_offloading(W, s, cfg, true);
  CHECK_FALSE(res.fell_back_all_local);
  for (int i = 0; i < cfg.L; ++i) CHECK(res.dec.offload_sum(i) == 1);
}
