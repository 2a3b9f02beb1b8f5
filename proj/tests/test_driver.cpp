#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "iscc/driver.hpp"

using namespace iscc;

namespace {

SystemConfig small_cfg() {
  SystemConfig cfg;
  cfg.M = 2;
  cfg.L = 3;
  cfg.K = 4;
  cfg.N = 4;
  cfg.Gamma_th = 0.5;
  return cfg;
}

}  // namespace

TEST_CASE("single UT with a huge MEC prefers offloading") {
  SystemConfig cfg;
  cfg.M = 1;
  cfg.L = 1;
  cfg.K = 4;
  cfg.N = 4;
  cfg.C_m = 100 * cfg.f_M;
  cfg.f_C = cfg.f_M;  // cloud pays the backhaul on top, MEC wins
  cfg.Gamma_th = 0.1;
  Scenario s = generate_scenario(cfg, 3);

  Solution sol = solve_joint(s, cfg);
  REQUIRE(sol.dec.valid_single_mode());
  CHECK(sol.dec.a(0, 0) == 1);
  CHECK(sol.objective < exec_time_local(cfg));

  // closed-form scan over the three modes at the found beamformer
  double rate = uplink_rate(sol.W, s, 0, 0, cfg);
  double best = std::min({exec_time_local(cfg), exec_time_mec(rate, cfg),
                          exec_time_cloud(rate, cfg)});
  CHECK(sol.objective == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("unreachable sensing threshold raises the documented error") {
  SystemConfig cfg = small_cfg();
  cfg.Gamma_th = 1e12;
  Scenario s = generate_scenario(cfg, 4);
  CHECK_THROWS_AS(solve_joint(s, cfg), GammaInfeasibleError);
}

TEST_CASE("same seed and config give identical traces") {
  SystemConfig cfg = small_cfg();
  Scenario s = generate_scenario(cfg, 5);
  Solution a = solve_joint(s, cfg);
  Solution b = solve_joint(s, cfg);
  REQUIRE(a.trace.rows.size() == b.trace.rows.size());
  for (std::size_t k = 0; k < a.trace.rows.size(); ++k) {
    CHECK(a.trace.rows[k].iter == b.trace.rows[k].iter);
    CHECK(a.trace.rows[k].phase == b.trace.rows[k].phase);
    CHECK(a.trace.rows[k].objective == b.trace.rows[k].objective);
  }
  CHECK(a.objective == b.objective);
}

TEST_CASE("outer objective trace is non-increasing") {
  SystemConfig cfg = small_cfg();
  for (int seed = 0; seed < 5; ++seed) {
    Scenario s = generate_scenario(cfg, 100 + seed);
    Solution sol = solve_joint(s, cfg);
    REQUIRE(sol.trace.rows.size() >= 2);
    for (std::size_t k = 1; k < sol.trace.rows.size(); ++k) {
      double prev = sol.trace.rows[k - 1].objective;
      double cur = sol.trace.rows[k].objective;
      CHECK(cur <= prev + 1e-6 * std::max(1.0, std::abs(prev)));
    }
    CHECK(sol.outer_iters <= 20);
  }
}

TEST_CASE("evaluate reports margins") {
  SystemConfig cfg = small_cfg();
  Scenario s = generate_scenario(cfg, 6);

  SUBCASE("optimizer output is feasible with non-negative margins") {
    Solution sol = solve_joint(s, cfg);
    auto [obj, rep] = evaluate(sol.W, sol.dec, s, cfg);
    CHECK(rep.feasible);
    CHECK(rep.single_mode_ok);
    CHECK(rep.sinr_margin >= -1e-6);
    CHECK(rep.power_margin >= -1e-8);
    CHECK(rep.capacity_margin >= -1e-12);
    CHECK(obj == doctest::Approx(sol.objective));
  }

  SUBCASE("zero beamformers violate the sensing threshold") {
    BeamformingSet W = BeamformingSet::zeros(cfg.L, cfg.K);
    OffloadDecision dec = OffloadDecision::all_local(cfg.M, cfg.L);
    auto [obj, rep] = evaluate(W, dec, s, cfg);
    CHECK_FALSE(rep.feasible);
    CHECK(rep.sinr_margin < 0);
    CHECK(obj == doctest::Approx(cfg.L * exec_time_local(cfg)));
  }
}

TEST_CASE("random feasible points rarely beat the optimizer") {
  SystemConfig cfg = small_cfg();
  Scenario s = generate_scenario(cfg, 7);
  Solution sol = solve_joint(s, cfg);

  std::mt19937_64 eng(7);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int dominated = 0, found = 0, attempts = 0;
  while (found < 50 && attempts < 5000) {
    ++attempts;
    // random feasible candidate: steer near the target, random power, random mode
    BeamformingSet W;
    W.w.resize(cfg.L);
    for (int i = 0; i < cfg.L; ++i) {
      CVec a = steering_vector(s.theta[i], cfg.K, cfg.antenna_spacing_over_wavelength);
      CVec noise(cfg.K);
      for (int k = 0; k < cfg.K; ++k) noise(k) = Complex(g(eng), g(eng));
      CVec dir = a / a.norm() + 0.2 * noise / noise.norm();
      dir /= dir.norm();
      double cap = cfg.P_c - cfg.epsilon * std::pow(cfg.f_L, 3);
      W.w[i] = std::sqrt(cap * (0.2 + 0.8 * u(eng))) * dir;
    }
    OffloadDecision dec = OffloadDecision::all_local(cfg.M, cfg.L);
    for (int i = 0; i < cfg.L; ++i) {
      int choice = static_cast<int>(eng() % (2 * cfg.M + 1));
      if (choice == 0) continue;
      if (choice <= cfg.M)
        dec.a(choice - 1, i) = 1;
      else
        dec.b(choice - cfg.M - 1, i) = 1;
    }
    // capacity may be violated by the random pick; skip those
    bool cap_ok = true;
    for (int m = 0; m < cfg.M; ++m)
      if (dec.a.row(m).sum() * cfg.f_M > cfg.C_m) cap_ok = false;
    if (!cap_ok) continue;
    auto [obj, rep] = evaluate(W, dec, s, cfg);
    if (!rep.feasible) continue;
    ++found;
    if (obj >= sol.objective - 1e-12) ++dominated;
  }
  REQUIRE(found == 50);
  CHECK(dominated >= 45);  // >= 90 percent
}
