#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>
#include <random>

#include "iscc/baselines.hpp"

using namespace iscc;

TEST_CASE("MRC closed forms") {
  SystemConfig cfg;
  cfg.M = 1;
  cfg.L = 1;
  cfg.K = 1;
  cfg.N = 2;
  Scenario s = generate_scenario(cfg, 1);

  SUBCASE("single-antenna UT collapses to a full-power scalar") {
    CVec w = mrc_beamformer(s, 0, 0, cfg);
    REQUIRE(w.size() == 1);
    CHECK(std::abs(w.squaredNorm() - cfg.P_c) < 1e-12);
  }

  SUBCASE("rank-one channel gives the exact left singular direction") {
    SystemConfig c2 = cfg;
    c2.K = 3;
    c2.N = 2;
    Scenario s2 = generate_scenario(c2, 2);
    CVec u(3);
    u << Complex(0.6, 0.0), Complex(0.0, 0.8), Complex(0.0, 0.0);
    CVec v(2);
    v << Complex(1.0, 0.0), Complex(0.0, 0.0);
    s2.H[0][0] = 2.5 * u * v.adjoint();
    CVec w = mrc_beamformer(s2, 0, 0, c2);
    // collinearity: |<w, u>| = ||w|| ||u||
    double inner = std::abs(u.dot(w));
    CHECK(inner == doctest::Approx(w.norm() * u.norm()).epsilon(1e-10));
  }

  SUBCASE("random channel achieves the single-user SVD rate") {
    SystemConfig c3 = cfg;
    c3.K = 4;
    c3.N = 5;
    for (int seed = 0; seed < 50; ++seed) {
      Scenario s3 = generate_scenario(c3, 100 + seed);
      BeamformingSet W;
      W.w = {mrc_beamformer(s3, 0, 0, c3)};
      Eigen::JacobiSVD<CMat> svd(s3.H[0][0]);
      double smax = svd.singularValues()(0);
      double expect =
          c3.B * std::log2(1.0 + c3.P_c * smax * smax / c3.noise_power_comm());
      double rate = uplink_rate(W, s3, 0, 0, c3);
      CHECK(std::abs(rate - expect) / expect < 1e-9);
    }
  }
}

TEST_CASE("MRS closed forms") {
  SystemConfig cfg;
  cfg.M = 1;
  cfg.L = 1;
  cfg.K = 4;
  cfg.N = 4;
  Scenario s = generate_scenario(cfg, 3);

  SUBCASE("zero angle gives the scaled all-ones vector") {
    s.theta[0] = 0.0;
    CVec w = mrs_beamformer(s, 0, cfg);
    for (int k = 0; k < cfg.K; ++k)
      CHECK(std::abs(w(k) - Complex(std::sqrt(cfg.P_c / cfg.K), 0.0)) < 1e-12);
  }

  SUBCASE("MRS maximizes the sensing numerator at the power budget") {
    CVec w = mrs_beamformer(s, 0, cfg);
    double best = sensing_numerator_quad(s, 0, w, cfg);
    CHECK(best == doctest::Approx(cfg.K * cfg.K * cfg.P_c).epsilon(1e-10));
    std::mt19937_64 eng(3);
    std::normal_distribution<double> g;
    for (int t = 0; t < 50; ++t) {
      CVec r(cfg.K);
      for (int k = 0; k < cfg.K; ++k) r(k) = Complex(g(eng), g(eng));
      r *= std::sqrt(cfg.P_c / r.squaredNorm());
      CHECK(sensing_numerator_quad(s, 0, r, cfg) <= best * (1 + 1e-12));
    }
  }

  SUBCASE("single-UT sensing SINR: MRS at least matches MRC") {
    for (int seed = 0; seed < 50; ++seed) {
      Scenario s2 = generate_scenario(cfg, 200 + seed);
      BeamformingSet Wmrs, Wmrc;
      Wmrs.w = {mrs_beamformer(s2, 0, cfg)};
      Wmrc.w = {mrc_beamformer(s2, 0, 0, cfg)};
      CHECK(sensing_sinr(Wmrs, s2, 0, cfg) >=
            sensing_sinr(Wmrc, s2, 0, cfg) * (1 - 1e-12));
    }
  }
}

TEST_CASE("baseline beamformers hit the power budget exactly") {
  SystemConfig cfg;
  cfg.M = 2;
  cfg.L = 4;
  cfg.K = 6;
  cfg.N = 5;
  for (int seed = 0; seed < 10; ++seed) {
    Scenario s = generate_scenario(cfg, 300 + seed);
    for (int i = 0; i < cfg.L; ++i) {
      CHECK(std::abs(mrs_beamformer(s, i, cfg).squaredNorm() - cfg.P_c) < 1e-12);
      for (int m = 0; m < cfg.M; ++m)
        CHECK(std::abs(mrc_beamformer(s, i, m, cfg).squaredNorm() - cfg.P_c) < 1e-12);
    }
  }
}

TEST_CASE("two-tier scheme never uses the cloud") {
  SystemConfig cfg;
  cfg.M = 2;
  cfg.L = 3;
  cfg.K = 4;
  cfg.N = 4;
  cfg.Gamma_th = 0.3;
  Scenario s = generate_scenario(cfg, 5);
  SchemeResult res = two_tier_scheme(s, cfg);
  CHECK(res.dec.b.sum() == 0);
  CHECK(res.feasible);
}

TEST_CASE("joint design beats the fixed-beamformer schemes when all feasible") {
  SystemConfig cfg;
  cfg.M = 2;
  cfg.L = 3;
  cfg.K = 4;
  cfg.N = 4;
  cfg.Gamma_th = 0.2;
  int compared = 0;
  for (int seed = 0; seed < 10; ++seed) {
    Scenario s = generate_scenario(cfg, 400 + seed);
    SchemeResult bo = run_scheme(Scheme::ThcoBo, s, cfg);
    if (!bo.feasible) continue;
    for (Scheme base : {Scheme::ThcoMrc, Scheme::ThcoMrs, Scheme::Local}) {
      SchemeResult b = run_scheme(base, s, cfg);
      if (!b.feasible) continue;
      ++compared;
      CHECK(bo.objective <= b.objective * (1 + 1e-9));
    }
  }
  CHECK(compared > 0);
}

TEST_CASE("scheme names round-trip") {
  for (Scheme s : {Scheme::ThcoBo, Scheme::TtcoBo, Scheme::ThcoMrc,
                   Scheme::ThcoMrs, Scheme::Local})
    CHECK(scheme_from_string(scheme_name(s)) == s);
  CHECK_THROWS_AS(scheme_from_string("bogus"), ConfigError);
}
