#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "iscc/scenario.hpp"

using namespace iscc;

namespace {

SystemConfig small_cfg() {
  SystemConfig cfg;
  cfg.M = 2;
  cfg.L = 3;
  cfg.K = 4;
  cfg.N = 5;
  return cfg;
}

bool scenarios_equal(const Scenario& a, const Scenario& b) {
  if (a.num_bs() != b.num_bs() || a.num_ut() != b.num_ut()) return false;
  for (int m = 0; m < a.num_bs(); ++m)
    for (int i = 0; i < a.num_ut(); ++i)
      if (a.H[m][i] != b.H[m][i]) return false;
  for (int l = 0; l < a.num_ut(); ++l)
    for (int i = 0; i < a.num_ut(); ++i) {
      if (l == i) continue;
      if (a.Hhat[l][i] != b.Hhat[l][i]) return false;
    }
  for (int i = 0; i < a.num_ut(); ++i) {
    if (a.theta[i] != b.theta[i] || a.dist_r[i] != b.dist_r[i] ||
        a.rcs[i] != b.rcs[i] || a.alpha[i] != b.alpha[i])
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("steering vector closed forms") {
  auto a0 = steering_vector(0.0, 4, 0.5);
  for (int k = 0; k < 4; ++k) {
    CHECK(a0(k).real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a0(k).imag() == doctest::Approx(0.0).epsilon(1e-15));
  }

  // broadside angle pi/2 with half-wavelength spacing alternates sign
  auto a1 = steering_vector(M_PI / 2, 4, 0.5);
  for (int k = 0; k < 4; ++k) {
    double expect = (k % 2 == 0) ? 1.0 : -1.0;
    CHECK(std::abs(a1(k) - Complex(expect, 0.0)) < 1e-12);
  }

  // theta = pi/6: element 2 = exp(j*pi*sin(pi/6)*2) = exp(j*pi) = -1
  auto a2 = steering_vector(M_PI / 6, 12, 0.5);
  CHECK(std::abs(a2(2) - Complex(-1.0, 0.0)) < 1e-12);
  CHECK(a2.squaredNorm() == doctest::Approx(12.0).epsilon(1e-10));
}

TEST_CASE("steering vector entries are unit modulus, squared norm K") {
  for (double theta : {-1.2, 0.3, 0.9, 2.7}) {
    for (int K : {1, 3, 12}) {
      auto a = steering_vector(theta, K, 0.5);
      for (int k = 0; k < K; ++k) CHECK(std::abs(std::abs(a(k)) - 1.0) < 1e-12);
      CHECK(std::abs(a.squaredNorm() - K) < 1e-10);
    }
  }
}

TEST_CASE("generate_scenario is deterministic in (cfg, seed)") {
  SystemConfig cfg = small_cfg();
  Scenario s1 = generate_scenario(cfg, 42);
  Scenario s2 = generate_scenario(cfg, 42);
  CHECK(scenarios_equal(s1, s2));
  CHECK(scenario_to_json(s1) == scenario_to_json(s2));

  Scenario s3 = generate_scenario(cfg, 43);
  CHECK_FALSE(scenarios_equal(s1, s3));
}

TEST_CASE("generate_scenario dimensions at reference scale") {
  SystemConfig cfg;
  cfg.M = 3;
  cfg.L = 9;
  cfg.K = 12;
  cfg.N = 16;
  Scenario s = generate_scenario(cfg, 0);
  REQUIRE(s.num_bs() == 3);
  REQUIRE(s.num_ut() == 9);
  int count = 0;
  for (int m = 0; m < 3; ++m)
    for (int i = 0; i < 9; ++i) {
      REQUIRE(s.H[m][i].rows() == 12);
      REQUIRE(s.H[m][i].cols() == 16);
      ++count;
    }
  CHECK(count == 27);
  // diagonal interference channels are absent
  for (int i = 0; i < 9; ++i) CHECK(s.Hhat[i][i].size() == 0);
  for (int i = 0; i < 9; ++i) {
    CHECK(s.alpha[i] > 0);
    CHECK(s.dist_r[i] > 0);
    CHECK(s.dist_r[i] <= cfg.target_range_max);
  }
}

TEST_CASE("channel generator variance matches the path-loss model") {
  // pathloss_exponent = 0, rho = 1: unit-variance entries
  SystemConfig cfg = small_cfg();
  cfg.pathloss_exponent = 0.0;
  cfg.rho = 1.0;

  double sum = 0.0;
  long n = 0;
  for (int seed = 0; seed < 900; ++seed) {
    Scenario s = generate_scenario(cfg, 1000 + seed);
    for (int m = 0; m < cfg.M; ++m)
      for (int i = 0; i < cfg.L; ++i) {
        sum += s.H[m][i].squaredNorm();
        n += s.H[m][i].size();
      }
  }
  REQUIRE(n >= 100000);
  double var = sum / static_cast<double>(n);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("doubling rho doubles the sample variance") {
  SystemConfig cfg = small_cfg();
  cfg.pathloss_exponent = 0.0;

  auto mean_gain = [&cfg](double rho, int seed0) {
    SystemConfig c = cfg;
    c.rho = rho;
    double sum = 0.0;
    long n = 0;
    for (int seed = 0; seed < 900; ++seed) {
      Scenario s = generate_scenario(c, seed0 + seed);
      for (int m = 0; m < c.M; ++m)
        for (int i = 0; i < c.L; ++i) {
          sum += s.H[m][i].squaredNorm();
          n += s.H[m][i].size();
        }
    }
    REQUIRE(n >= 100000);
    return sum / static_cast<double>(n);
  };

  double v1 = mean_gain(1.0, 10000);
  double v2 = mean_gain(2.0, 20000);  // independent draws
  CHECK(v2 / v1 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("scenario save/load round trip") {
  SystemConfig cfg = small_cfg();
  Scenario s = generate_scenario(cfg, 7);
  auto path = std::filesystem::temp_directory_path() / "iscc_scen_rt.json";
  save_scenario(s, path.string());
  Scenario t = load_scenario(path.string());
  CHECK(scenarios_equal(s, t));
  std::filesystem::remove(path);
}

TEST_CASE("truncated scenario file raises a parse error") {
  SystemConfig cfg = small_cfg();
  Scenario s = generate_scenario(cfg, 7);
  std::string text = scenario_to_json(s);
  std::string cut = text.substr(0, text.size() / 2);
  CHECK_THROWS_AS(parse_scenario_json(cut), ParseError);
}

TEST_CASE("malformed fields are reported by name") {
  SystemConfig cfg = small_cfg();
  Scenario s = generate_scenario(cfg, 7);
  std::string text = scenario_to_json(s);
  // corrupt one matrix entry into a scalar
  auto pos = text.find("\"theta\"");
  REQUIRE(pos != std::string::npos);
  std::string broken = text;
  broken.replace(pos, 7, "\"thetaX\"");
  CHECK_THROWS_WITH_AS(parse_scenario_json(broken),
                       doctest::Contains("theta"), ParseError);
}

TEST_CASE("hand-written minimal scenario loads") {
  const char* text = R"({
    "M": 1, "L": 1, "K": 1, "N": 1,
    "H": [[[[[0.5, -0.25]]]]],
    "Hhat": [[null]],
    "theta": [0.1], "dist_r": [10.0], "rcs": [1.0], "alpha": [0.0003],
    "bs_pos": [[0, 0]], "ut_pos": [[100, 0]], "target_pos": [[105, 5]]
  })";
  Scenario s = parse_scenario_json(text);
  CHECK(s.num_bs() == 1);
  CHECK(s.num_ut() == 1);
  CHECK(s.H[0][0](0, 0) == Complex(0.5, -0.25));
  CHECK(s.alpha[0] == doctest::Approx(3e-4));
}

TEST_CASE("config parse rejects unknown fields and bad values") {
  CHECK_THROWS_AS(parse_config_json("{\"bogus\": 1}"), ParseError);
  CHECK_THROWS_AS(parse_config_json("{\"L\": 0}"), ConfigError);
  CHECK_THROWS_AS(parse_config_json("{\"d\": 2}"), ConfigError);
  SystemConfig cfg = parse_config_json("{\"L\": 4, \"B\": 5e6}");
  CHECK(cfg.L == 4);
  CHECK(cfg.B == 5e6);
  CHECK(cfg.K == 12);  // untouched default
}
