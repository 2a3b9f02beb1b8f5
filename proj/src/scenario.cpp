#include "iscc/scenario.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

namespace iscc {

using nlohmann::json;

namespace {

// mt19937_64 output mapped to doubles explicitly, so draws do not depend on
// the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller; ln argument is in (0, 1]
  double gaussian() {
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Complex complex_gaussian(double variance) {
    double s = std::sqrt(variance / 2.0);
    double re = gaussian();
    double im = gaussian();
    return Complex(s * re, s * im);
  }

 private:
  std::mt19937_64 eng_;
};

CMat draw_channel(Rng& rng, int rows, int cols, double variance) {
  CMat h(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) h(r, c) = rng.complex_gaussian(variance);
  return h;
}

}  // namespace

CVec steering_vector(double theta, int K, double spacing_ratio) {
  CVec a(K);
  double phase_step = 2.0 * M_PI * spacing_ratio * std::sin(theta);
  for (int k = 0; k < K; ++k)
    a(k) = std::polar(1.0, phase_step * static_cast<double>(k));
  return a;
}

Scenario generate_scenario(const SystemConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  Scenario s;

  s.bs_pos.resize(cfg.M);
  for (auto& p : s.bs_pos) {
    p.x = rng.uniform(0.0, cfg.area_side);
    p.y = rng.uniform(0.0, cfg.area_side);
  }
  s.ut_pos.resize(cfg.L);
  for (auto& p : s.ut_pos) {
    p.x = rng.uniform(0.0, cfg.area_side);
    p.y = rng.uniform(0.0, cfg.area_side);
  }

  s.target_pos.resize(cfg.L);
  s.theta.resize(cfg.L);
  s.dist_r.resize(cfg.L);
  s.rcs.resize(cfg.L);
  s.alpha.resize(cfg.L);
  for (int i = 0; i < cfg.L; ++i) {
    double ang = rng.uniform(0.0, 2.0 * M_PI);
    // uniform in the disk; floor on the radial draw keeps dist_r > 0
    double r = cfg.target_range_max * std::sqrt(std::max(rng.uniform(), 1e-12));
    s.target_pos[i].x = s.ut_pos[i].x + r * std::cos(ang);
    s.target_pos[i].y = s.ut_pos[i].y + r * std::sin(ang);
    s.theta[i] = std::atan2(s.target_pos[i].y - s.ut_pos[i].y,
                            s.target_pos[i].x - s.ut_pos[i].x);
    s.dist_r[i] = r;
    // large-vehicle-class targets; the model only fixes the echo-gain formula
    s.rcs[i] = rng.uniform(50.0, 150.0);
    s.alpha[i] = std::sqrt(cfg.rho / (r * r) * s.rcs[i] / (r * r));
  }

  s.H.assign(cfg.M, std::vector<CMat>(cfg.L));
  for (int m = 0; m < cfg.M; ++m)
    for (int i = 0; i < cfg.L; ++i) {
      double d = std::max(dist(s.ut_pos[i], s.bs_pos[m]), 1.0);
      double var = cfg.rho * std::pow(d, -cfg.pathloss_exponent);
      s.H[m][i] = draw_channel(rng, cfg.K, cfg.N, var);
    }

  s.Hhat.assign(cfg.L, std::vector<CMat>(cfg.L));
  for (int l = 0; l < cfg.L; ++l)
    for (int i = 0; i < cfg.L; ++i) {
      if (l == i) continue;
      double d = std::max(dist(s.ut_pos[l], s.ut_pos[i]), 1.0);
      double var = cfg.rho * std::pow(d, -cfg.pathloss_exponent);
      s.Hhat[l][i] = draw_channel(rng, cfg.K, cfg.K, var);
    }

  return s;
}

void Scenario::validate() const {
  const int M = num_bs();
  const int L = num_ut();
  if (M < 1 || L < 1) throw ParseError("scenario: H must be non-empty");
  if (static_cast<int>(Hhat.size()) != L)
    throw ParseError("scenario: Hhat must have L rows");
  const int K = ut_antennas();
  const int N = bs_antennas();
  if (K < 1 || N < 1) throw ParseError("scenario: H[0][0] must be non-empty");

  for (int m = 0; m < M; ++m) {
    if (static_cast<int>(H[m].size()) != L)
      throw ParseError("scenario: H[" + std::to_string(m) + "] must have L entries");
    for (int i = 0; i < L; ++i)
      if (H[m][i].rows() != K || H[m][i].cols() != N)
        throw ParseError("scenario: H[" + std::to_string(m) + "][" +
                         std::to_string(i) + "] must be K x N");
  }
  for (int l = 0; l < L; ++l) {
    if (static_cast<int>(Hhat[l].size()) != L)
      throw ParseError("scenario: Hhat[" + std::to_string(l) + "] must have L entries");
    for (int i = 0; i < L; ++i) {
      if (l == i) {
        if (Hhat[l][i].size() != 0)
          throw ParseError("scenario: Hhat[" + std::to_string(l) + "][" +
                           std::to_string(i) + "] must be absent (self-interference)");
      } else if (Hhat[l][i].rows() != K || Hhat[l][i].cols() != K) {
        throw ParseError("scenario: Hhat[" + std::to_string(l) + "][" +
                         std::to_string(i) + "] must be K x K");
      }
    }
  }
  auto check_len = [L](std::size_t n, const char* name) {
    if (static_cast<int>(n) != L)
      throw ParseError(std::string("scenario: ") + name + " must have length L");
  };
  check_len(theta.size(), "theta");
  check_len(dist_r.size(), "dist_r");
  check_len(rcs.size(), "rcs");
  check_len(alpha.size(), "alpha");
  check_len(ut_pos.size(), "ut_pos");
  check_len(target_pos.size(), "target_pos");
  if (static_cast<int>(bs_pos.size()) != M)
    throw ParseError("scenario: bs_pos must have length M");
  for (int i = 0; i < L; ++i) {
    if (!(alpha[i] > 0))
      throw ParseError("scenario: alpha[" + std::to_string(i) + "] must be > 0");
    if (!(dist_r[i] > 0))
      throw ParseError("scenario: dist_r[" + std::to_string(i) + "] must be > 0");
  }
}

namespace {

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json cmat_to_json(const CMat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Complex json_to_complex(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError("scenario: " + where + " must be a [re, im] pair");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

CMat json_to_cmat(const json& j, int rows, int cols, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw ParseError("scenario: " + where + " must have " + std::to_string(rows) + " rows");
  CMat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw ParseError("scenario: " + where + " row " + std::to_string(r) +
                       " must have " + std::to_string(cols) + " columns");
    for (int c = 0; c < cols; ++c)
      m(r, c) = json_to_complex(row[c], where + "[" + std::to_string(r) + "][" +
                                            std::to_string(c) + "]");
  }
  return m;
}

std::vector<double> json_to_dvec(const json& j, int n, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw ParseError("scenario: " + where + " must have length " + std::to_string(n));
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_number())
      throw ParseError("scenario: " + where + "[" + std::to_string(i) + "] must be a number");
    v[i] = j[i].get<double>();
  }
  return v;
}

std::vector<Vec2> json_to_positions(const json& j, int n, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw ParseError("scenario: " + where + " must have length " + std::to_string(n));
  std::vector<Vec2> v(n);
  for (int i = 0; i < n; ++i) {
    const json& p = j[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw ParseError("scenario: " + where + "[" + std::to_string(i) + "] must be [x, y]");
    v[i] = {p[0].get<double>(), p[1].get<double>()};
  }
  return v;
}

int get_dim(const json& j, const char* name) {
  if (!j.contains(name) || !j[name].is_number_integer())
    throw ParseError(std::string("scenario: missing integer field '") + name + "'");
  int v = j[name].get<int>();
  if (v < 1) throw ParseError(std::string("scenario: field '") + name + "' must be >= 1");
  return v;
}

}  // namespace

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["M"] = s.num_bs();
  j["L"] = s.num_ut();
  j["K"] = s.ut_antennas();
  j["N"] = s.bs_antennas();

  json H = json::array();
  for (const auto& per_bs : s.H) {
    json row = json::array();
    for (const auto& h : per_bs) row.push_back(cmat_to_json(h));
    H.push_back(std::move(row));
  }
  j["H"] = std::move(H);

  json Hhat = json::array();
  for (int l = 0; l < s.num_ut(); ++l) {
    json row = json::array();
    for (int i = 0; i < s.num_ut(); ++i) {
      if (l == i)
        row.push_back(nullptr);
      else
        row.push_back(cmat_to_json(s.Hhat[l][i]));
    }
    Hhat.push_back(std::move(row));
  }
  j["Hhat"] = std::move(Hhat);

  j["theta"] = s.theta;
  j["dist_r"] = s.dist_r;
  j["rcs"] = s.rcs;
  j["alpha"] = s.alpha;
  auto pos_json = [](const std::vector<Vec2>& ps) {
    json a = json::array();
    for (const auto& p : ps) a.push_back(json::array({p.x, p.y}));
    return a;
  };
  j["bs_pos"] = pos_json(s.bs_pos);
  j["ut_pos"] = pos_json(s.ut_pos);
  j["target_pos"] = pos_json(s.target_pos);
  return j.dump();
}

Scenario parse_scenario_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("scenario: top-level value must be an object");

  const int M = get_dim(j, "M");
  const int L = get_dim(j, "L");
  const int K = get_dim(j, "K");
  const int N = get_dim(j, "N");

  Scenario s;
  if (!j.contains("H")) throw ParseError("scenario: missing field 'H'");
  const json& H = j["H"];
  if (!H.is_array() || static_cast<int>(H.size()) != M)
    throw ParseError("scenario: H must have M entries");
  s.H.assign(M, std::vector<CMat>(L));
  for (int m = 0; m < M; ++m) {
    if (!H[m].is_array() || static_cast<int>(H[m].size()) != L)
      throw ParseError("scenario: H[" + std::to_string(m) + "] must have L entries");
    for (int i = 0; i < L; ++i)
      s.H[m][i] = json_to_cmat(H[m][i], K, N,
                               "H[" + std::to_string(m) + "][" + std::to_string(i) + "]");
  }

  if (!j.contains("Hhat")) throw ParseError("scenario: missing field 'Hhat'");
  const json& Hh = j["Hhat"];
  if (!Hh.is_array() || static_cast<int>(Hh.size()) != L)
    throw ParseError("scenario: Hhat must have L entries");
  s.Hhat.assign(L, std::vector<CMat>(L));
  for (int l = 0; l < L; ++l) {
    if (!Hh[l].is_array() || static_cast<int>(Hh[l].size()) != L)
      throw ParseError("scenario: Hhat[" + std::to_string(l) + "] must have L entries");
    for (int i = 0; i < L; ++i) {
      if (l == i) {
        if (!Hh[l][i].is_null())
          throw ParseError("scenario: Hhat[" + std::to_string(l) + "][" +
                           std::to_string(i) + "] must be null");
        continue;
      }
      s.Hhat[l][i] = json_to_cmat(Hh[l][i], K, K,
                                  "Hhat[" + std::to_string(l) + "][" + std::to_string(i) + "]");
    }
  }

  auto field = [&j](const char* name) -> const json& {
    if (!j.contains(name)) throw ParseError(std::string("scenario: missing field '") + name + "'");
    return j[name];
  };
  s.theta = json_to_dvec(field("theta"), L, "theta");
  s.dist_r = json_to_dvec(field("dist_r"), L, "dist_r");
  s.rcs = json_to_dvec(field("rcs"), L, "rcs");
  s.alpha = json_to_dvec(field("alpha"), L, "alpha");
  s.bs_pos = json_to_positions(field("bs_pos"), M, "bs_pos");
  s.ut_pos = json_to_positions(field("ut_pos"), L, "ut_pos");
  s.target_pos = json_to_positions(field("target_pos"), L, "target_pos");

  s.validate();
  return s;
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("scenario: cannot write '" + path + "'");
  out << scenario_to_json(s) << "\n";
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("scenario: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_json(ss.str());
}

}  // namespace iscc
