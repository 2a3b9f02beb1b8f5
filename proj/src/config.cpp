#include "iscc/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace iscc {

using nlohmann::json;

void SystemConfig::validate() const {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError("config: " + msg);
  };
  need(M >= 1, "M must be >= 1");
  need(L >= 1, "L must be >= 1");
  need(N >= 1, "N must be >= 1");
  need(K >= 1, "K must be >= 1");
  need(d == 1, "d must be 1");
  need(B > 0, "B must be > 0");
  need(noise_density_c > 0, "noise_density_c must be > 0");
  need(noise_density_r > 0, "noise_density_r must be > 0");
  need(beta > 0, "beta must be > 0");
  need(epsilon > 0, "epsilon must be > 0");
  need(f_L > 0, "f_L must be > 0");
  need(f_M > 0, "f_M must be > 0");
  need(f_C > 0, "f_C must be > 0");
  need(C_m > 0, "C_m must be > 0");
  need(r_c > 0, "r_c must be > 0");
  need(P_c > 0, "P_c must be > 0");
  need(Gamma_th > 0, "Gamma_th must be > 0");
  need(kappa > 0, "kappa must be > 0");
  need(rho > 0, "rho must be > 0");
  need(pathloss_exponent >= 0, "pathloss_exponent must be >= 0");
  need(area_side > 0, "area_side must be > 0");
  need(target_range_max > 0, "target_range_max must be > 0");
  need(antenna_spacing_over_wavelength > 0,
       "antenna_spacing_over_wavelength must be > 0");
}

namespace {

struct FieldBinding {
  const char* name;
  enum Kind { Int, Double } kind;
  int SystemConfig::* iptr;
  double SystemConfig::* dptr;
};

const FieldBinding kFields[] = {
    {"M", FieldBinding::Int, &SystemConfig::M, nullptr},
    {"L", FieldBinding::Int, &SystemConfig::L, nullptr},
    {"N", FieldBinding::Int, &SystemConfig::N, nullptr},
    {"K", FieldBinding::Int, &SystemConfig::K, nullptr},
    {"d", FieldBinding::Int, &SystemConfig::d, nullptr},
    {"B", FieldBinding::Double, nullptr, &SystemConfig::B},
    {"noise_density_c", FieldBinding::Double, nullptr,
     &SystemConfig::noise_density_c},
    {"noise_density_r", FieldBinding::Double, nullptr,
     &SystemConfig::noise_density_r},
    {"beta", FieldBinding::Double, nullptr, &SystemConfig::beta},
    {"epsilon", FieldBinding::Double, nullptr, &SystemConfig::epsilon},
    {"f_L", FieldBinding::Double, nullptr, &SystemConfig::f_L},
    {"f_M", FieldBinding::Double, nullptr, &SystemConfig::f_M},
    {"f_C", FieldBinding::Double, nullptr, &SystemConfig::f_C},
    {"C_m", FieldBinding::Double, nullptr, &SystemConfig::C_m},
    {"r_c", FieldBinding::Double, nullptr, &SystemConfig::r_c},
    {"P_c", FieldBinding::Double, nullptr, &SystemConfig::P_c},
    {"Gamma_th", FieldBinding::Double, nullptr, &SystemConfig::Gamma_th},
    {"kappa", FieldBinding::Double, nullptr, &SystemConfig::kappa},
    {"rho", FieldBinding::Double, nullptr, &SystemConfig::rho},
    {"pathloss_exponent", FieldBinding::Double, nullptr,
     &SystemConfig::pathloss_exponent},
    {"area_side", FieldBinding::Double, nullptr, &SystemConfig::area_side},
    {"target_range_max", FieldBinding::Double, nullptr,
     &SystemConfig::target_range_max},
    {"antenna_spacing_over_wavelength", FieldBinding::Double, nullptr,
     &SystemConfig::antenna_spacing_over_wavelength},
};

}  // namespace

SystemConfig parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("config: top-level value must be an object");

  SystemConfig cfg;  // start from defaults, override present keys
  for (auto it = j.begin(); it != j.end(); ++it) {
    const FieldBinding* hit = nullptr;
    for (const auto& f : kFields) {
      if (it.key() == f.name) {
        hit = &f;
        break;
      }
    }
    if (!hit) throw ParseError("config: unknown field '" + it.key() + "'");
    if (!it.value().is_number())
      throw ParseError("config: field '" + it.key() + "' must be a number");
    if (hit->kind == FieldBinding::Int) {
      double v = it.value().get<double>();
      if (v != static_cast<int>(v))
        throw ParseError("config: field '" + it.key() + "' must be an integer");
      cfg.*(hit->iptr) = static_cast<int>(v);
    } else {
      cfg.*(hit->dptr) = it.value().get<double>();
    }
  }
  cfg.validate();
  return cfg;
}

std::string config_to_json(const SystemConfig& cfg) {
  json j;
  for (const auto& f : kFields) {
    if (f.kind == FieldBinding::Int)
      j[f.name] = cfg.*(f.iptr);
    else
      j[f.name] = cfg.*(f.dptr);
  }
  return j.dump(2);
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str());
}

void save_config(const SystemConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("config: cannot write '" + path + "'");
  out << config_to_json(cfg) << "\n";
}

}  // namespace iscc
