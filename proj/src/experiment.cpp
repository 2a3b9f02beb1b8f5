#include "iscc/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

namespace iscc {

using nlohmann::json;

SweepAxis axis_from_string(const std::string& name) {
  if (name == "bandwidth") return SweepAxis::Bandwidth;
  if (name == "power") return SweepAxis::Power;
  if (name == "gamma") return SweepAxis::Gamma;
  if (name == "num_uts") return SweepAxis::NumUts;
  throw ConfigError("unknown sweep axis '" + name + "'");
}

const char* axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::Bandwidth: return "bandwidth";
    case SweepAxis::Power: return "power";
    case SweepAxis::Gamma: return "gamma";
    case SweepAxis::NumUts: return "num_uts";
  }
  return "?";
}

void ExperimentSpec::validate() const {
  if (values.empty()) throw ConfigError("experiment: value list must be non-empty");
  for (double v : values) {
    if (!(v > 0)) throw ConfigError("experiment: sweep values must be positive");
    if (axis == SweepAxis::NumUts && v != std::floor(v))
      throw ConfigError("experiment: num_uts values must be integers");
  }
  if (schemes.empty()) throw ConfigError("experiment: scheme list must be non-empty");
  if (trials < 1) throw ConfigError("experiment: trials must be >= 1");
}

ExperimentSpec parse_experiment_spec_json(const std::string& text,
                                          const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("experiment spec: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("experiment spec: top-level value must be an object");

  ExperimentSpec spec;
  auto require = [&j](const char* name) -> const json& {
    if (!j.contains(name))
      throw ParseError(std::string("experiment spec: missing field '") + name + "'");
    return j[name];
  };

  const json& cfg = require("config");
  if (!cfg.is_string()) throw ParseError("experiment spec: 'config' must be a path string");
  std::filesystem::path p = cfg.get<std::string>();
  if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
  spec.config_path = p.string();

  const json& axis = require("axis");
  if (!axis.is_string()) throw ParseError("experiment spec: 'axis' must be a string");
  spec.axis = axis_from_string(axis.get<std::string>());

  const json& values = require("values");
  if (!values.is_array()) throw ParseError("experiment spec: 'values' must be an array");
  for (const auto& v : values) {
    if (!v.is_number()) throw ParseError("experiment spec: 'values' entries must be numbers");
    spec.values.push_back(v.get<double>());
  }

  const json& schemes = require("schemes");
  if (!schemes.is_array()) throw ParseError("experiment spec: 'schemes' must be an array");
  for (const auto& v : schemes) {
    if (!v.is_string()) throw ParseError("experiment spec: 'schemes' entries must be strings");
    spec.schemes.push_back(scheme_from_string(v.get<std::string>()));
  }

  if (j.contains("trials")) {
    if (!j["trials"].is_number_integer())
      throw ParseError("experiment spec: 'trials' must be an integer");
    spec.trials = j["trials"].get<int>();
  }
  if (j.contains("seed_base")) {
    if (!j["seed_base"].is_number_integer())
      throw ParseError("experiment spec: 'seed_base' must be an integer");
    spec.seed_base = j["seed_base"].get<std::uint64_t>();
  }
  if (j.contains("output")) {
    if (!j["output"].is_string())
      throw ParseError("experiment spec: 'output' must be a string");
    spec.output = j["output"].get<std::string>();
  }
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("experiment spec: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_spec_json(
      ss.str(), std::filesystem::path(path).parent_path().string());
}

SystemConfig apply_axis(const SystemConfig& base, SweepAxis axis, double value) {
  SystemConfig cfg = base;
  switch (axis) {
    case SweepAxis::Bandwidth: cfg.B = value; break;
    case SweepAxis::Power: cfg.P_c = value; break;
    case SweepAxis::Gamma: cfg.Gamma_th = value; break;
    case SweepAxis::NumUts: cfg.L = static_cast<int>(value); break;
  }
  cfg.validate();
  return cfg;
}

std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec,
                                          const SystemConfig& base_cfg,
                                          int threads) {
  spec.validate();
  struct Task {
    Scheme scheme;
    double value;
    int trial;
  };
  std::vector<Task> tasks;
  for (Scheme scheme : spec.schemes)
    for (double value : spec.values)
      for (int t = 0; t < spec.trials; ++t) tasks.push_back({scheme, value, t});

  std::vector<ExperimentRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      std::size_t k = next.fetch_add(1);
      if (k >= tasks.size()) break;
      const Task& task = tasks[k];
      SystemConfig cfg = apply_axis(base_cfg, spec.axis, task.value);
      Scenario s = generate_scenario(cfg, spec.seed_base + task.trial);
      SchemeResult res = run_scheme(task.scheme, s, cfg);

      ExperimentRow& row = rows[k];
      row.scheme = scheme_name(task.scheme);
      row.axis = axis_name(spec.axis);
      row.value = task.value;
      row.trial = task.trial;
      row.total_latency_s = res.objective;
      row.mean_latency_s = res.objective / cfg.L;
      row.outer_iters = res.outer_iters;
      row.feasible = res.feasible;
    }
  };

  int nthreads = std::max(1, threads);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

std::string rows_to_csv(const std::vector<ExperimentRow>& rows) {
  std::ostringstream out;
  out << kExperimentCsvHeader << "\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%.10g,%d,%.12g,%.12g,%d,%d\n",
                  r.scheme.c_str(), r.axis.c_str(), r.value, r.trial,
                  r.mean_latency_s, r.total_latency_s, r.outer_iters,
                  r.feasible ? 1 : 0);
    out << buf;
  }
  return out.str();
}

void write_rows_csv(const std::vector<ExperimentRow>& rows,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("experiment: cannot write '" + path + "'");
  out << rows_to_csv(rows);
}

SolutionTrace emit_convergence_trace(const SystemConfig& cfg,
                                     std::uint64_t seed,
                                     const std::string& out_path,
                                     const DriverOptions& opts) {
  Scenario s = generate_scenario(cfg, seed);
  Solution sol = solve_joint(s, cfg, opts);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw ConfigError("trace: cannot write '" + out_path + "'");
    out << trace_to_csv(sol.trace);
  }
  return sol.trace;
}

}  // namespace iscc
