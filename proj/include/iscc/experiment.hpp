#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "iscc/baselines.hpp"

namespace iscc {

enum class SweepAxis { Bandwidth, Power, Gamma, NumUts };

SweepAxis axis_from_string(const std::string& name);  // throws ConfigError
const char* axis_name(SweepAxis a);

/// Declarative description of one experiment: sweep an axis over a value
/// list, run each scheme for `trials` seeded scenarios per point, and emit
/// one CSV row per (scheme, value, trial).
struct ExperimentSpec {
  std::string config_path;
  SweepAxis axis = SweepAxis::Power;
  std::vector<double> values;
  std::vector<Scheme> schemes;
  int trials = 1;
  std::uint64_t seed_base = 0;
  std::string output;

  void validate() const;  // throws ConfigError
};

ExperimentSpec load_experiment_spec(const std::string& path);
ExperimentSpec parse_experiment_spec_json(const std::string& text,
                                          const std::string& base_dir);

/// Applies one sweep value to a copy of the base config.
SystemConfig apply_axis(const SystemConfig& base, SweepAxis axis, double value);

struct ExperimentRow {
  std::string scheme;
  std::string axis;
  double value = 0.0;
  int trial = 0;
  double mean_latency_s = 0.0;
  double total_latency_s = 0.0;
  int outer_iters = 0;
  bool feasible = false;
};

inline const char* kExperimentCsvHeader =
    "scheme,axis,value,trial,mean_latency_s,total_latency_s,outer_iters,feasible";

/// Runs every (scheme, value, trial) combination; trial t uses seed
/// seed_base + t so reruns are byte-identical. Tasks may execute on
/// `threads` workers; rows are emitted in deterministic order regardless.
std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec,
                                          const SystemConfig& base_cfg,
                                          int threads = 1);

std::string rows_to_csv(const std::vector<ExperimentRow>& rows);
void write_rows_csv(const std::vector<ExperimentRow>& rows,
                    const std::string& path);

/// Runs the joint design once and writes its per-iteration objective trace.
SolutionTrace emit_convergence_trace(const SystemConfig& cfg,
                                     std::uint64_t seed,
                                     const std::string& out_path,
                                     const DriverOptions& opts = {});

}  // namespace iscc
