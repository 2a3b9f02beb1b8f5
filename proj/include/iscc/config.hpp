#pragma once

#include <string>

#include "iscc/common.hpp"

namespace iscc {

/// All scalar parameters of the system model. Defaults correspond to the
/// reference simulation setup; unspecified physical constants use standard
/// values (-174 dBm/Hz noise density, 1e-28 chip coefficient).
struct SystemConfig {
  int M = 3;   // base stations
  int L = 9;   // user terminals
  int N = 16;  // BS receive antennas
  int K = 12;  // UT antennas
  int d = 1;   // data streams per UT (fixed at 1)

  double B = 10e6;  // signal bandwidth, Hz

  // Noise power spectral densities, W/Hz. sigma^2 = density * B.
  double noise_density_c = 3.9810717055349565e-21;  // 10^(-20.4), comm receiver
  double noise_density_r = 3.9810717055349565e-21;  // radar receiver

  double beta = 40.0;      // CPU cycles per bit
  double epsilon = 1e-28;  // chip coefficient, W*s^3/cycles^3

  double f_L = 0.1e9;  // UT CPU frequency, cycles/s
  double f_M = 3e9;    // MEC CPU frequency allocated per UT, cycles/s
  double f_C = 10e9;   // cloud CPU frequency allocated per UT, cycles/s
  double C_m = 6e9;    // per-BS MEC compute capacity, cycles/s
  double r_c = 1e9;    // BS-to-cloud fiber rate, bits/s

  double P_c = 1.0;       // per-UT power budget, W
  double Gamma_th = 1.0;  // sensing SINR threshold, linear

  double kappa = 0.032;  // sensing data volume per unit bandwidth, bits/Hz
  double rho = 1e-3;     // path loss at 1 m reference distance, linear
  double pathloss_exponent = 2.5;
  double area_side = 500.0;        // deployment square side, m
  double target_range_max = 50.0;  // max UT-to-target distance, m
  double antenna_spacing_over_wavelength = 0.5;

  double noise_power_comm() const { return noise_density_c * B; }
  double noise_power_radar() const { return noise_density_r * B; }

  /// Sensing data volume per task, bits.
  double task_bits() const { return kappa * B; }

  /// Throws ConfigError if any invariant is violated.
  void validate() const;
};

SystemConfig load_config(const std::string& path);
void save_config(const SystemConfig& cfg, const std::string& path);

/// Parses a config from a JSON string. Unknown keys are rejected.
SystemConfig parse_config_json(const std::string& text);
std::string config_to_json(const SystemConfig& cfg);

}  // namespace iscc
