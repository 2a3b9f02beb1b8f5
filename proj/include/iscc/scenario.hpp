#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iscc/common.hpp"
#include "iscc/config.hpp"

namespace iscc {

/// One random draw of the system: geometry, channels and sensing parameters.
/// All matrices are stored with the layout used throughout the model:
/// H[m][i] is the K x N channel from UT i to BS m, Hhat[l][i] the K x K
/// interference channel from UT l into UT i's radar receiver. Hhat[i][i]
/// is left empty (0 x 0): self-interference does not exist in the model.
struct Scenario {
  std::vector<std::vector<CMat>> H;     // [M][L], each K x N
  std::vector<std::vector<CMat>> Hhat;  // [L][L], each K x K, diagonal empty
  std::vector<double> theta;            // target angle per UT, rad
  std::vector<double> dist_r;           // UT-to-target distance, m
  std::vector<double> rcs;              // radar cross-section, m^2
  std::vector<double> alpha;            // echo amplitude gain, linear
  std::vector<Vec2> bs_pos;
  std::vector<Vec2> ut_pos;
  std::vector<Vec2> target_pos;

  int num_bs() const { return static_cast<int>(H.size()); }
  int num_ut() const { return static_cast<int>(theta.size()); }
  int ut_antennas() const { return H.empty() || H[0].empty() ? 0 : static_cast<int>(H[0][0].rows()); }
  int bs_antennas() const { return H.empty() || H[0].empty() ? 0 : static_cast<int>(H[0][0].cols()); }

  /// Throws ParseError if any dimension or value invariant is violated.
  void validate() const;
};

/// Uniform linear array response toward angle theta:
/// element k = exp(j * 2*pi * k * spacing_ratio * sin(theta)), k = 0..K-1.
CVec steering_vector(double theta, int K, double spacing_ratio);

/// Draws a scenario from (cfg, seed). Deterministic: the same pair always
/// produces a bit-identical Scenario. UT and BS positions are uniform in
/// the deployment square; each UT's target is uniform in a disk of radius
/// target_range_max around it; channel entries are circularly-symmetric
/// complex Gaussian with variance rho * distance^(-pathloss_exponent).
Scenario generate_scenario(const SystemConfig& cfg, std::uint64_t seed);

void save_scenario(const Scenario& s, const std::string& path);
Scenario load_scenario(const std::string& path);

std::string scenario_to_json(const Scenario& s);
Scenario parse_scenario_json(const std::string& text);

}  // namespace iscc
