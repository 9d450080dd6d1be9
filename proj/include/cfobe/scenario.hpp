// Copyright 2026 The cfobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfobe/linalg.hpp"

namespace cfobe {

/// Large-scale propagation constants. Pathloss follows
/// beta[dB] = pathloss_ref_db - 10 * pathloss_exponent * log10(d / 1 m) and
/// the Rician factor kappa[dB] = rician_ref_db - rician_slope_db_per_m * d.
struct PropagationModel {
  double pathloss_ref_db = -30.5;
  double pathloss_exponent = 3.67;
  double rician_ref_db = 13.0;
  double rician_slope_db_per_m = 0.03;
  double angular_spread_deg = 10.0;  // std of the Gaussian local-scattering angle
  double antenna_spacing = 0.5;      // in wavelengths
  double min_distance_m = 10.0;
  bool rayleigh = false;             // force kappa = 0 on every link
};

struct ScenarioConfig {
  int num_aps = 10;             // M
  int antennas_per_ap = 2;      // N
  int num_ues = 4;              // K
  double area_side_m = 1000.0;
  int tau_c = 200;
  int tau_p = 1;
  double ul_power_w = 0.2;      // p_k
  double dl_power_per_ue_w = 0.2;
  double ap_power_budget_w = 0.0;  // p_m; non-positive means K * dl_power_per_ue_w
  double noise_power_w = 3.981071705534973e-13;  // -94 dBm
  PropagationModel propagation;
  std::uint64_t seed = 1;

  /// UL and DL data lengths: each block carries a single direction.
  int tau_u() const { return tau_c - tau_p; }
  int tau_d() const { return tau_c - tau_p; }
  double ap_power_budget() const;

  /// Throws std::invalid_argument on violated invariants.
  void validate() const;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Geometry {
  std::vector<Point2> aps;
  std::vector<Point2> ues;
};

/// Per-link statistics, links indexed (m, k) with m < M and k < K.
class ChannelStatistics {
 public:
  ChannelStatistics() = default;
  ChannelStatistics(int num_aps, int antennas, int num_ues);

  int num_aps() const { return num_aps_; }
  int antennas() const { return antennas_; }
  int num_ues() const { return num_ues_; }

  const CVector& los_mean(int m, int k) const { return los_[index(m, k)]; }
  const CMatrix& nlos_corr(int m, int k) const { return corr_[index(m, k)]; }
  double beta(int m, int k) const { return beta_[index(m, k)]; }
  double kappa(int m, int k) const { return kappa_[index(m, k)]; }

  void set_link(int m, int k, CVector los_mean, CMatrix nlos_corr, double beta,
                double kappa = 0.0);

  /// LoS outer product ḡ_mk ḡ_ml^H.
  CMatrix los_outer(int m, int k, int l) const;

  /// True when every LoS mean is exactly zero.
  bool is_rayleigh() const;

  /// Checks PSD-ness of every NLoS correlation; throws std::invalid_argument.
  void validate() const;

 private:
  std::size_t index(int m, int k) const;

  int num_aps_ = 0;
  int antennas_ = 0;
  int num_ues_ = 0;
  std::vector<CVector> los_;
  std::vector<CMatrix> corr_;
  std::vector<double> beta_;
  std::vector<double> kappa_;
};

/// Pilot assignment; UE and pilot indices are zero-based.
struct PilotSetup {
  int tau_p = 1;
  std::vector<int> pilot;                 // t_k in [0, tau_p)
  std::vector<std::vector<int>> cosets;   // cosets[t] = UEs sharing pilot t

  const std::vector<int>& coset_of(int k) const { return cosets[pilot[k]]; }
  bool shares_pilot(int k, int l) const { return pilot[k] == pilot[l]; }
};

Geometry generate_geometry(const ScenarioConfig& cfg);

/// Uniform-linear-array response exp(j 2 pi d n sin(theta)), n = 0..N-1.
CVector ula_steering(int antennas, double theta, double spacing);

/// Gaussian local-scattering correlation around nominal angle theta with unit
/// diagonal; angular_std = 0 yields the rank-one steering outer product.
CMatrix local_scattering_correlation(int antennas, double theta, double angular_std_rad,
                                     double spacing);

ChannelStatistics build_statistics(const Geometry& geom, const ScenarioConfig& cfg);

PilotSetup assign_pilots(const ScenarioConfig& cfg);

nlohmann::json statistics_to_json(const ChannelStatistics& stats);
ChannelStatistics statistics_from_json(const nlohmann::json& doc);
void write_statistics(const ChannelStatistics& stats, const std::string& path);
ChannelStatistics read_statistics(const std::string& path);

double dbm_to_watts(double dbm);

}  // namespace cfobe
