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

#include <string>
#include <vector>

#include "cfobe/estimation.hpp"
#include "cfobe/linalg.hpp"
#include "cfobe/montecarlo.hpp"
#include "cfobe/scenario.hpp"
#include "cfobe/uplink.hpp"

namespace cfobe {

/// Per-link DL powers p_mk and precoder normalizations, index m*K + k.
class DlPowerMap {
 public:
  DlPowerMap(int num_aps, int num_ues);

  int num_aps() const { return num_aps_; }
  int num_ues() const { return num_ues_; }

  double power(int m, int k) const { return power_[index(m, k)]; }
  double& power(int m, int k) { return power_[index(m, k)]; }
  double eta(int m, int k) const { return eta_[index(m, k)]; }
  double& eta(int m, int k) { return eta_[index(m, k)]; }

  /// Sum over UEs of p_mk at AP m.
  double ap_load(int m) const;
  /// True when AP m exceeded its budget and its powers were scaled down.
  bool ap_scaled(int m) const { return scaled_[static_cast<std::size_t>(m)] != 0; }
  void set_ap_scaled(int m) { scaled_[static_cast<std::size_t>(m)] = 1; }
  bool any_scaled() const;

 private:
  std::size_t index(int m, int k) const;

  int num_aps_, num_ues_;
  std::vector<double> power_;
  std::vector<double> eta_;
  std::vector<char> scaled_;
};

/// p_mk = p_dl beta_mk / sum_m' beta_m'k, then uniform per-AP down-scaling
/// wherever sum_k p_mk exceeds the AP budget. Normalizations start at zero.
DlPowerMap dl_power_allocation(const ChannelStatistics& stats, const ScenarioConfig& cfg);

/// Closed-form normalization for BE precoders:
/// eta_mk = sqrt(p_mk / tr(W^H W E{ĝ ĝ^H})). Throws NumericalError when the
/// denominator is zero or not finite.
void normalize_closed(DlPowerMap& power, const CombinerBank& bank, const EstimatorBank& est);

/// Sampled normalization eta_mk = sqrt(p_mk / E{||v_mk||^2}) for any
/// precoder direction source (used for LMMSE/LRZF precoding).
void normalize_mc(DlPowerMap& power, const CombinerSource& source, const ChannelStatistics& stats,
                  const PilotSetup& pilots, const EstimatorBank& est, const ScenarioConfig& cfg,
                  const McOptions& opt);

/// f_mk = eta_mk W_mk ĝ_mk.
CVector precoder(const CombinerBank& bank, const CVector& estimate, const DlPowerMap& power, int m,
                 int k);

/// Mean DL power E{||f_mk||^2} per link with its batch standard error.
struct DlPowerCheck {
  std::vector<double> mean;       // m*K + k
  std::vector<double> std_error;  // m*K + k
};

DlPowerCheck dl_transmit_power(const CombinerSource& source, const DlPowerMap& power,
                               const ChannelStatistics& stats, const PilotSetup& pilots,
                               const EstimatorBank& est, const ScenarioConfig& cfg,
                               const McOptions& opt);

/// Monte-Carlo use-and-then-forget DL SINR with f_mk = eta_mk v_mk, where
/// v_mk comes from `source`.
SeReport se_dl_mc(const CombinerSource& source, const DlPowerMap& power,
                  const ChannelStatistics& stats, const PilotSetup& pilots,
                  const EstimatorBank& est, const ScenarioConfig& cfg, const McOptions& opt);

enum class DlClosedForm {
  kCertified,  // every term built from the precoding UE's own W_ml, with the -|num|^2 term
  kLiteral,    // W_mk in the last mu trace and no -|num|^2 term
};

/// Ingredients of the closed-form DL SINR of one UE k, indexed [l][m].
struct DlClosedTerms {
  cdouble numerator{};                       // sum_m eta_mk tr(W_mk^H R̄_mk)
  std::vector<std::vector<double>> mu;
  std::vector<std::vector<double>> omega;    // zero outside the pilot coset of k
  std::vector<std::vector<cdouble>> lambda;
  double sinr = 0.0;
};

/// Closed-form DL terms for every UE. Needs normalized `power` (eta set).
std::vector<DlClosedTerms> dl_closed_terms(const CombinerBank& bank, const DlPowerMap& power,
                                           const ChannelStatistics& stats,
                                           const PilotSetup& pilots, const EstimatorBank& est,
                                           const ScenarioConfig& cfg,
                                           DlClosedForm form = DlClosedForm::kCertified);

SeReport se_dl_closed(const CombinerBank& bank, const DlPowerMap& power,
                      const ChannelStatistics& stats, const PilotSetup& pilots,
                      const EstimatorBank& est, const ScenarioConfig& cfg,
                      DlClosedForm form = DlClosedForm::kCertified);

}  // namespace cfobe
