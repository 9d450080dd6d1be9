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

#include <memory>
#include <string>
#include <vector>

#include "cfobe/estimation.hpp"
#include "cfobe/linalg.hpp"
#include "cfobe/montecarlo.hpp"
#include "cfobe/scenario.hpp"

namespace cfobe {

/// Statistics-level bilinear-equalizer matrices W_mk, index m*K + k.
class CombinerBank {
 public:
  CombinerBank(int num_aps, int antennas, int num_ues);

  static CombinerBank identity(int num_aps, int antennas, int num_ues);

  int num_aps() const { return num_aps_; }
  int antennas() const { return antennas_; }
  int num_ues() const { return num_ues_; }

  const CMatrix& w(int m, int k) const { return w_[index(m, k)]; }
  CMatrix& w(int m, int k) { return w_[index(m, k)]; }

 private:
  std::size_t index(int m, int k) const;

  int num_aps_, antennas_, num_ues_;
  std::vector<CMatrix> w_;
};

enum class LocalScheme { kMr, kLmmse, kLrzf, kBe };

/// Local combining vectors v_mk for every UE at AP m from the AP's estimates.
///
/// MR: v = ĝ. LMMSE: v = p (sum_l p (ĝ_l ĝ_l^H + C_ml) + sigma^2 I)^-1 ĝ_k.
/// LRZF: V = Ĝ (Ĝ^H Ĝ + sigma^2/p I)^-1. BE: v = W_mk ĝ_mk (needs `bank`).
/// When the local Gram matrix cannot be factored, diagonal loading is applied
/// and *loaded is set.
std::vector<CVector> local_combiners(LocalScheme scheme, const std::vector<CVector>& estimates_m,
                                     const EstimatorBank& est, const CombinerBank* bank,
                                     const ScenarioConfig& cfg, int m, bool* loaded = nullptr);

/// Produces the combining vectors of one AP for the current draw.
class CombinerSource {
 public:
  virtual ~CombinerSource() = default;
  virtual void combine(int m, const LinkDrawer& draw, std::vector<CVector>& out) const = 0;
};

class LocalCombinerSource : public CombinerSource {
 public:
  LocalCombinerSource(LocalScheme scheme, const EstimatorBank& est, const ScenarioConfig& cfg,
                      const CombinerBank* bank = nullptr);
  void combine(int m, const LinkDrawer& draw, std::vector<CVector>& out) const override;

 private:
  LocalScheme scheme_;
  const EstimatorBank& est_;
  const ScenarioConfig& cfg_;
  const CombinerBank* bank_;
  std::vector<CMatrix> lmmse_bases_;  // sum_l p C_ml + sigma^2 I per AP
};

/// Wraps another source and multiplies v_mk by a per-link complex weight.
class ScaledCombinerSource : public CombinerSource {
 public:
  ScaledCombinerSource(const CombinerSource& inner, std::vector<cdouble> weights, int num_ues);
  void combine(int m, const LinkDrawer& draw, std::vector<CVector>& out) const override;

 private:
  const CombinerSource& inner_;
  std::vector<cdouble> weights_;
  int num_ues_;
};

/// Monte-Carlo estimate of the use-and-then-forget UL SINR, expectations
/// replaced by sample means. Standard errors come from the batch means.
SeReport se_uatf_mc(const CombinerSource& source, const ChannelStatistics& stats,
                    const PilotSetup& pilots, const EstimatorBank& est, const ScenarioConfig& cfg,
                    const McOptions& opt);

/// Closed-form UL SINR of every UE for a BE combiner bank.
std::vector<double> ul_closed_form_sinr(const CombinerBank& bank, const ChannelStatistics& stats,
                                        const PilotSetup& pilots, const EstimatorBank& est,
                                        const ScenarioConfig& cfg);

SeReport se_closed_form_ul(const CombinerBank& bank, const ChannelStatistics& stats,
                           const PilotSetup& pilots, const EstimatorBank& est,
                           const ScenarioConfig& cfg);

/// R̄_mk = E{g_mk ĝ_mk^H} = ḡ_mk ḡ_mk^H + sqrt(p_k) tau_p R_mk A_mk^H.
CMatrix estimate_cross_moment(const ChannelStatistics& stats, const EstimatorBank& est,
                              const ScenarioConfig& cfg, int m, int k);

/// Largest relative gap, over all links, between tr(W^H W R̄_mk) and the
/// exact noise term tr(W^H W E{ĝ ĝ^H}). Zero for MMSE-type estimators.
double noise_term_discrepancy(const CombinerBank& bank, const ChannelStatistics& stats,
                              const EstimatorBank& est, const ScenarioConfig& cfg);

/// Stacked quadratic-form system of one UE: SINR(w) =
/// p_k |w^H mean|^2 / (w^H (interference - p_k mean mean^H + sigma^2 noise) w).
struct ObeUeSystem {
  CVector mean;          // E{p_k}, MN^2
  CMatrix interference;  // sum_l p_l E{q_kl q_kl^H}
  CMatrix noise;         // Xi_k
  CVector w;             // maximizer, stacked vec(W_mk)
  double sinr = 0.0;     // maximum SINR
};

struct ObeSystem {
  std::vector<ObeUeSystem> ue;
  CombinerBank bank;
};

/// Denominator matrix of the stacked SINR quotient.
CMatrix obe_denominator(const ObeUeSystem& sys, double p_k, double noise_power);

/// SINR of a stacked BE vector under a given system.
double obe_sinr_of(const ObeUeSystem& sys, const CVector& w, double p_k, double noise_power);

/// Unstacks w (MN^2) into the per-AP matrices W_mk of UE k.
void unstack_into(const CVector& w, int k, CombinerBank& bank);
CVector stack_bank(const CombinerBank& bank, int k);

/// OBE combiners from closed-form statistics.
ObeSystem obe_closed(const ChannelStatistics& stats, const PilotSetup& pilots,
                     const EstimatorBank& est, const ScenarioConfig& cfg,
                     double loading = kDefaultLoading);

/// OBE combiners from sampled moments of (g, ĝ).
ObeSystem obe_mc(const ChannelStatistics& stats, const PilotSetup& pilots,
                 const EstimatorBank& est, const ScenarioConfig& cfg, const McOptions& opt,
                 double loading = kDefaultLoading);

struct LsfdResult {
  SeReport report;                       // MC columns, evaluated on fresh draws
  std::vector<CVector> weights;          // per UE, length M
  std::vector<double> in_sample_sinr;    // optimal quotient on the statistics draws
  std::vector<double> equal_weight_sinr; // all-ones weights on the same draws
};

/// Two-layer processing: local LMMSE/LRZF combining, then per-UE CPU weights
/// maximizing the UatF SINR from Monte-Carlo statistics. Statistics use
/// stream opt.stream, evaluation uses opt.stream + 1.
LsfdResult lsfd_two_layer(LocalScheme scheme, const ChannelStatistics& stats,
                          const PilotSetup& pilots, const EstimatorBank& est,
                          const ScenarioConfig& cfg, const McOptions& opt);

/// Estimator matrices that maximize the UL SINR for a fixed BE bank, valid
/// only when every link is Rayleigh.
struct OptEstimatorUe {
  CVector mean;   // E{ř_k}
  CVector a;      // stacked vec(A_mk)
  double sinr = 0.0;
};

struct OptEstimatorSystem {
  std::vector<OptEstimatorUe> ue;
  EstimatorSpec estimator;  // Custom spec with the optimized A_mk
};

OptEstimatorSystem optimal_estimator_rayleigh(const CombinerBank& bank,
                                              const ChannelStatistics& stats,
                                              const PilotSetup& pilots,
                                              const ScenarioConfig& cfg, const McOptions& opt,
                                              double loading = kDefaultLoading);

}  // namespace cfobe
