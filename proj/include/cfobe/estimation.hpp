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

#include "cfobe/linalg.hpp"
#include "cfobe/scenario.hpp"

namespace cfobe {

enum class EstimatorKind { kMmse, kGls, kApproxMmse, kCustom };

/// Selects the estimator matrix A_mk of ĝ = ḡ + A (y - ȳ).
struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::kMmse;
  double perturbation = 0.0;            // ApproxMmse: relative covariance error
  std::uint64_t perturbation_seed = 0;  // ApproxMmse: seed of the covariance error
  std::vector<CMatrix> custom;          // Custom: one N x N matrix per link, index m*K + k

  static EstimatorSpec mmse() { return {}; }
  static EstimatorSpec gls() { return {EstimatorKind::kGls, 0.0, 0, {}}; }
  static EstimatorSpec approx_mmse(double perturbation, std::uint64_t seed);
  static EstimatorSpec custom_matrices(std::vector<CMatrix> per_link);

  /// "MMSE", "GLS", "ApproxMMSE:<eps>" or "Custom".
  std::string name() const;

  /// Parses "MMSE", "GLS" or "ApproxMMSE:<eps>[:<seed>]" (case-insensitive).
  static EstimatorSpec parse(const std::string& text);
};

/// Per-link estimator matrices and the second-order statistics they induce.
class EstimatorBank {
 public:
  EstimatorBank(int num_aps, int antennas, int num_ues, std::string label);

  int num_aps() const { return num_aps_; }
  int antennas() const { return antennas_; }
  int num_ues() const { return num_ues_; }
  const std::string& label() const { return label_; }

  const CMatrix& a(int m, int k) const { return a_[index(m, k)]; }
  const CMatrix& psi(int m, int k) const { return psi_[index(m, k)]; }
  /// C_mk, covariance of g - ĝ.
  const CMatrix& error_cov(int m, int k) const { return err_[index(m, k)]; }
  /// tau_p A Psi A^H, covariance of ĝ.
  const CMatrix& estimate_cov(int m, int k) const { return est_cov_[index(m, k)]; }
  /// E{ĝ ĝ^H} = ḡ ḡ^H + tau_p A Psi A^H.
  const CMatrix& est_second_moment(int m, int k) const { return second_[index(m, k)]; }

  void set_link(int m, int k, CMatrix a, CMatrix psi, CMatrix err, CMatrix est_cov,
                CMatrix second);

 private:
  std::size_t index(int m, int k) const;

  int num_aps_;
  int antennas_;
  int num_ues_;
  std::string label_;
  std::vector<CMatrix> a_, psi_, err_, est_cov_, second_;
};

/// Psi_mk = sum_{l in P_k} p_l tau_p R_ml + sigma^2 I.
CMatrix psi_matrix(const ChannelStatistics& stats, const PilotSetup& pilots,
                   const ScenarioConfig& cfg, int m, int k);

CMatrix estimator_matrix(const EstimatorSpec& spec, const ChannelStatistics& stats,
                         const PilotSetup& pilots, const ScenarioConfig& cfg, int m, int k);

/// C = R - sqrt(p_k) tau_p R A^H - sqrt(p_k) tau_p A R + tau_p A Psi A^H.
CMatrix error_covariance(const CMatrix& a, const ChannelStatistics& stats,
                         const PilotSetup& pilots, const ScenarioConfig& cfg, int m, int k);

EstimatorBank build_estimator_bank(const EstimatorSpec& spec, const ChannelStatistics& stats,
                                   const PilotSetup& pilots, const ScenarioConfig& cfg);

/// One draw of every channel g_mk, index m*K + k.
struct ChannelRealization {
  int num_aps = 0;
  int num_ues = 0;
  std::vector<CVector> g;

  const CVector& at(int m, int k) const { return g[static_cast<std::size_t>(m * num_ues + k)]; }
  CVector& at(int m, int k) { return g[static_cast<std::size_t>(m * num_ues + k)]; }
};

/// Draws channel realizations from fixed statistics (factors precomputed once).
class ChannelSampler {
 public:
  explicit ChannelSampler(const ChannelStatistics& stats);

  ChannelRealization draw(RngStream& rng) const;
  void draw_into(RngStream& rng, ChannelRealization& out) const;

 private:
  const ChannelStatistics* stats_;
  std::vector<CMatrix> factors_;
};

/// Despread pilot signals y_mk^p and their deterministic means, index m*K + k.
struct PilotObservation {
  int num_aps = 0;
  int num_ues = 0;
  std::vector<CVector> y;
  std::vector<CVector> y_mean;

  const CVector& received(int m, int k) const { return y[static_cast<std::size_t>(m * num_ues + k)]; }
  const CVector& mean(int m, int k) const { return y_mean[static_cast<std::size_t>(m * num_ues + k)]; }
};

/// ȳ_mk = sum_{l in P_k} sqrt(p_l) tau_p ḡ_ml for every link.
std::vector<CVector> pilot_means(const ChannelStatistics& stats, const PilotSetup& pilots,
                                 const ScenarioConfig& cfg);

/// Forms y_mk = sum_{l in P_k} sqrt(p_l) tau_p g_ml + n_{m,t_k}; UEs sharing a
/// pilot see the same noise n ~ CN(0, tau_p sigma^2 I). A zero noise power
/// gives the noise-free observation.
PilotObservation despread_pilot(const ChannelRealization& channels, const ChannelStatistics& stats,
                                const PilotSetup& pilots, const ScenarioConfig& cfg, RngStream& rng);

/// ĝ_mk = ḡ_mk + A (y_mk - ȳ_mk).
CVector estimate_channel(const CMatrix& a, const PilotObservation& obs,
                         const ChannelStatistics& stats, int m, int k);

/// Every estimate at once, index m*K + k.
std::vector<CVector> estimate_all(const EstimatorBank& bank, const PilotObservation& obs,
                                  const ChannelStatistics& stats);

}  // namespace cfobe
