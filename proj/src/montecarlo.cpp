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

#include "cfobe/montecarlo.hpp"

namespace cfobe {

BatchSummary summarize_batches(const std::vector<double>& values) {
  BatchSummary out;
  const auto n = static_cast<double>(values.size());
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= n;
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.std_error = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

LinkDrawer::LinkDrawer(const ChannelStatistics& stats, const PilotSetup& pilots,
                       const EstimatorBank& est, const ScenarioConfig& cfg)
    : stats_(stats),
      pilots_(pilots),
      est_bank_(est),
      big_m_(stats.num_aps()),
      big_k_(stats.num_ues()),
      n_(stats.antennas()),
      pilot_scale_(std::sqrt(cfg.ul_power_w) * cfg.tau_p),
      noise_std_(std::sqrt(cfg.tau_p * cfg.noise_power_w)),
      sampler_(stats),
      y_mean_(pilot_means(stats, pilots, cfg)) {
  y_.assign(static_cast<std::size_t>(big_m_ * big_k_), CVector::Zero(n_));
  est_by_ap_.assign(static_cast<std::size_t>(big_m_),
                    std::vector<CVector>(static_cast<std::size_t>(big_k_), CVector::Zero(n_)));
}

void LinkDrawer::draw(RngStream& rng) {
  sampler_.draw_into(rng, channels_);
  CVector y(n_);
  for (int m = 0; m < big_m_; ++m) {
    for (int t = 0; t < pilots_.tau_p; ++t) {
      for (int i = 0; i < n_; ++i) y[i] = noise_std_ * rng.cnormal();
      for (int l : pilots_.cosets[static_cast<std::size_t>(t)]) y += pilot_scale_ * channels_.at(m, l);
      for (int k : pilots_.cosets[static_cast<std::size_t>(t)]) y_[idx(m, k)] = y;
    }
    for (int k = 0; k < big_k_; ++k) {
      CVector& ghat = est_by_ap_[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)];
      ghat = stats_.los_mean(m, k);
      ghat.noalias() += est_bank_.a(m, k) * (y_[idx(m, k)] - y_mean_[idx(m, k)]);
    }
  }
}

void merge_closed_form(SeReport& into, const SeReport& cf) {
  if (into.ue.size() != cf.ue.size()) throw std::invalid_argument("merge_closed_form: UE count mismatch");
  for (std::size_t k = 0; k < into.ue.size(); ++k) {
    into.ue[k].sinr_cf = cf.ue[k].sinr_cf;
    into.ue[k].se_cf = cf.ue[k].se_cf;
  }
}

double spectral_efficiency(double sinr, int tau_data, int tau_c) {
  return static_cast<double>(tau_data) / static_cast<double>(tau_c) * std::log2(1.0 + sinr);
}

}  // namespace cfobe
