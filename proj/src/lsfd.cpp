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

#include <cmath>

#include "cfobe/uplink.hpp"

namespace cfobe {

namespace {

struct LsfdBatch {
  std::vector<CVector> mean;          // E{v_mk^H g_mk} over m
  std::vector<CMatrix> interference;  // sum_l p E{x_kl x_kl^H}
  std::vector<RVector> noise;         // E{||v_mk||^2}
  std::int64_t count = 0;
};

}  // namespace

LsfdResult lsfd_two_layer(LocalScheme scheme, const ChannelStatistics& stats,
                          const PilotSetup& pilots, const EstimatorBank& est,
                          const ScenarioConfig& cfg, const McOptions& opt) {
  if (scheme != LocalScheme::kLmmse && scheme != LocalScheme::kLrzf && scheme != LocalScheme::kMr) {
    throw std::invalid_argument("lsfd_two_layer: local scheme must be MR, LMMSE or LRZF");
  }
  const int big_m = stats.num_aps();
  const int big_k = stats.num_ues();
  const double p = cfg.ul_power_w;
  const auto ku = static_cast<std::size_t>(big_k);
  const LocalCombinerSource local(scheme, est, cfg);

  auto batches = run_batches(opt, [&](int, std::int64_t count, RngStream& rng) {
    LsfdBatch acc;
    acc.count = count;
    acc.mean.assign(ku, CVector::Zero(big_m));
    acc.interference.assign(ku, CMatrix::Zero(big_m, big_m));
    acc.noise.assign(ku, RVector::Zero(big_m));
    LinkDrawer draw(stats, pilots, est, cfg);
    std::vector<std::vector<CVector>> v(static_cast<std::size_t>(big_m));
    CMatrix x(big_m, big_k);
    for (std::int64_t r = 0; r < count; ++r) {
      draw.draw(rng);
      for (int m = 0; m < big_m; ++m) local.combine(m, draw, v[static_cast<std::size_t>(m)]);
      for (int k = 0; k < big_k; ++k) {
        for (int m = 0; m < big_m; ++m) {
          const CVector& vmk = v[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)];
          acc.noise[static_cast<std::size_t>(k)][m] += vmk.squaredNorm();
          for (int l = 0; l < big_k; ++l) x(m, l) = vmk.dot(draw.channel(m, l));
        }
        acc.mean[static_cast<std::size_t>(k)] += x.col(k);
        acc.interference[static_cast<std::size_t>(k)].noalias() += p * x * x.adjoint();
      }
    }
    return acc;
  });

  LsfdResult result;
  std::vector<cdouble> weights(static_cast<std::size_t>(big_m * big_k));
  for (int k = 0; k < big_k; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    CVector mean = CVector::Zero(big_m);
    CMatrix inter = CMatrix::Zero(big_m, big_m);
    RVector noise = RVector::Zero(big_m);
    std::int64_t total = 0;
    for (const auto& b : batches) {
      mean += b.mean[ks];
      inter += b.interference[ks];
      noise += b.noise[ks];
      total += b.count;
    }
    const double inv = 1.0 / static_cast<double>(total);
    mean *= inv;
    CMatrix d = inv * inter;
    d.noalias() -= p * mean * mean.adjoint();
    d.diagonal() += cfg.noise_power_w * inv * noise.cast<cdouble>();
    d = hermitian_part(d);

    auto best = rayleigh_quotient_max_scaled(d, mean);
    const double norm = best.x_star.norm();
    if (norm > 0.0) best.x_star /= norm;
    result.in_sample_sinr.push_back(p * rayleigh_quotient(d, mean, best.x_star));
    result.equal_weight_sinr.push_back(p * rayleigh_quotient(d, mean, CVector::Ones(big_m)));
    for (int m = 0; m < big_m; ++m) weights[static_cast<std::size_t>(m * big_k + k)] = best.x_star[m];
    result.weights.push_back(std::move(best.x_star));
  }

  const ScaledCombinerSource effective(local, std::move(weights), big_k);
  McOptions eval = opt;
  eval.stream = opt.stream + 1;
  result.report = se_uatf_mc(effective, stats, pilots, est, cfg, eval);
  result.report.estimator = est.label();
  return result;
}

}  // namespace cfobe
