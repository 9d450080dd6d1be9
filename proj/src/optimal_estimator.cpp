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

struct OptBatch {
  std::vector<CVector> mean;          // E{ř_k}
  std::vector<CMatrix> interference;  // sum_l p E{z_kl z_kl^H}
  std::vector<CMatrix> pilot_cov;     // E{y_mk y_mk^H}, index m*K + k
  std::int64_t count = 0;
};

}  // namespace

OptEstimatorSystem optimal_estimator_rayleigh(const CombinerBank& bank,
                                              const ChannelStatistics& stats,
                                              const PilotSetup& pilots,
                                              const ScenarioConfig& cfg, const McOptions& opt,
                                              double loading) {
  if (!stats.is_rayleigh()) {
    throw std::invalid_argument("optimal_estimator_rayleigh: every link must have zero LoS mean");
  }
  const int big_m = stats.num_aps();
  const int big_k = stats.num_ues();
  const int n = stats.antennas();
  const Eigen::Index block = static_cast<Eigen::Index>(n) * n;
  const Eigen::Index dim = block * big_m;
  const double p = cfg.ul_power_w;
  const auto ku = static_cast<std::size_t>(big_k);
  const auto links = static_cast<std::size_t>(big_m * big_k);
  const EstimatorBank gls = build_estimator_bank(EstimatorSpec::gls(), stats, pilots, cfg);

  OptBatch sum;
  sum.mean.assign(ku, CVector::Zero(dim));
  sum.interference.assign(ku, CMatrix::Zero(dim, dim));
  sum.pilot_cov.assign(links, CMatrix::Zero(n, n));
  auto sample = [&](int, std::int64_t count, RngStream& rng) {
    OptBatch acc;
    acc.count = count;
    acc.mean.assign(ku, CVector::Zero(dim));
    acc.interference.assign(ku, CMatrix::Zero(dim, dim));
    acc.pilot_cov.assign(links, CMatrix::Zero(n, n));
    LinkDrawer draw(stats, pilots, gls, cfg);
    CMatrix z(dim, big_k);
    for (std::int64_t r = 0; r < count; ++r) {
      draw.draw(rng);
      for (int k = 0; k < big_k; ++k) {
        for (int m = 0; m < big_m; ++m) {
          const CVector& y = draw.pilot_signal(m, k);
          acc.pilot_cov[static_cast<std::size_t>(m * big_k + k)].noalias() += y * y.adjoint();
          const CMatrix wh = bank.w(m, k).adjoint();
          for (int l = 0; l < big_k; ++l) {
            z.block(m * block, l, block, 1) = vec((wh * draw.channel(m, l)) * y.adjoint());
          }
        }
        acc.mean[static_cast<std::size_t>(k)] += z.col(k);
        acc.interference[static_cast<std::size_t>(k)].noalias() += p * z * z.adjoint();
      }
    }
    return acc;
  };
  fold_batches(opt, sample, [&](int, OptBatch b) {
    sum.count += b.count;
    for (std::size_t k = 0; k < ku; ++k) {
      sum.mean[k] += b.mean[k];
      sum.interference[k] += b.interference[k];
    }
    for (std::size_t i = 0; i < links; ++i) sum.pilot_cov[i] += b.pilot_cov[i];
  });

  const double inv = 1.0 / static_cast<double>(sum.count);

  OptEstimatorSystem sys;
  std::vector<CMatrix> custom(links);
  for (int k = 0; k < big_k; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    OptEstimatorUe u;
    u.mean = inv * sum.mean[ks];
    CMatrix d = inv * sum.interference[ks];
    d.noalias() -= p * u.mean * u.mean.adjoint();
    for (int m = 0; m < big_m; ++m) {
      const CMatrix cov = inv * sum.pilot_cov[static_cast<std::size_t>(m * big_k + k)];
      const CMatrix& w = bank.w(m, k);
      d.block(m * block, m * block, block, block) +=
          cfg.noise_power_w * kron(cov.transpose(), w.adjoint() * w);
    }
    d = hermitian_part(d);
    auto best = rayleigh_quotient_max_scaled(d, u.mean, loading);
    u.a = std::move(best.x_star);
    u.sinr = p * rayleigh_quotient(d, u.mean, u.a);
    for (int m = 0; m < big_m; ++m) {
      custom[static_cast<std::size_t>(m * big_k + k)] = unvec(u.a.segment(m * block, block), n);
    }
    sys.ue.push_back(std::move(u));
  }
  sys.estimator = EstimatorSpec::custom_matrices(std::move(custom));
  return sys;
}

}  // namespace cfobe
