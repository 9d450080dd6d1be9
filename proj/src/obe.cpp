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

CMatrix obe_denominator(const ObeUeSystem& sys, double p_k, double noise_power) {
  CMatrix d = sys.interference;
  d.noalias() -= p_k * sys.mean * sys.mean.adjoint();
  d += noise_power * sys.noise;
  return hermitian_part(d);
}

double obe_sinr_of(const ObeUeSystem& sys, const CVector& w, double p_k, double noise_power) {
  const double den = w.dot(obe_denominator(sys, p_k, noise_power) * w).real();
  const double num = p_k * std::norm(w.dot(sys.mean));
  if (num == 0.0 || !(den > 0.0)) return 0.0;
  return num / den;
}

void unstack_into(const CVector& w, int k, CombinerBank& bank) {
  const Eigen::Index n = bank.antennas();
  const Eigen::Index block = n * n;
  if (w.size() != block * bank.num_aps()) throw std::invalid_argument("unstack_into: length mismatch");
  for (int m = 0; m < bank.num_aps(); ++m) bank.w(m, k) = unvec(w.segment(m * block, block), n);
}

CVector stack_bank(const CombinerBank& bank, int k) {
  const Eigen::Index block = static_cast<Eigen::Index>(bank.antennas()) * bank.antennas();
  CVector w(block * bank.num_aps());
  for (int m = 0; m < bank.num_aps(); ++m) w.segment(m * block, block) = vec(bank.w(m, k));
  return w;
}

namespace {

void solve_systems(ObeSystem& sys, const ScenarioConfig& cfg, double loading) {
  const double p = cfg.ul_power_w;
  for (std::size_t k = 0; k < sys.ue.size(); ++k) {
    ObeUeSystem& u = sys.ue[k];
    const CMatrix d = obe_denominator(u, p, cfg.noise_power_w);
    auto best = rayleigh_quotient_max_scaled(d, u.mean, loading);
    const double norm = best.x_star.norm();
    if (norm > 0.0) best.x_star /= norm;
    u.w = std::move(best.x_star);
    u.sinr = obe_sinr_of(u, u.w, p, cfg.noise_power_w);
    unstack_into(u.w, static_cast<int>(k), sys.bank);
  }
}

}  // namespace

ObeSystem obe_closed(const ChannelStatistics& stats, const PilotSetup& pilots,
                     const EstimatorBank& est, const ScenarioConfig& cfg, double loading) {
  const int big_m = stats.num_aps();
  const int big_k = stats.num_ues();
  const int n = stats.antennas();
  const Eigen::Index block = static_cast<Eigen::Index>(n) * n;
  const Eigen::Index dim = block * big_m;
  const double p = cfg.ul_power_w;
  const double sp = std::sqrt(p) * cfg.tau_p;

  ObeSystem sys{std::vector<ObeUeSystem>(static_cast<std::size_t>(big_k)),
                CombinerBank(big_m, n, big_k)};
  const CMatrix eye = CMatrix::Identity(n, n);
  for (int k = 0; k < big_k; ++k) {
    ObeUeSystem& u = sys.ue[static_cast<std::size_t>(k)];
    u.mean = CVector::Zero(dim);
    u.interference = CMatrix::Zero(dim, dim);
    u.noise = CMatrix::Zero(dim, dim);
    for (int m = 0; m < big_m; ++m) {
      u.mean.segment(m * block, block) = vec(estimate_cross_moment(stats, est, cfg, m, k));
      u.noise.block(m * block, m * block, block, block) = kron(est.est_second_moment(m, k).transpose(), eye);
    }
    for (int l = 0; l < big_k; ++l) {
      // E{q q^H} with q_m = vec(g_ml ĝ_mk^H): per-AP block
      // E_mk^T (x) (Ḡ_mll + R_ml) - vec(Ḡ_mlk) vec(Ḡ_mlk)^H, plus b b^H over the
      // stacked means b_m = vec(E{g_ml ĝ_mk^H}).
      const bool copilot = pilots.shares_pilot(k, l);
      CVector b(dim);
      for (int m = 0; m < big_m; ++m) {
        const CMatrix g_lk = stats.los_outer(m, l, k);
        const CVector gv = vec(g_lk);
        CMatrix mean_lk = g_lk;
        if (copilot) mean_lk += sp * stats.nlos_corr(m, l) * est.a(m, k).adjoint();
        b.segment(m * block, block) = vec(mean_lk);
        auto blk = u.interference.block(m * block, m * block, block, block);
        blk += p * kron(est.est_second_moment(m, k).transpose(), stats.los_outer(m, l, l) + stats.nlos_corr(m, l));
        blk.noalias() -= p * gv * gv.adjoint();
      }
      u.interference.noalias() += p * b * b.adjoint();
    }
  }
  solve_systems(sys, cfg, loading);
  return sys;
}

namespace {

struct ObeBatch {
  std::vector<CVector> mean;
  std::vector<CMatrix> interference;
  std::vector<CMatrix> second;  // per link E{ĝ ĝ^H}, index m*K + k
  std::int64_t count = 0;
};

}  // namespace

ObeSystem obe_mc(const ChannelStatistics& stats, const PilotSetup& pilots,
                 const EstimatorBank& est, const ScenarioConfig& cfg, const McOptions& opt,
                 double loading) {
  const int big_m = stats.num_aps();
  const int big_k = stats.num_ues();
  const int n = stats.antennas();
  const Eigen::Index block = static_cast<Eigen::Index>(n) * n;
  const Eigen::Index dim = block * big_m;
  const double p = cfg.ul_power_w;
  const auto ku = static_cast<std::size_t>(big_k);

  std::int64_t total = 0;
  ObeBatch sum;
  sum.mean.assign(ku, CVector::Zero(dim));
  sum.interference.assign(ku, CMatrix::Zero(dim, dim));
  sum.second.assign(static_cast<std::size_t>(big_m * big_k), CMatrix::Zero(n, n));
  auto sample = [&](int, std::int64_t count, RngStream& rng) {
    ObeBatch acc;
    acc.count = count;
    acc.mean.assign(ku, CVector::Zero(dim));
    acc.interference.assign(ku, CMatrix::Zero(dim, dim));
    acc.second.assign(static_cast<std::size_t>(big_m * big_k), CMatrix::Zero(n, n));
    LinkDrawer draw(stats, pilots, est, cfg);
    CMatrix q(dim, big_k);
    for (std::int64_t r = 0; r < count; ++r) {
      draw.draw(rng);
      for (int k = 0; k < big_k; ++k) {
        for (int m = 0; m < big_m; ++m) {
          const CVector& gh = draw.estimate(m, k);
          acc.second[static_cast<std::size_t>(m * big_k + k)].noalias() += gh * gh.adjoint();
          for (int l = 0; l < big_k; ++l) {
            q.block(m * block, l, block, 1) = vec(draw.channel(m, l) * gh.adjoint());
          }
        }
        acc.mean[static_cast<std::size_t>(k)] += q.col(k);
        acc.interference[static_cast<std::size_t>(k)].noalias() += p * q * q.adjoint();
      }
    }
    return acc;
  };
  fold_batches(opt, sample, [&](int, ObeBatch b) {
    total += b.count;
    for (std::size_t k = 0; k < ku; ++k) {
      sum.mean[k] += b.mean[k];
      sum.interference[k] += b.interference[k];
    }
    for (std::size_t i = 0; i < sum.second.size(); ++i) sum.second[i] += b.second[i];
  });
  const double inv = 1.0 / static_cast<double>(total);

  ObeSystem sys{std::vector<ObeUeSystem>(ku), CombinerBank(big_m, n, big_k)};
  const CMatrix eye = CMatrix::Identity(n, n);
  for (int k = 0; k < big_k; ++k) {
    ObeUeSystem& u = sys.ue[static_cast<std::size_t>(k)];
    u.mean = inv * sum.mean[static_cast<std::size_t>(k)];
    u.interference = hermitian_part(inv * sum.interference[static_cast<std::size_t>(k)]);
    u.noise = CMatrix::Zero(dim, dim);
    for (int m = 0; m < big_m; ++m) {
      const CMatrix e = inv * sum.second[static_cast<std::size_t>(m * big_k + k)];
      u.noise.block(m * block, m * block, block, block) = kron(e.transpose(), eye);
    }
  }
  solve_systems(sys, cfg, loading);
  return sys;
}

}  // namespace cfobe
