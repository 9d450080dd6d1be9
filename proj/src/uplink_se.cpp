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

struct UlBatch {
  std::vector<cdouble> desired;  // sum of sum_m v_mk^H g_mk
  std::vector<double> interference;  // sum of sum_l p_l |sum_m v_mk^H g_ml|^2
  std::vector<double> noise;     // sum of sum_m ||v_mk||^2
  std::int64_t count = 0;
};

double uatf_ul_sinr(cdouble mean_desired, double mean_interference, double mean_noise, double p_k,
                    double sigma2) {
  const double signal = p_k * std::norm(mean_desired);
  const double den = mean_interference - signal + sigma2 * mean_noise;
  if (signal == 0.0 || !(den > 0.0)) return 0.0;
  return signal / den;
}

}  // namespace

SeReport se_uatf_mc(const CombinerSource& source, const ChannelStatistics& stats,
                    const PilotSetup& pilots, const EstimatorBank& est, const ScenarioConfig& cfg,
                    const McOptions& opt) {
  const int big_m = stats.num_aps();
  const int big_k = stats.num_ues();
  const double p = cfg.ul_power_w;

  auto batches = run_batches(opt, [&](int, std::int64_t count, RngStream& rng) {
    UlBatch acc;
    acc.desired.assign(static_cast<std::size_t>(big_k), 0.0);
    acc.interference.assign(static_cast<std::size_t>(big_k), 0.0);
    acc.noise.assign(static_cast<std::size_t>(big_k), 0.0);
    acc.count = count;
    LinkDrawer draw(stats, pilots, est, cfg);
    std::vector<std::vector<CVector>> v(static_cast<std::size_t>(big_m));
    std::vector<cdouble> coherent(static_cast<std::size_t>(big_k));
    for (std::int64_t r = 0; r < count; ++r) {
      draw.draw(rng);
      for (int m = 0; m < big_m; ++m) source.combine(m, draw, v[static_cast<std::size_t>(m)]);
      for (int k = 0; k < big_k; ++k) {
        std::fill(coherent.begin(), coherent.end(), cdouble{});
        double noise = 0.0;
        for (int m = 0; m < big_m; ++m) {
          const CVector& vmk = v[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)];
          noise += vmk.squaredNorm();
          for (int l = 0; l < big_k; ++l) coherent[static_cast<std::size_t>(l)] += vmk.dot(draw.channel(m, l));
        }
        double interference = 0.0;
        for (int l = 0; l < big_k; ++l) interference += p * std::norm(coherent[static_cast<std::size_t>(l)]);
        acc.desired[static_cast<std::size_t>(k)] += coherent[static_cast<std::size_t>(k)];
        acc.interference[static_cast<std::size_t>(k)] += interference;
        acc.noise[static_cast<std::size_t>(k)] += noise;
      }
    }
    return acc;
  });

  SeReport report;
  report.ue.resize(static_cast<std::size_t>(big_k));
  for (int k = 0; k < big_k; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    cdouble d_tot{};
    double i_tot = 0.0, n_tot = 0.0;
    std::int64_t c_tot = 0;
    std::vector<double> batch_se;
    for (const auto& b : batches) {
      const double c = static_cast<double>(b.count);
      batch_se.push_back(spectral_efficiency(
          uatf_ul_sinr(b.desired[ks] / c, b.interference[ks] / c, b.noise[ks] / c, p, cfg.noise_power_w),
          cfg.tau_u(), cfg.tau_c));
      d_tot += b.desired[ks];
      i_tot += b.interference[ks];
      n_tot += b.noise[ks];
      c_tot += b.count;
    }
    const double c = static_cast<double>(c_tot);
    UeSe& out = report.ue[ks];
    out.sinr_mc = uatf_ul_sinr(d_tot / c, i_tot / c, n_tot / c, p, cfg.noise_power_w);
    out.se_mc = spectral_efficiency(out.sinr_mc, cfg.tau_u(), cfg.tau_c);
    out.mc_stderr = summarize_batches(batch_se).std_error;
  }
  return report;
}

CMatrix estimate_cross_moment(const ChannelStatistics& stats, const EstimatorBank& est,
                              const ScenarioConfig& cfg, int m, int k) {
  return stats.los_outer(m, k, k) +
         std::sqrt(cfg.ul_power_w) * cfg.tau_p * stats.nlos_corr(m, k) * est.a(m, k).adjoint();
}

std::vector<double> ul_closed_form_sinr(const CombinerBank& bank, const ChannelStatistics& stats,
                                        const PilotSetup& pilots, const EstimatorBank& est,
                                        const ScenarioConfig& cfg) {
  const int big_m = stats.num_aps();
  const int big_k = stats.num_ues();
  const double p = cfg.ul_power_w;
  const double tp = cfg.tau_p;
  const double sp = std::sqrt(p) * tp;
  std::vector<double> sinr(static_cast<std::size_t>(big_k), 0.0);

  for (int k = 0; k < big_k; ++k) {
    cdouble desired{};
    double noise = 0.0;
    for (int m = 0; m < big_m; ++m) {
      const CMatrix& w = bank.w(m, k);
      desired += (w.adjoint() * estimate_cross_moment(stats, est, cfg, m, k)).trace();
      noise += (w.adjoint() * w * est.est_second_moment(m, k)).trace().real();
    }

    double den = 0.0;
    for (int l = 0; l < big_k; ++l) {
      const bool copilot = pilots.shares_pilot(k, l);
      double local = 0.0;  // sum_m (eps_mkl [+ xi_mkl])
      cdouble chi_sum{};
      double chi_sq = 0.0;
      for (int m = 0; m < big_m; ++m) {
        const CMatrix& w = bank.w(m, k);
        const CMatrix& r_ml = stats.nlos_corr(m, l);
        const CMatrix g_mlk = stats.los_outer(m, l, k);  // ḡ_ml ḡ_mk^H
        // eps: tr(W^H (Ḡ_mll + R_ml) W (Ḡ_mkk + tau_p A Psi A^H)), i.e. the four
        // trace terms expanded pairwise.
        local += (w.adjoint() * (stats.los_outer(m, l, l) + r_ml) * w * est.est_second_moment(m, k))
                     .trace()
                     .real();
        cdouble chi = (w.adjoint() * g_mlk).trace();
        if (copilot) {
          const CMatrix& a = est.a(m, k);
          const cdouble t_wra = (w.adjoint() * r_ml * a.adjoint()).trace();
          const cdouble t_war = (w * a * r_ml).trace();
          const cdouble t_wg = (w * stats.los_outer(m, k, l)).trace();
          const cdouble xi = sp * chi * t_war + sp * t_wra * t_wg + p * tp * tp * std::norm(t_wra);
          local += xi.real();
          chi += sp * t_wra;  // tr(W^H B_mlk)
        }
        chi_sum += chi;
        chi_sq += std::norm(chi);
      }
      den += p * local + p * (std::norm(chi_sum) - chi_sq);
    }
    const double signal = p * std::norm(desired);
    den += -signal + cfg.noise_power_w * noise;
    sinr[static_cast<std::size_t>(k)] = (signal > 0.0 && den > 0.0) ? signal / den : 0.0;
  }
  return sinr;
}

SeReport se_closed_form_ul(const CombinerBank& bank, const ChannelStatistics& stats,
                           const PilotSetup& pilots, const EstimatorBank& est,
                           const ScenarioConfig& cfg) {
  SeReport report;
  report.estimator = est.label();
  for (double s : ul_closed_form_sinr(bank, stats, pilots, est, cfg)) {
    UeSe ue;
    ue.sinr_cf = s;
    ue.se_cf = spectral_efficiency(s, cfg.tau_u(), cfg.tau_c);
    report.ue.push_back(ue);
  }
  return report;
}

double noise_term_discrepancy(const CombinerBank& bank, const ChannelStatistics& stats,
                              const EstimatorBank& est, const ScenarioConfig& cfg) {
  double worst = 0.0;
  for (int m = 0; m < stats.num_aps(); ++m) {
    for (int k = 0; k < stats.num_ues(); ++k) {
      const CMatrix wtw = bank.w(m, k).adjoint() * bank.w(m, k);
      const double exact = (wtw * est.est_second_moment(m, k)).trace().real();
      const cdouble printed = (wtw * estimate_cross_moment(stats, est, cfg, m, k)).trace();
      if (exact > 0.0) worst = std::max(worst, std::abs(printed - exact) / exact);
    }
  }
  return worst;
}

}  // namespace cfobe
