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

#include "cfobe/downlink.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cfobe {

DlPowerMap::DlPowerMap(int num_aps, int num_ues)
    : num_aps_(num_aps),
      num_ues_(num_ues),
      power_(static_cast<std::size_t>(num_aps * num_ues), 0.0),
      eta_(static_cast<std::size_t>(num_aps * num_ues), 0.0),
      scaled_(static_cast<std::size_t>(num_aps), 0) {
  if (num_aps < 1 || num_ues < 1) throw std::invalid_argument("DlPowerMap: empty dimensions");
}

std::size_t DlPowerMap::index(int m, int k) const {
  if (m < 0 || m >= num_aps_ || k < 0 || k >= num_ues_) throw std::out_of_range("DlPowerMap: link index");
  return static_cast<std::size_t>(m * num_ues_ + k);
}

double DlPowerMap::ap_load(int m) const {
  double s = 0.0;
  for (int k = 0; k < num_ues_; ++k) s += power(m, k);
  return s;
}

bool DlPowerMap::any_scaled() const {
  for (char c : scaled_) {
    if (c) return true;
  }
  return false;
}

DlPowerMap dl_power_allocation(const ChannelStatistics& stats, const ScenarioConfig& cfg) {
  const int big_m = stats.num_aps();
  const int big_k = stats.num_ues();
  DlPowerMap map(big_m, big_k);
  for (int k = 0; k < big_k; ++k) {
    double total = 0.0;
    for (int m = 0; m < big_m; ++m) total += stats.beta(m, k);
    for (int m = 0; m < big_m; ++m) {
      map.power(m, k) = total > 0.0 ? cfg.dl_power_per_ue_w * stats.beta(m, k) / total
                                    : cfg.dl_power_per_ue_w / big_m;
    }
  }
  const double budget = cfg.ap_power_budget();
  for (int m = 0; m < big_m; ++m) {
    const double load = map.ap_load(m);
    if (load > budget) {
      for (int k = 0; k < big_k; ++k) map.power(m, k) *= budget / load;
      map.set_ap_scaled(m);
    }
  }
  return map;
}

void normalize_closed(DlPowerMap& power, const CombinerBank& bank, const EstimatorBank& est) {
  for (int m = 0; m < power.num_aps(); ++m) {
    for (int k = 0; k < power.num_ues(); ++k) {
      const CMatrix& w = bank.w(m, k);
      const double den = (w.adjoint() * w * est.est_second_moment(m, k)).trace().real();
      if (!(den > 0.0) || !std::isfinite(den)) {
        throw NumericalError("normalize_closed: zero precoder power at AP " + std::to_string(m) +
                                 ", UE " + std::to_string(k),
                             std::numeric_limits<double>::infinity());
      }
      power.eta(m, k) = std::sqrt(power.power(m, k) / den);
    }
  }
}

namespace {

struct PowerBatch {
  std::vector<double> sum;  // m*K + k
  std::int64_t count = 0;
};

std::vector<PowerBatch> sample_direction_power(const CombinerSource& source,
                                               const ChannelStatistics& stats,
                                               const PilotSetup& pilots, const EstimatorBank& est,
                                               const ScenarioConfig& cfg, const McOptions& opt) {
  const int big_m = stats.num_aps();
  const int big_k = stats.num_ues();
  return run_batches(opt, [&](int, std::int64_t count, RngStream& rng) {
    PowerBatch acc;
    acc.count = count;
    acc.sum.assign(static_cast<std::size_t>(big_m * big_k), 0.0);
    LinkDrawer draw(stats, pilots, est, cfg);
    std::vector<CVector> v;
    for (std::int64_t r = 0; r < count; ++r) {
      draw.draw(rng);
      for (int m = 0; m < big_m; ++m) {
        source.combine(m, draw, v);
        for (int k = 0; k < big_k; ++k) acc.sum[static_cast<std::size_t>(m * big_k + k)] += v[static_cast<std::size_t>(k)].squaredNorm();
      }
    }
    return acc;
  });
}

}  // namespace

void normalize_mc(DlPowerMap& power, const CombinerSource& source, const ChannelStatistics& stats,
                  const PilotSetup& pilots, const EstimatorBank& est, const ScenarioConfig& cfg,
                  const McOptions& opt) {
  const auto batches = sample_direction_power(source, stats, pilots, est, cfg, opt);
  const int big_k = power.num_ues();
  for (int m = 0; m < power.num_aps(); ++m) {
    for (int k = 0; k < big_k; ++k) {
      double sum = 0.0;
      std::int64_t count = 0;
      for (const auto& b : batches) {
        sum += b.sum[static_cast<std::size_t>(m * big_k + k)];
        count += b.count;
      }
      const double mean = sum / static_cast<double>(count);
      if (!(mean > 0.0) || !std::isfinite(mean)) {
        throw NumericalError("normalize_mc: zero precoder power at AP " + std::to_string(m) +
                                 ", UE " + std::to_string(k),
                             std::numeric_limits<double>::infinity());
      }
      power.eta(m, k) = std::sqrt(power.power(m, k) / mean);
    }
  }
}

CVector precoder(const CombinerBank& bank, const CVector& estimate, const DlPowerMap& power, int m,
                 int k) {
  const double eta = power.eta(m, k);
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw NumericalError("precoder: normalization must be finite and positive",
                         std::numeric_limits<double>::infinity());
  }
  return eta * (bank.w(m, k) * estimate);
}

DlPowerCheck dl_transmit_power(const CombinerSource& source, const DlPowerMap& power,
                               const ChannelStatistics& stats, const PilotSetup& pilots,
                               const EstimatorBank& est, const ScenarioConfig& cfg,
                               const McOptions& opt) {
  const auto batches = sample_direction_power(source, stats, pilots, est, cfg, opt);
  const int big_k = power.num_ues();
  const auto links = static_cast<std::size_t>(power.num_aps() * big_k);
  DlPowerCheck out{std::vector<double>(links), std::vector<double>(links)};
  for (int m = 0; m < power.num_aps(); ++m) {
    for (int k = 0; k < big_k; ++k) {
      const auto i = static_cast<std::size_t>(m * big_k + k);
      const double e2 = power.eta(m, k) * power.eta(m, k);
      std::vector<double> means;
      for (const auto& b : batches) means.push_back(e2 * b.sum[i] / static_cast<double>(b.count));
      const auto s = summarize_batches(means);
      out.mean[i] = s.mean;
      out.std_error[i] = s.std_error;
    }
  }
  return out;
}

namespace {

struct DlBatch {
  std::vector<cdouble> desired;       // sum_m f_mk^H g_mk
  std::vector<double> received;       // sum_l |sum_m f_ml^H g_mk|^2
  std::int64_t count = 0;
};

double uatf_dl_sinr(cdouble mean_desired, double mean_received, double sigma2) {
  const double signal = std::norm(mean_desired);
  const double den = mean_received - signal + sigma2;
  if (signal == 0.0 || !(den > 0.0)) return 0.0;
  return signal / den;
}

}  // namespace

SeReport se_dl_mc(const CombinerSource& source, const DlPowerMap& power,
                  const ChannelStatistics& stats, const PilotSetup& pilots,
                  const EstimatorBank& est, const ScenarioConfig& cfg, const McOptions& opt) {
  const int big_m = stats.num_aps();
  const int big_k = stats.num_ues();
  const auto ku = static_cast<std::size_t>(big_k);

  auto batches = run_batches(opt, [&](int, std::int64_t count, RngStream& rng) {
    DlBatch acc;
    acc.count = count;
    acc.desired.assign(ku, 0.0);
    acc.received.assign(ku, 0.0);
    LinkDrawer draw(stats, pilots, est, cfg);
    std::vector<CVector> v;
    CMatrix x(big_k, big_k);  // x(l, k) = sum_m f_ml^H g_mk
    for (std::int64_t r = 0; r < count; ++r) {
      draw.draw(rng);
      x.setZero();
      for (int m = 0; m < big_m; ++m) {
        source.combine(m, draw, v);
        for (int l = 0; l < big_k; ++l) {
          const double eta = power.eta(m, l);
          for (int k = 0; k < big_k; ++k) x(l, k) += eta * v[static_cast<std::size_t>(l)].dot(draw.channel(m, k));
        }
      }
      for (int k = 0; k < big_k; ++k) {
        acc.desired[static_cast<std::size_t>(k)] += x(k, k);
        acc.received[static_cast<std::size_t>(k)] += x.col(k).squaredNorm();
      }
    }
    return acc;
  });

  SeReport report;
  report.estimator = est.label();
  report.ue.resize(ku);
  for (int k = 0; k < big_k; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    cdouble d_tot{};
    double r_tot = 0.0;
    std::int64_t c_tot = 0;
    std::vector<double> batch_se;
    for (const auto& b : batches) {
      const double c = static_cast<double>(b.count);
      batch_se.push_back(spectral_efficiency(
          uatf_dl_sinr(b.desired[ks] / c, b.received[ks] / c, cfg.noise_power_w), cfg.tau_d(), cfg.tau_c));
      d_tot += b.desired[ks];
      r_tot += b.received[ks];
      c_tot += b.count;
    }
    const double c = static_cast<double>(c_tot);
    UeSe& out = report.ue[ks];
    out.sinr_mc = uatf_dl_sinr(d_tot / c, r_tot / c, cfg.noise_power_w);
    out.se_mc = spectral_efficiency(out.sinr_mc, cfg.tau_d(), cfg.tau_c);
    out.mc_stderr = summarize_batches(batch_se).std_error;
  }
  return report;
}

std::vector<DlClosedTerms> dl_closed_terms(const CombinerBank& bank, const DlPowerMap& power,
                                           const ChannelStatistics& stats,
                                           const PilotSetup& pilots, const EstimatorBank& est,
                                           const ScenarioConfig& cfg, DlClosedForm form) {
  const int big_m = stats.num_aps();
  const int big_k = stats.num_ues();
  const double p = cfg.ul_power_w;
  const double tp = cfg.tau_p;
  const double sp = std::sqrt(p) * tp;
  const auto ku = static_cast<std::size_t>(big_k);
  const auto mu_size = static_cast<std::size_t>(big_m);

  std::vector<DlClosedTerms> out(ku);
  for (int k = 0; k < big_k; ++k) {
    DlClosedTerms& t = out[static_cast<std::size_t>(k)];
    t.mu.assign(ku, std::vector<double>(mu_size, 0.0));
    t.omega.assign(ku, std::vector<double>(mu_size, 0.0));
    t.lambda.assign(ku, std::vector<cdouble>(mu_size, 0.0));
    for (int m = 0; m < big_m; ++m) {
      t.numerator += power.eta(m, k) * (bank.w(m, k).adjoint() * estimate_cross_moment(stats, est, cfg, m, k)).trace();
    }

    double den = 0.0;
    for (int l = 0; l < big_k; ++l) {
      const auto ls = static_cast<std::size_t>(l);
      const bool copilot = pilots.shares_pilot(k, l);
      cdouble lambda_sum{};
      double lambda_sq = 0.0;
      for (int m = 0; m < big_m; ++m) {
        const auto ms = static_cast<std::size_t>(m);
        const CMatrix& w = bank.w(m, l);
        const double e2 = power.eta(m, l) * power.eta(m, l);
        const CMatrix& r_k = stats.nlos_corr(m, k);
        const CMatrix g_kk = stats.los_outer(m, k, k);
        const CMatrix g_ll = stats.los_outer(m, l, l);
        const CMatrix& r_tilde = est.estimate_cov(m, l);
        double mu = (w.adjoint() * g_kk * w * g_ll).trace().real() +
                    (w.adjoint() * r_k * w * r_tilde).trace().real() +
                    (w.adjoint() * r_k * w * g_ll).trace().real();
        if (form == DlClosedForm::kLiteral) {
          mu += (w.adjoint() * g_kk * bank.w(m, k) * r_tilde).trace().real();
        } else {
          mu += (w.adjoint() * g_kk * w * r_tilde).trace().real();
        }
        t.mu[ls][ms] = e2 * mu;

        const cdouble t_wg = (w.adjoint() * stats.los_outer(m, k, l)).trace();  // tr(W^H Ḡ_mkl)
        cdouble lambda = t_wg;
        if (copilot) {
          const CMatrix& a = est.a(m, l);
          const cdouble t_wra = (w.adjoint() * r_k * a.adjoint()).trace();
          const cdouble t_war = (w * a * r_k).trace();
          const cdouble t_wg_conj = (w * stats.los_outer(m, l, k)).trace();
          const cdouble omega = sp * t_wra * t_wg_conj + sp * t_wg * t_war + p * tp * tp * std::norm(t_wra);
          t.omega[ls][ms] = e2 * omega.real();
          lambda += sp * t_wra;
        }
        lambda *= power.eta(m, l);
        t.lambda[ls][ms] = lambda;
        lambda_sum += lambda;
        lambda_sq += std::norm(lambda);
        den += t.mu[ls][ms] + t.omega[ls][ms];
      }
      den += std::norm(lambda_sum) - lambda_sq;
    }
    const double signal = std::norm(t.numerator);
    if (form == DlClosedForm::kCertified) den -= signal;
    den += cfg.noise_power_w;
    t.sinr = (signal > 0.0 && den > 0.0) ? signal / den : 0.0;
  }
  return out;
}

SeReport se_dl_closed(const CombinerBank& bank, const DlPowerMap& power,
                      const ChannelStatistics& stats, const PilotSetup& pilots,
                      const EstimatorBank& est, const ScenarioConfig& cfg, DlClosedForm form) {
  SeReport report;
  report.estimator = est.label();
  for (const auto& t : dl_closed_terms(bank, power, stats, pilots, est, cfg, form)) {
    UeSe ue;
    ue.sinr_cf = t.sinr;
    ue.se_cf = spectral_efficiency(t.sinr, cfg.tau_d(), cfg.tau_c);
    report.ue.push_back(ue);
  }
  return report;
}

}  // namespace cfobe
