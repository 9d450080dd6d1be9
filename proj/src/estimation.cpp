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

#include "cfobe/estimation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace cfobe {

EstimatorSpec EstimatorSpec::approx_mmse(double perturbation, std::uint64_t seed) {
  if (perturbation < 0.0) throw std::invalid_argument("ApproxMMSE: perturbation must be >= 0");
  return {EstimatorKind::kApproxMmse, perturbation, seed, {}};
}

EstimatorSpec EstimatorSpec::custom_matrices(std::vector<CMatrix> per_link) {
  return {EstimatorKind::kCustom, 0.0, 0, std::move(per_link)};
}

std::string EstimatorSpec::name() const {
  switch (kind) {
    case EstimatorKind::kMmse:
      return "MMSE";
    case EstimatorKind::kGls:
      return "GLS";
    case EstimatorKind::kApproxMmse: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "ApproxMMSE:%g", perturbation);
      return buf;
    }
    case EstimatorKind::kCustom:
      return "Custom";
  }
  return "?";
}

EstimatorSpec EstimatorSpec::parse(const std::string& text) {
  std::string upper = text;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "MMSE") return mmse();
  if (upper == "GLS") return gls();
  const std::string prefix = "APPROXMMSE:";
  if (upper.rfind(prefix, 0) == 0) {
    const std::string rest = text.substr(prefix.size());
    const auto colon = rest.find(':');
    try {
      const double eps = std::stod(rest.substr(0, colon));
      const std::uint64_t seed = colon == std::string::npos ? 0 : std::stoull(rest.substr(colon + 1));
      return approx_mmse(eps, seed);
    } catch (const std::logic_error&) {
      throw std::invalid_argument("bad ApproxMMSE parameters in '" + text + "'");
    }
  }
  throw std::invalid_argument("unknown estimator '" + text + "' (expected MMSE, GLS, ApproxMMSE:<eps>)");
}

EstimatorBank::EstimatorBank(int num_aps, int antennas, int num_ues, std::string label)
    : num_aps_(num_aps), antennas_(antennas), num_ues_(num_ues), label_(std::move(label)) {
  const auto links = static_cast<std::size_t>(num_aps * num_ues);
  a_.resize(links);
  psi_.resize(links);
  err_.resize(links);
  est_cov_.resize(links);
  second_.resize(links);
}

std::size_t EstimatorBank::index(int m, int k) const {
  if (m < 0 || m >= num_aps_ || k < 0 || k >= num_ues_) throw std::out_of_range("EstimatorBank: bad link");
  return static_cast<std::size_t>(m * num_ues_ + k);
}

void EstimatorBank::set_link(int m, int k, CMatrix a, CMatrix psi, CMatrix err, CMatrix est_cov,
                             CMatrix second) {
  const auto i = index(m, k);
  a_[i] = std::move(a);
  psi_[i] = std::move(psi);
  err_[i] = std::move(err);
  est_cov_[i] = std::move(est_cov);
  second_[i] = std::move(second);
}

CMatrix psi_matrix(const ChannelStatistics& stats, const PilotSetup& pilots,
                   const ScenarioConfig& cfg, int m, int k) {
  const int n = stats.antennas();
  CMatrix psi = cfg.noise_power_w * CMatrix::Identity(n, n);
  for (int l : pilots.coset_of(k)) psi += cfg.ul_power_w * cfg.tau_p * stats.nlos_corr(m, l);
  return psi;
}

namespace {

// √p R Ψ^{-1} computed as √p (Ψ^{-1} R)^H, valid for Hermitian R and Ψ.
CMatrix mmse_form(const CMatrix& r, const CMatrix& psi, double p) {
  Eigen::LLT<CMatrix> llt(psi);
  if (llt.info() != Eigen::Success) throw NumericalError("estimator: Psi is not positive definite", INFINITY);
  return std::sqrt(p) * llt.solve(r).adjoint();
}

CMatrix perturbed_corr(const ChannelStatistics& stats, const EstimatorSpec& spec, int m, int l) {
  const CMatrix& r = stats.nlos_corr(m, l);
  if (spec.perturbation == 0.0) return r;
  RngStream rng(spec.perturbation_seed,
                static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(stats.num_ues()) +
                    static_cast<std::uint64_t>(l));
  const CMatrix x = random_cmatrix(r.rows(), r.cols(), rng);
  CMatrix h = hermitian_part(x);
  const double hn = h.norm();
  if (hn > 0.0) h /= hn;
  return psd_project(r + spec.perturbation * r.norm() * h);
}

}  // namespace

CMatrix estimator_matrix(const EstimatorSpec& spec, const ChannelStatistics& stats,
                         const PilotSetup& pilots, const ScenarioConfig& cfg, int m, int k) {
  const int n = stats.antennas();
  const double p = cfg.ul_power_w;
  switch (spec.kind) {
    case EstimatorKind::kMmse:
      return mmse_form(stats.nlos_corr(m, k), psi_matrix(stats, pilots, cfg, m, k), p);
    case EstimatorKind::kGls:
      return CMatrix::Identity(n, n) / (std::sqrt(p) * cfg.tau_p);
    case EstimatorKind::kApproxMmse: {
      CMatrix psi_hat = cfg.noise_power_w * CMatrix::Identity(n, n);
      for (int l : pilots.coset_of(k)) psi_hat += p * cfg.tau_p * perturbed_corr(stats, spec, m, l);
      return mmse_form(perturbed_corr(stats, spec, m, k), psi_hat, p);
    }
    case EstimatorKind::kCustom: {
      const auto idx = static_cast<std::size_t>(m * stats.num_ues() + k);
      if (spec.custom.size() != static_cast<std::size_t>(stats.num_aps() * stats.num_ues())) {
        throw std::invalid_argument("Custom estimator: expected one matrix per link");
      }
      const CMatrix& a = spec.custom[idx];
      if (a.rows() != n || a.cols() != n) {
        throw std::invalid_argument("Custom estimator: matrix for link (" + std::to_string(m) + ", " +
                                    std::to_string(k) + ") is not N x N");
      }
      return a;
    }
  }
  throw std::logic_error("unreachable estimator kind");
}

CMatrix error_covariance(const CMatrix& a, const ChannelStatistics& stats,
                         const PilotSetup& pilots, const ScenarioConfig& cfg, int m, int k) {
  const CMatrix& r = stats.nlos_corr(m, k);
  const CMatrix psi = psi_matrix(stats, pilots, cfg, m, k);
  const double s = std::sqrt(cfg.ul_power_w) * cfg.tau_p;
  return r - s * r * a.adjoint() - s * a * r + static_cast<double>(cfg.tau_p) * a * psi * a.adjoint();
}

EstimatorBank build_estimator_bank(const EstimatorSpec& spec, const ChannelStatistics& stats,
                                   const PilotSetup& pilots, const ScenarioConfig& cfg) {
  EstimatorBank bank(stats.num_aps(), stats.antennas(), stats.num_ues(), spec.name());
  for (int m = 0; m < stats.num_aps(); ++m) {
    for (int k = 0; k < stats.num_ues(); ++k) {
      CMatrix a = estimator_matrix(spec, stats, pilots, cfg, m, k);
      CMatrix psi = psi_matrix(stats, pilots, cfg, m, k);
      CMatrix err = error_covariance(a, stats, pilots, cfg, m, k);
      CMatrix est_cov = hermitian_part(static_cast<double>(cfg.tau_p) * a * psi * a.adjoint());
      CMatrix second = stats.los_outer(m, k, k) + est_cov;
      bank.set_link(m, k, std::move(a), std::move(psi), std::move(err), std::move(est_cov),
                    std::move(second));
    }
  }
  return bank;
}

ChannelSampler::ChannelSampler(const ChannelStatistics& stats) : stats_(&stats) {
  factors_.reserve(static_cast<std::size_t>(stats.num_aps() * stats.num_ues()));
  for (int m = 0; m < stats.num_aps(); ++m)
    for (int k = 0; k < stats.num_ues(); ++k) factors_.push_back(psd_factor(stats.nlos_corr(m, k)));
}

ChannelRealization ChannelSampler::draw(RngStream& rng) const {
  ChannelRealization out;
  draw_into(rng, out);
  return out;
}

void ChannelSampler::draw_into(RngStream& rng, ChannelRealization& out) const {
  const int big_m = stats_->num_aps();
  const int big_k = stats_->num_ues();
  const int n = stats_->antennas();
  out.num_aps = big_m;
  out.num_ues = big_k;
  out.g.resize(static_cast<std::size_t>(big_m * big_k));
  CVector z(n);
  for (int m = 0; m < big_m; ++m) {
    for (int k = 0; k < big_k; ++k) {
      for (int i = 0; i < n; ++i) z[i] = rng.cnormal();
      out.at(m, k).noalias() = factors_[static_cast<std::size_t>(m * big_k + k)] * z;
      out.at(m, k) += stats_->los_mean(m, k);
    }
  }
}

std::vector<CVector> pilot_means(const ChannelStatistics& stats, const PilotSetup& pilots,
                                 const ScenarioConfig& cfg) {
  const double s = std::sqrt(cfg.ul_power_w) * cfg.tau_p;
  std::vector<CVector> means;
  means.reserve(static_cast<std::size_t>(stats.num_aps() * stats.num_ues()));
  for (int m = 0; m < stats.num_aps(); ++m) {
    for (int k = 0; k < stats.num_ues(); ++k) {
      CVector ybar = CVector::Zero(stats.antennas());
      for (int l : pilots.coset_of(k)) ybar += s * stats.los_mean(m, l);
      means.push_back(std::move(ybar));
    }
  }
  return means;
}

PilotObservation despread_pilot(const ChannelRealization& channels, const ChannelStatistics& stats,
                                const PilotSetup& pilots, const ScenarioConfig& cfg, RngStream& rng) {
  const int big_m = stats.num_aps();
  const int big_k = stats.num_ues();
  const int n = stats.antennas();
  const double s = std::sqrt(cfg.ul_power_w) * cfg.tau_p;
  const double noise_std = std::sqrt(cfg.tau_p * cfg.noise_power_w);

  PilotObservation obs;
  obs.num_aps = big_m;
  obs.num_ues = big_k;
  obs.y.resize(static_cast<std::size_t>(big_m * big_k));
  obs.y_mean = pilot_means(stats, pilots, cfg);
  for (int m = 0; m < big_m; ++m) {
    for (int t = 0; t < pilots.tau_p; ++t) {
      CVector y = noise_std * rng.cnormal_vector(n);
      for (int l : pilots.cosets[t]) y += s * channels.at(m, l);
      for (int k : pilots.cosets[t]) obs.y[static_cast<std::size_t>(m * big_k + k)] = y;
    }
  }
  return obs;
}

CVector estimate_channel(const CMatrix& a, const PilotObservation& obs,
                         const ChannelStatistics& stats, int m, int k) {
  return stats.los_mean(m, k) + a * (obs.received(m, k) - obs.mean(m, k));
}

std::vector<CVector> estimate_all(const EstimatorBank& bank, const PilotObservation& obs,
                                  const ChannelStatistics& stats) {
  std::vector<CVector> out;
  out.reserve(static_cast<std::size_t>(stats.num_aps() * stats.num_ues()));
  for (int m = 0; m < stats.num_aps(); ++m)
    for (int k = 0; k < stats.num_ues(); ++k) out.push_back(estimate_channel(bank.a(m, k), obs, stats, m, k));
  return out;
}

}  // namespace cfobe
