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

#include "cfobe/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace cfobe {

namespace {

// Fixed stream ids so that geometry and LoS phases never share draws.
constexpr std::uint64_t kGeometryStream = 0x67656f6d;
constexpr std::uint64_t kLosPhaseStream = 0x6c6f7370;

}  // namespace

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double ScenarioConfig::ap_power_budget() const {
  return ap_power_budget_w > 0.0 ? ap_power_budget_w : num_ues * dl_power_per_ue_w;
}

void ScenarioConfig::validate() const {
  if (num_aps < 1 || antennas_per_ap < 1 || num_ues < 1) {
    throw std::invalid_argument("scenario: M, N and K must all be >= 1");
  }
  if (tau_p < 1) throw std::invalid_argument("scenario: tau_p must be >= 1");
  if (tau_c < tau_p + 1) throw std::invalid_argument("scenario: tau_c must be >= tau_p + 1");
  if (!(ul_power_w > 0.0) || !(dl_power_per_ue_w > 0.0) || !(noise_power_w > 0.0) ||
      !(ap_power_budget() > 0.0)) {
    throw std::invalid_argument("scenario: all powers must be positive");
  }
  if (!(area_side_m > 0.0)) throw std::invalid_argument("scenario: area side must be positive");
  if (propagation.angular_spread_deg < 0.0) {
    throw std::invalid_argument("scenario: angular spread must be non-negative");
  }
}

ChannelStatistics::ChannelStatistics(int num_aps, int antennas, int num_ues)
    : num_aps_(num_aps), antennas_(antennas), num_ues_(num_ues) {
  const auto links = static_cast<std::size_t>(num_aps) * static_cast<std::size_t>(num_ues);
  los_.assign(links, CVector::Zero(antennas));
  corr_.assign(links, CMatrix::Zero(antennas, antennas));
  beta_.assign(links, 0.0);
  kappa_.assign(links, 0.0);
}

std::size_t ChannelStatistics::index(int m, int k) const {
  if (m < 0 || m >= num_aps_ || k < 0 || k >= num_ues_) {
    throw std::out_of_range("ChannelStatistics: link (" + std::to_string(m) + ", " +
                            std::to_string(k) + ") out of range");
  }
  return static_cast<std::size_t>(m) * static_cast<std::size_t>(num_ues_) +
         static_cast<std::size_t>(k);
}

void ChannelStatistics::set_link(int m, int k, CVector los_mean, CMatrix nlos_corr, double beta,
                                 double kappa) {
  if (los_mean.size() != antennas_ || nlos_corr.rows() != antennas_ ||
      nlos_corr.cols() != antennas_) {
    throw std::invalid_argument("ChannelStatistics::set_link: dimension mismatch");
  }
  const auto i = index(m, k);
  los_[i] = std::move(los_mean);
  corr_[i] = std::move(nlos_corr);
  beta_[i] = beta;
  kappa_[i] = kappa;
}

CMatrix ChannelStatistics::los_outer(int m, int k, int l) const {
  return los_mean(m, k) * los_mean(m, l).adjoint();
}

bool ChannelStatistics::is_rayleigh() const {
  for (const auto& g : los_) {
    if (g.cwiseAbs().maxCoeff() != 0.0) return false;
  }
  return true;
}

void ChannelStatistics::validate() const {
  for (int m = 0; m < num_aps_; ++m) {
    for (int k = 0; k < num_ues_; ++k) {
      const CMatrix& r = nlos_corr(m, k);
      if (!is_hermitian(r, 1e-9)) {
        throw std::invalid_argument("ChannelStatistics: NLoS correlation not Hermitian at (" +
                                    std::to_string(m) + ", " + std::to_string(k) + ")");
      }
      const double tr = r.diagonal().real().sum();
      Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(r), Eigen::EigenvaluesOnly);
      if (eig.eigenvalues().minCoeff() < -1e-9 * std::max(tr, 0.0)) {
        throw std::invalid_argument("ChannelStatistics: NLoS correlation not PSD at (" +
                                    std::to_string(m) + ", " + std::to_string(k) + ")");
      }
    }
  }
}

Geometry generate_geometry(const ScenarioConfig& cfg) {
  cfg.validate();
  RngStream rng(cfg.seed, kGeometryStream);
  Geometry geom;
  geom.aps.resize(static_cast<std::size_t>(cfg.num_aps));
  geom.ues.resize(static_cast<std::size_t>(cfg.num_ues));
  // APs first, then UEs: growing K keeps the positions of existing UEs.
  for (auto& p : geom.aps) {
    p.x = rng.uniform(0.0, cfg.area_side_m);
    p.y = rng.uniform(0.0, cfg.area_side_m);
  }
  for (auto& p : geom.ues) {
    p.x = rng.uniform(0.0, cfg.area_side_m);
    p.y = rng.uniform(0.0, cfg.area_side_m);
  }
  return geom;
}

CVector ula_steering(int antennas, double theta, double spacing) {
  CVector a(antennas);
  const double phase = 2.0 * std::numbers::pi * spacing * std::sin(theta);
  for (int n = 0; n < antennas; ++n) a[n] = std::polar(1.0, phase * n);
  return a;
}

CMatrix local_scattering_correlation(int antennas, double theta, double angular_std_rad,
                                     double spacing) {
  if (angular_std_rad <= 0.0) {
    const CVector a = ula_steering(antennas, theta, spacing);
    return a * a.adjoint();
  }
  // Composite Simpson over +-8 std of the angular deviation; the Toeplitz
  // structure means only the first column needs integrating.
  constexpr int kIntervals = 2000;
  const double half_width = 8.0 * angular_std_rad;
  const double h = 2.0 * half_width / kIntervals;
  CVector first_col = CVector::Zero(antennas);
  double weight_sum = 0.0;
  for (int i = 0; i <= kIntervals; ++i) {
    const double delta = -half_width + i * h;
    const double simpson = (i == 0 || i == kIntervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    const double w = simpson * std::exp(-0.5 * delta * delta / (angular_std_rad * angular_std_rad));
    weight_sum += w;
    const double phase = 2.0 * std::numbers::pi * spacing * std::sin(theta + delta);
    for (int d = 0; d < antennas; ++d) first_col[d] += w * std::polar(1.0, phase * d);
  }
  first_col /= weight_sum;
  CMatrix r(antennas, antennas);
  for (int row = 0; row < antennas; ++row) {
    for (int col = 0; col < antennas; ++col) {
      r(row, col) = row >= col ? first_col[row - col] : std::conj(first_col[col - row]);
    }
  }
  r.diagonal().setOnes();
  return r;
}

ChannelStatistics build_statistics(const Geometry& geom, const ScenarioConfig& cfg) {
  cfg.validate();
  const int big_m = static_cast<int>(geom.aps.size());
  const int big_k = static_cast<int>(geom.ues.size());
  if (big_m != cfg.num_aps || big_k != cfg.num_ues) {
    throw std::invalid_argument("build_statistics: geometry does not match config");
  }
  const auto& prop = cfg.propagation;
  const int n = cfg.antennas_per_ap;
  const double angular_std = prop.angular_spread_deg * std::numbers::pi / 180.0;

  RngStream phase_rng(cfg.seed, kLosPhaseStream);
  ChannelStatistics stats(big_m, n, big_k);
  for (int m = 0; m < big_m; ++m) {
    for (int k = 0; k < big_k; ++k) {
      const double dx = geom.ues[k].x - geom.aps[m].x;
      const double dy = geom.ues[k].y - geom.aps[m].y;
      const double dist = std::max(std::hypot(dx, dy), prop.min_distance_m);
      const double theta = std::atan2(dy, dx);
      const double beta_db = prop.pathloss_ref_db - 10.0 * prop.pathloss_exponent * std::log10(dist);
      const double beta = std::pow(10.0, beta_db / 10.0);
      const double kappa =
          prop.rayleigh ? 0.0
                        : std::pow(10.0, (prop.rician_ref_db - prop.rician_slope_db_per_m * dist) / 10.0);
      // Drawn on every link even in Rayleigh mode so both modes share geometry-driven draws.
      const double los_phase = phase_rng.uniform(0.0, 2.0 * std::numbers::pi);

      CVector los = CVector::Zero(n);
      if (kappa > 0.0) {
        los = std::sqrt(kappa / (1.0 + kappa) * beta) * std::polar(1.0, los_phase) *
              ula_steering(n, theta, prop.antenna_spacing);
      }
      CMatrix corr = (beta / (1.0 + kappa)) *
                     local_scattering_correlation(n, theta, angular_std, prop.antenna_spacing);
      stats.set_link(m, k, std::move(los), std::move(corr), beta, kappa);
    }
  }
  return stats;
}

PilotSetup assign_pilots(const ScenarioConfig& cfg) {
  cfg.validate();
  PilotSetup setup;
  setup.tau_p = cfg.tau_p;
  setup.pilot.resize(static_cast<std::size_t>(cfg.num_ues));
  setup.cosets.assign(static_cast<std::size_t>(cfg.tau_p), {});
  for (int k = 0; k < cfg.num_ues; ++k) {
    const int t = k % cfg.tau_p;
    setup.pilot[k] = t;
    setup.cosets[t].push_back(k);
  }
  return setup;
}

namespace {

nlohmann::json complex_to_json(cdouble z) { return nlohmann::json::array({z.real(), z.imag()}); }

cdouble complex_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

nlohmann::json statistics_to_json(const ChannelStatistics& stats) {
  nlohmann::json links = nlohmann::json::array();
  const int n = stats.antennas();
  for (int m = 0; m < stats.num_aps(); ++m) {
    for (int k = 0; k < stats.num_ues(); ++k) {
      nlohmann::json los = nlohmann::json::array();
      for (int i = 0; i < n; ++i) los.push_back(complex_to_json(stats.los_mean(m, k)[i]));
      nlohmann::json corr = nlohmann::json::array();
      for (int i = 0; i < n; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < n; ++j) row.push_back(complex_to_json(stats.nlos_corr(m, k)(i, j)));
        corr.push_back(std::move(row));
      }
      links.push_back({{"ap", m},
                       {"ue", k},
                       {"beta", stats.beta(m, k)},
                       {"kappa", stats.kappa(m, k)},
                       {"los_mean", std::move(los)},
                       {"nlos_corr", std::move(corr)}});
    }
  }
  return {{"num_aps", stats.num_aps()},
          {"antennas", n},
          {"num_ues", stats.num_ues()},
          {"links", std::move(links)}};
}

ChannelStatistics statistics_from_json(const nlohmann::json& doc) {
  const int big_m = doc.at("num_aps").get<int>();
  const int n = doc.at("antennas").get<int>();
  const int big_k = doc.at("num_ues").get<int>();
  if (big_m < 1 || n < 1 || big_k < 1) throw std::invalid_argument("statistics: bad dimensions");
  ChannelStatistics stats(big_m, n, big_k);
  const auto& links = doc.at("links");
  if (links.size() != static_cast<std::size_t>(big_m * big_k)) {
    throw std::invalid_argument("statistics: expected one entry per (ap, ue) link");
  }
  for (const auto& link : links) {
    const auto& los_j = link.at("los_mean");
    const auto& corr_j = link.at("nlos_corr");
    if (los_j.size() != static_cast<std::size_t>(n) || corr_j.size() != static_cast<std::size_t>(n)) {
      throw std::invalid_argument("statistics: link vector/matrix has wrong size");
    }
    CVector los(n);
    CMatrix corr(n, n);
    for (int i = 0; i < n; ++i) {
      los[i] = complex_from_json(los_j[i]);
      if (corr_j[i].size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("statistics: correlation row has wrong size");
      }
      for (int j = 0; j < n; ++j) corr(i, j) = complex_from_json(corr_j[i][j]);
    }
    stats.set_link(link.at("ap").get<int>(), link.at("ue").get<int>(), std::move(los),
                   std::move(corr), link.at("beta").get<double>(), link.value("kappa", 0.0));
  }
  stats.validate();
  return stats;
}

void write_statistics(const ChannelStatistics& stats, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << statistics_to_json(stats).dump(1) << '\n';
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

ChannelStatistics read_statistics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return statistics_from_json(nlohmann::json::parse(in));
}

}  // namespace cfobe
