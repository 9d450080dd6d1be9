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

#include "cfobe/uplink.hpp"

namespace cfobe {

CombinerBank::CombinerBank(int num_aps, int antennas, int num_ues)
    : num_aps_(num_aps),
      antennas_(antennas),
      num_ues_(num_ues),
      w_(static_cast<std::size_t>(num_aps * num_ues), CMatrix::Zero(antennas, antennas)) {}

CombinerBank CombinerBank::identity(int num_aps, int antennas, int num_ues) {
  CombinerBank bank(num_aps, antennas, num_ues);
  for (auto& w : bank.w_) w = CMatrix::Identity(antennas, antennas);
  return bank;
}

std::size_t CombinerBank::index(int m, int k) const {
  if (m < 0 || m >= num_aps_ || k < 0 || k >= num_ues_) throw std::out_of_range("CombinerBank: bad link");
  return static_cast<std::size_t>(m * num_ues_ + k);
}

namespace {

// Solves G x = rhs for a Hermitian PD local Gram matrix, loading on failure.
CMatrix solve_local(const CMatrix& gram, const CMatrix& rhs, bool* loaded) {
  Eigen::LLT<CMatrix> llt(gram);
  if (llt.info() == Eigen::Success) return llt.solve(rhs);
  if (loaded) *loaded = true;
  CMatrix g = gram;
  const double mean_diag = std::max(gram.diagonal().real().mean(), 1e-300);
  g.diagonal().array() += 1e-8 * mean_diag;
  return g.ldlt().solve(rhs);
}

CMatrix stack_columns(const std::vector<CVector>& cols) {
  CMatrix out(cols.front().size(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = cols[j];
  return out;
}

CMatrix lmmse_base(const EstimatorBank& est, const ScenarioConfig& cfg, int m) {
  const int n = est.antennas();
  CMatrix base = cfg.noise_power_w * CMatrix::Identity(n, n);
  for (int l = 0; l < est.num_ues(); ++l) base += cfg.ul_power_w * est.error_cov(m, l);
  return hermitian_part(base);
}

void lmmse_into(const CMatrix& base, const std::vector<CVector>& estimates, double p,
                std::vector<CVector>& out, bool* loaded) {
  const CMatrix g = stack_columns(estimates);
  CMatrix gram = base;
  gram.noalias() += p * g * g.adjoint();
  const CMatrix v = p * solve_local(gram, g, loaded);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = v.col(static_cast<Eigen::Index>(k));
}

void lrzf_into(const std::vector<CVector>& estimates, const ScenarioConfig& cfg,
               std::vector<CVector>& out, bool* loaded) {
  const CMatrix g = stack_columns(estimates);
  CMatrix gram = g.adjoint() * g;
  gram.diagonal().array() += cfg.noise_power_w / cfg.ul_power_w;
  const CMatrix v = g * solve_local(gram, CMatrix::Identity(g.cols(), g.cols()), loaded);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = v.col(static_cast<Eigen::Index>(k));
}

}  // namespace

std::vector<CVector> local_combiners(LocalScheme scheme, const std::vector<CVector>& estimates_m,
                                     const EstimatorBank& est, const CombinerBank* bank,
                                     const ScenarioConfig& cfg, int m, bool* loaded) {
  if (estimates_m.size() != static_cast<std::size_t>(est.num_ues())) {
    throw std::invalid_argument("local_combiners: expected one estimate per UE");
  }
  std::vector<CVector> out(estimates_m.size());
  switch (scheme) {
    case LocalScheme::kMr:
      out = estimates_m;
      break;
    case LocalScheme::kLmmse:
      lmmse_into(lmmse_base(est, cfg, m), estimates_m, cfg.ul_power_w, out, loaded);
      break;
    case LocalScheme::kLrzf:
      lrzf_into(estimates_m, cfg, out, loaded);
      break;
    case LocalScheme::kBe:
      if (bank == nullptr) throw std::invalid_argument("local_combiners: BE scheme needs a combiner bank");
      for (std::size_t k = 0; k < out.size(); ++k) out[k] = bank->w(m, static_cast<int>(k)) * estimates_m[k];
      break;
  }
  return out;
}

LocalCombinerSource::LocalCombinerSource(LocalScheme scheme, const EstimatorBank& est,
                                         const ScenarioConfig& cfg, const CombinerBank* bank)
    : scheme_(scheme), est_(est), cfg_(cfg), bank_(bank) {
  if (scheme == LocalScheme::kBe && bank == nullptr) {
    throw std::invalid_argument("LocalCombinerSource: BE scheme needs a combiner bank");
  }
  if (scheme == LocalScheme::kLmmse) {
    for (int m = 0; m < est.num_aps(); ++m) lmmse_bases_.push_back(lmmse_base(est, cfg, m));
  }
}

void LocalCombinerSource::combine(int m, const LinkDrawer& draw, std::vector<CVector>& out) const {
  const auto& est_m = draw.estimates_at(m);
  out.resize(est_m.size());
  switch (scheme_) {
    case LocalScheme::kMr:
      for (std::size_t k = 0; k < out.size(); ++k) out[k] = est_m[k];
      break;
    case LocalScheme::kLmmse:
      lmmse_into(lmmse_bases_[static_cast<std::size_t>(m)], est_m, cfg_.ul_power_w, out, nullptr);
      break;
    case LocalScheme::kLrzf:
      lrzf_into(est_m, cfg_, out, nullptr);
      break;
    case LocalScheme::kBe:
      for (std::size_t k = 0; k < out.size(); ++k) out[k].noalias() = bank_->w(m, static_cast<int>(k)) * est_m[k];
      break;
  }
}

ScaledCombinerSource::ScaledCombinerSource(const CombinerSource& inner, std::vector<cdouble> weights,
                                           int num_ues)
    : inner_(inner), weights_(std::move(weights)), num_ues_(num_ues) {}

void ScaledCombinerSource::combine(int m, const LinkDrawer& draw, std::vector<CVector>& out) const {
  inner_.combine(m, draw, out);
  for (int k = 0; k < num_ues_; ++k) out[static_cast<std::size_t>(k)] *= weights_[static_cast<std::size_t>(m * num_ues_ + k)];
}

}  // namespace cfobe
