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

#include <doctest.h>

#include <cmath>

#include "cfobe/uplink.hpp"
#include "fixtures.hpp"
#include "moment_oracle.hpp"

using namespace cfobe;
using namespace cfobe::testing;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

CombinerBank random_bank(int big_m, int n, int big_k, RngStream& rng) {
  CombinerBank bank(big_m, n, big_k);
  for (int m = 0; m < big_m; ++m)
    for (int k = 0; k < big_k; ++k) bank.w(m, k) = random_cmatrix(n, n, rng);
  return bank;
}

EstimatorSpec random_custom(const Scenario& s, std::uint64_t seed) {
  RngStream rng(seed, 0);
  std::vector<CMatrix> a;
  const double scale = 1.0 / (std::sqrt(s.cfg.ul_power_w) * s.cfg.tau_p);
  for (int i = 0; i < s.cfg.num_aps * s.cfg.num_ues; ++i) {
    CMatrix x = random_cmatrix(s.cfg.antennas_per_ap, s.cfg.antennas_per_ap, rng);
    x.diagonal().array() += 2.0;  // keep it comfortably invertible
    a.push_back(scale * x);
  }
  return EstimatorSpec::custom_matrices(a);
}

std::vector<EstimatorSpec> estimators_for(const Scenario& s) {
  return {EstimatorSpec::mmse(), EstimatorSpec::gls(), EstimatorSpec::approx_mmse(0.4, 3), random_custom(s, 17)};
}

double quotient(const CVector& mean, const CMatrix& inter, const CMatrix& noise, const CVector& w, double p,
                double sigma2) {
  const CMatrix d = inter - p * mean * mean.adjoint() + sigma2 * noise;
  return p * std::norm(w.dot(mean)) / w.dot(d * w).real();
}

McOptions mc(std::int64_t n, std::uint64_t seed, std::uint64_t stream = 0) {
  McOptions o;
  o.realizations = n;
  o.batches = 20;
  o.seed = seed;
  o.stream = stream;
  return o;
}

}  // namespace

TEST_CASE("BE with identity matrices equals MR") {
  const Scenario s = make_scenario(2, 3, 3, 1, false, 5);
  const EstimatorBank est = build_estimator_bank(EstimatorSpec::mmse(), s.stats, s.pilots, s.cfg);
  RngStream rng(1, 0);
  std::vector<CVector> estimates;
  for (int k = 0; k < 3; ++k) estimates.push_back(rng.cnormal_vector(3));
  const CombinerBank eye = CombinerBank::identity(2, 3, 3);
  const auto be = local_combiners(LocalScheme::kBe, estimates, est, &eye, s.cfg, 1);
  const auto mr = local_combiners(LocalScheme::kMr, estimates, est, nullptr, s.cfg, 1);
  for (int k = 0; k < 3; ++k) CHECK(max_abs(be[k] - mr[k]) == 0.0);
  CHECK_THROWS_AS(local_combiners(LocalScheme::kBe, estimates, est, nullptr, s.cfg, 1), std::invalid_argument);
}

TEST_CASE("LRZF nulls the other estimates") {
  Scenario s = make_scenario(1, 4, 3, 3, false, 5);
  s.cfg.noise_power_w = 1e-30;
  const EstimatorBank est = build_estimator_bank(EstimatorSpec::mmse(), s.stats, s.pilots, s.cfg);
  RngStream rng(2, 0);
  std::vector<CVector> estimates;
  for (int k = 0; k < 3; ++k) estimates.push_back(rng.cnormal_vector(4));
  const auto v = local_combiners(LocalScheme::kLrzf, estimates, est, nullptr, s.cfg, 0);
  for (int k = 0; k < 3; ++k) {
    for (int l = 0; l < 3; ++l) {
      if (l == k) continue;
      CHECK(std::abs(estimates[l].dot(v[k])) <= 1e-6 * estimates[l].norm() * v[k].norm());
    }
  }
}

TEST_CASE("UatF Monte-Carlo plug-in example") {
  ChannelStatistics stats(1, 1, 1);
  CVector one(1);
  one[0] = 1.0;
  stats.set_link(0, 0, one, CMatrix::Zero(1, 1), 1.0);
  ScenarioConfig cfg;
  cfg.num_aps = cfg.antennas_per_ap = cfg.num_ues = 1;
  cfg.ul_power_w = 1.0;
  cfg.noise_power_w = 1.0;
  const PilotSetup pilots = assign_pilots(cfg);
  const EstimatorBank est =
      build_estimator_bank(EstimatorSpec::custom_matrices({CMatrix::Zero(1, 1)}), stats, pilots, cfg);
  const CombinerBank eye = CombinerBank::identity(1, 1, 1);
  const LocalCombinerSource src(LocalScheme::kBe, est, cfg, &eye);
  const SeReport r = se_uatf_mc(src, stats, pilots, est, cfg, mc(1000, 1));
  CHECK(r.ue[0].sinr_mc == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.ue[0].se_mc == doctest::Approx(cfg.tau_u() / double(cfg.tau_c)).epsilon(1e-12));
  CHECK(ul_closed_form_sinr(eye, stats, pilots, est, cfg)[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("all-zero combiner gives zero SINR") {
  const Scenario s = make_scenario(2, 2, 2, 1, false, 3);
  const EstimatorBank est = build_estimator_bank(EstimatorSpec::mmse(), s.stats, s.pilots, s.cfg);
  const CombinerBank zero(2, 2, 2);
  const LocalCombinerSource src(LocalScheme::kBe, est, s.cfg, &zero);
  const SeReport r = se_uatf_mc(src, s.stats, s.pilots, est, s.cfg, mc(1000, 1));
  for (const auto& u : r.ue) CHECK(u.sinr_mc == 0.0);
  for (double v : ul_closed_form_sinr(zero, s.stats, s.pilots, est, s.cfg)) CHECK(v == 0.0);
}

TEST_CASE("closed-form OBE system equals the exact-moment construction") {
  for (int big_m : {1, 2}) {
    const Scenario s = make_scenario(big_m, 2, 3, 2, false, 40 + big_m);
    for (const auto& spec : estimators_for(s)) {
      CAPTURE(big_m);
      CAPTURE(spec.name());
      const EstimatorBank est = build_estimator_bank(spec, s.stats, s.pilots, s.cfg);
      const ExactMoments ex(s.stats, s.pilots, est, s.cfg);
      const ObeSystem obe = obe_closed(s.stats, s.pilots, est, s.cfg);
      for (int k = 0; k < 3; ++k) {
        const ExactUlSystem ref = exact_ul_system(ex, big_m, 2, 3, k, s.cfg.ul_power_w);
        const auto& u = obe.ue[static_cast<std::size_t>(k)];
        CHECK(max_abs(u.mean - ref.mean) <= 1e-10 * max_abs(ref.mean));
        CHECK(max_abs(u.interference - ref.interference) <= 1e-10 * max_abs(ref.interference));
        CHECK(max_abs(u.noise - ref.noise) <= 1e-10 * max_abs(ref.noise));
      }
    }
  }
}

TEST_CASE("closed-form UL SINR equals the exact stacked quotient for random banks") {
  const Scenario s = make_scenario(3, 2, 4, 2, false, 9);
  RngStream rng(31, 0);
  for (const auto& spec : estimators_for(s)) {
    CAPTURE(spec.name());
    const EstimatorBank est = build_estimator_bank(spec, s.stats, s.pilots, s.cfg);
    const ExactMoments ex(s.stats, s.pilots, est, s.cfg);
    for (int trial = 0; trial < 3; ++trial) {
      const CombinerBank bank = random_bank(3, 2, 4, rng);
      const auto cf = ul_closed_form_sinr(bank, s.stats, s.pilots, est, s.cfg);
      for (int k = 0; k < 4; ++k) {
        const ExactUlSystem ref = exact_ul_system(ex, 3, 2, 4, k, s.cfg.ul_power_w);
        const double q = quotient(ref.mean, ref.interference, ref.noise, stack_bank(bank, k), s.cfg.ul_power_w,
                                  s.cfg.noise_power_w);
        CHECK(rel_err(cf[static_cast<std::size_t>(k)], q) <= 1e-9);
      }
    }
  }
}

TEST_CASE("MR closed form in Rayleigh fading with orthogonal pilots") {
  const Scenario s = make_scenario(4, 3, 3, 3, true, 12);
  const EstimatorBank est = build_estimator_bank(EstimatorSpec::mmse(), s.stats, s.pilots, s.cfg);
  const auto cf = ul_closed_form_sinr(CombinerBank::identity(4, 3, 3), s.stats, s.pilots, est, s.cfg);
  const double p = s.cfg.ul_power_w, tp = s.cfg.tau_p, sigma2 = s.cfg.noise_power_w;
  for (int k = 0; k < 3; ++k) {
    double gain = 0.0, inter = 0.0;
    for (int m = 0; m < 4; ++m) {
      const CMatrix& r = s.stats.nlos_corr(m, k);
      const CMatrix psi = p * tp * r + sigma2 * CMatrix::Identity(3, 3);
      const CMatrix phi = p * tp * r * psi.inverse() * r;
      gain += phi.trace().real();
      for (int l = 0; l < 3; ++l) inter += p * (s.stats.nlos_corr(m, l) * phi).trace().real();
    }
    const double expected = p * gain * gain / (inter + sigma2 * gain);
    CHECK(rel_err(cf[static_cast<std::size_t>(k)], expected) <= 1e-9);
  }
}

TEST_CASE("noise term discrepancy vanishes only for MMSE") {
  const Scenario s = make_scenario(2, 2, 3, 1, false, 4);
  RngStream rng(5, 5);
  const CombinerBank bank = random_bank(2, 2, 3, rng);
  const EstimatorBank mmse = build_estimator_bank(EstimatorSpec::mmse(), s.stats, s.pilots, s.cfg);
  const EstimatorBank gls = build_estimator_bank(EstimatorSpec::gls(), s.stats, s.pilots, s.cfg);
  CHECK(noise_term_discrepancy(bank, s.stats, mmse, s.cfg) <= 1e-10);
  CHECK(noise_term_discrepancy(bank, s.stats, gls, s.cfg) > 1e-3);
}

TEST_CASE("scaling a UE's BE matrices leaves its SINR unchanged") {
  const Scenario s = make_scenario(2, 2, 3, 2, false, 6);
  const EstimatorBank est = build_estimator_bank(EstimatorSpec::gls(), s.stats, s.pilots, s.cfg);
  RngStream rng(8, 8);
  const CombinerBank bank = random_bank(2, 2, 3, rng);
  CombinerBank scaled = bank;
  const cdouble c(-2.5, 0.75);
  for (int m = 0; m < 2; ++m) scaled.w(m, 1) *= c;
  scaled.w(0, 2) *= 3.0;  // another UE's matrices do not matter for UE 1
  const auto a = ul_closed_form_sinr(bank, s.stats, s.pilots, est, s.cfg);
  const auto b = ul_closed_form_sinr(scaled, s.stats, s.pilots, est, s.cfg);
  CHECK(rel_err(b[1], a[1]) <= 1e-9);
  CHECK(rel_err(b[0], a[0]) <= 1e-9);

  const LocalCombinerSource sa(LocalScheme::kBe, est, s.cfg, &bank);
  const LocalCombinerSource sb(LocalScheme::kBe, est, s.cfg, &scaled);
  const SeReport ra = se_uatf_mc(sa, s.stats, s.pilots, est, s.cfg, mc(2000, 3));
  const SeReport rb = se_uatf_mc(sb, s.stats, s.pilots, est, s.cfg, mc(2000, 3));
  CHECK(rel_err(rb.ue[1].sinr_mc, ra.ue[1].sinr_mc) <= 1e-9);
}

TEST_CASE("Monte-Carlo UL SE agrees with the closed form") {
  const Scenario s = make_scenario(2, 2, 2, 1, false, 13);
  RngStream rng(14, 0);
  const CombinerBank bank = random_bank(2, 2, 2, rng);
  for (const auto& spec : {EstimatorSpec::mmse(), EstimatorSpec::gls()}) {
    CAPTURE(spec.name());
    const EstimatorBank est = build_estimator_bank(spec, s.stats, s.pilots, s.cfg);
    const LocalCombinerSource src(LocalScheme::kBe, est, s.cfg, &bank);
    const SeReport mcr = se_uatf_mc(src, s.stats, s.pilots, est, s.cfg, mc(40000, 21));
    const SeReport cf = se_closed_form_ul(bank, s.stats, s.pilots, est, s.cfg);
    for (int k = 0; k < 2; ++k) {
      const auto& u = mcr.ue[static_cast<std::size_t>(k)];
      CHECK(std::abs(u.se_mc - cf.ue[static_cast<std::size_t>(k)].se_cf) <= 3.0 * u.mc_stderr);
    }
  }
}

TEST_CASE("Monte-Carlo results do not depend on the worker count") {
  const Scenario s = make_scenario(2, 2, 3, 1, false, 2);
  const EstimatorBank est = build_estimator_bank(EstimatorSpec::mmse(), s.stats, s.pilots, s.cfg);
  const LocalCombinerSource src(LocalScheme::kLmmse, est, s.cfg);
  McOptions one = mc(3000, 5);
  McOptions four = one;
  four.workers = 4;
  const SeReport a = se_uatf_mc(src, s.stats, s.pilots, est, s.cfg, one);
  const SeReport b = se_uatf_mc(src, s.stats, s.pilots, est, s.cfg, four);
  for (int k = 0; k < 3; ++k) {
    CHECK(a.ue[k].sinr_mc == b.ue[k].sinr_mc);
    CHECK(a.ue[k].mc_stderr == b.ue[k].mc_stderr);
  }
  const ObeSystem oa = obe_mc(s.stats, s.pilots, est, s.cfg, one);
  const ObeSystem ob = obe_mc(s.stats, s.pilots, est, s.cfg, four);
  for (int k = 0; k < 3; ++k) CHECK(oa.ue[k].sinr == ob.ue[k].sinr);
}

TEST_CASE("LMMSE beats MR for a single UE") {
  const Scenario s = make_scenario(3, 4, 1, 1, false, 77);
  const EstimatorBank est = build_estimator_bank(EstimatorSpec::mmse(), s.stats, s.pilots, s.cfg);
  const LocalCombinerSource lmmse(LocalScheme::kLmmse, est, s.cfg);
  const LocalCombinerSource mr(LocalScheme::kMr, est, s.cfg);
  const SeReport a = se_uatf_mc(lmmse, s.stats, s.pilots, est, s.cfg, mc(5000, 3));
  const SeReport b = se_uatf_mc(mr, s.stats, s.pilots, est, s.cfg, mc(5000, 3));
  CHECK(a.ue[0].sinr_mc >= b.ue[0].sinr_mc);
}

TEST_CASE("OBE dominates perturbed banks and both SINR evaluators agree at the optimum") {
  const Scenario s = make_scenario(2, 2, 3, 2, false, 25);
  RngStream rng(26, 0);
  for (const auto& spec : {EstimatorSpec::mmse(), EstimatorSpec::gls()}) {
    CAPTURE(spec.name());
    const EstimatorBank est = build_estimator_bank(spec, s.stats, s.pilots, s.cfg);
    const ObeSystem obe = obe_closed(s.stats, s.pilots, est, s.cfg);
    const auto at_opt = ul_closed_form_sinr(obe.bank, s.stats, s.pilots, est, s.cfg);
    for (int k = 0; k < 3; ++k) {
      const auto& u = obe.ue[static_cast<std::size_t>(k)];
      CHECK(rel_err(at_opt[static_cast<std::size_t>(k)], u.sinr) <= 1e-8);
      CHECK(rel_err(obe_sinr_of(u, u.w, s.cfg.ul_power_w, s.cfg.noise_power_w), u.sinr) <= 1e-8);
    }
    for (int t = 0; t < 200; ++t) {
      CombinerBank pert = obe.bank;
      for (int m = 0; m < 2; ++m)
        for (int k = 0; k < 3; ++k) {
          const double scale = obe.bank.w(m, k).norm();
          pert.w(m, k) += 0.1 * scale * random_cmatrix(2, 2, rng);
        }
      const auto sinr = ul_closed_form_sinr(pert, s.stats, s.pilots, est, s.cfg);
      for (int k = 0; k < 3; ++k) CHECK(sinr[k] <= obe.ue[k].sinr + 1e-9);
    }
  }
}

TEST_CASE("scalar OBE is scale invariant") {
  const Scenario s = make_scenario(1, 1, 2, 1, false, 4);
  const EstimatorBank est = build_estimator_bank(EstimatorSpec::mmse(), s.stats, s.pilots, s.cfg);
  const ObeSystem obe = obe_closed(s.stats, s.pilots, est, s.cfg);
  for (const auto& u : obe.ue) {
    CVector w(1);
    for (cdouble c : {cdouble(1, 0), cdouble(-3, 2), cdouble(0, 1e-4)}) {
      w[0] = c;
      CHECK(rel_err(obe_sinr_of(u, w, s.cfg.ul_power_w, s.cfg.noise_power_w), u.sinr) <= 1e-9);
    }
  }
}

TEST_CASE("sampled OBE converges to the closed form") {
  const Scenario s = make_scenario(2, 2, 2, 1, false, 30, 400.0);
  for (const auto& spec : {EstimatorSpec::mmse(), EstimatorSpec::gls()}) {
    CAPTURE(spec.name());
    const EstimatorBank est = build_estimator_bank(spec, s.stats, s.pilots, s.cfg);
    const ObeSystem cf = obe_closed(s.stats, s.pilots, est, s.cfg);
    const ObeSystem sm = obe_mc(s.stats, s.pilots, est, s.cfg, mc(100000, 31));
    for (int k = 0; k < 2; ++k) CHECK(rel_err(sm.ue[k].sinr, cf.ue[k].sinr) <= 0.01);
  }
}

TEST_CASE("Rayleigh OBE SINR does not depend on the invertible estimator") {
  const Scenario s = make_scenario(3, 2, 4, 2, true, 50);
  std::vector<std::vector<double>> sinr;
  for (const auto& spec : {EstimatorSpec::mmse(), EstimatorSpec::gls(), random_custom(s, 19)}) {
    const EstimatorBank est = build_estimator_bank(spec, s.stats, s.pilots, s.cfg);
    std::vector<double> v;
    for (const auto& u : obe_closed(s.stats, s.pilots, est, s.cfg).ue) v.push_back(u.sinr);
    sinr.push_back(v);
  }
  for (std::size_t e = 1; e < sinr.size(); ++e)
    for (int k = 0; k < 4; ++k) CHECK(rel_err(sinr[e][k], sinr[0][k]) <= 1e-6);
}

TEST_CASE("OBE with MMSE when only one UE has a LoS component") {
  Scenario s = make_scenario(2, 2, 3, 1, false, 61);
  for (int m = 0; m < 2; ++m) {
    for (int k = 1; k < 3; ++k) {
      s.stats.set_link(m, k, CVector::Zero(2), s.stats.nlos_corr(m, k), s.stats.beta(m, k), 0.0);
    }
  }
  const EstimatorBank est = build_estimator_bank(EstimatorSpec::mmse(), s.stats, s.pilots, s.cfg);
  const ObeSystem obe = obe_closed(s.stats, s.pilots, est, s.cfg);
  const double p = s.cfg.ul_power_w, tp = s.cfg.tau_p, sigma2 = s.cfg.noise_power_w;
  const CMatrix eye = CMatrix::Identity(2, 2);
  for (int k = 0; k < 3; ++k) {
    // MMSE-specialized form: E{g ĝ^H} = Ḡ_kk δ_lk + p tau_p R_l Psi^-1 R_k.
    CVector rbar(8);
    CMatrix inter = CMatrix::Zero(8, 8), noise = CMatrix::Zero(8, 8);
    std::vector<CMatrix> phi(2);
    for (int m = 0; m < 2; ++m) {
      const CMatrix psi = psi_matrix(s.stats, s.pilots, s.cfg, m, k);
      const CMatrix gkk = s.stats.los_mean(m, k) * s.stats.los_mean(m, k).adjoint();
      phi[m] = gkk + p * tp * s.stats.nlos_corr(m, k) * psi.inverse() * s.stats.nlos_corr(m, k);
      rbar.segment(4 * m, 4) = vec(phi[m]);
      noise.block(4 * m, 4 * m, 4, 4) = kron(phi[m].transpose(), eye);
    }
    for (int l = 0; l < 3; ++l) {
      CVector b(8);
      for (int m = 0; m < 2; ++m) {
        const CMatrix psi = psi_matrix(s.stats, s.pilots, s.cfg, m, k);
        const CMatrix gll = s.stats.los_mean(m, l) * s.stats.los_mean(m, l).adjoint();
        CMatrix mean = p * tp * s.stats.nlos_corr(m, l) * psi.inverse() * s.stats.nlos_corr(m, k);
        CMatrix blk = kron(phi[m].transpose(), gll + s.stats.nlos_corr(m, l));
        if (l == k) {
          mean += gll;
          blk -= vec(gll) * vec(gll).adjoint();
        }
        b.segment(4 * m, 4) = vec(mean);
        inter.block(4 * m, 4 * m, 4, 4) += p * blk;
      }
      inter += p * b * b.adjoint();
    }
    const CMatrix d = inter - p * rbar * rbar.adjoint() + sigma2 * noise;
    const double expected = p * rbar.dot(d.ldlt().solve(rbar)).real();
    CHECK(rel_err(obe.ue[k].sinr, expected) <= 1e-8);
  }
}

TEST_CASE("two-layer LSFD") {
  const Scenario s = make_scenario(3, 2, 3, 1, false, 70);
  const EstimatorBank est = build_estimator_bank(EstimatorSpec::mmse(), s.stats, s.pilots, s.cfg);
  for (LocalScheme scheme : {LocalScheme::kLmmse, LocalScheme::kLrzf}) {
    const LsfdResult r = lsfd_two_layer(scheme, s.stats, s.pilots, est, s.cfg, mc(4000, 71));
    for (int k = 0; k < 3; ++k) {
      CHECK(r.in_sample_sinr[k] >= r.equal_weight_sinr[k] * (1.0 - 1e-12));
      CHECK(r.weights[k].size() == 3);
      CHECK(std::isfinite(r.report.ue[k].se_mc));
    }
  }
  CHECK_THROWS_AS(lsfd_two_layer(LocalScheme::kBe, s.stats, s.pilots, est, s.cfg, mc(100, 1)),
                  std::invalid_argument);
}

TEST_CASE("single-AP LSFD reduces to local combining") {
  const Scenario s = make_scenario(1, 3, 2, 1, false, 72);
  const EstimatorBank est = build_estimator_bank(EstimatorSpec::mmse(), s.stats, s.pilots, s.cfg);
  const McOptions opt = mc(3000, 4, 6);
  const LsfdResult r = lsfd_two_layer(LocalScheme::kLmmse, s.stats, s.pilots, est, s.cfg, opt);
  McOptions eval = opt;
  eval.stream = opt.stream + 1;
  const LocalCombinerSource local(LocalScheme::kLmmse, est, s.cfg);
  const SeReport plain = se_uatf_mc(local, s.stats, s.pilots, est, s.cfg, eval);
  for (int k = 0; k < 2; ++k) CHECK(rel_err(r.report.ue[k].se_mc, plain.ue[k].se_mc) <= 1e-9);
}

TEST_CASE("optimal Rayleigh estimator") {
  const Scenario s = make_scenario(2, 2, 2, 1, true, 80);
  const CombinerBank eye = CombinerBank::identity(2, 2, 2);
  const OptEstimatorSystem opt = optimal_estimator_rayleigh(eye, s.stats, s.pilots, s.cfg, mc(100000, 81));
  const EstimatorBank mmse = build_estimator_bank(EstimatorSpec::mmse(), s.stats, s.pilots, s.cfg);
  const auto mmse_sinr = ul_closed_form_sinr(eye, s.stats, s.pilots, mmse, s.cfg);
  const ObeSystem obe = obe_closed(s.stats, s.pilots, mmse, s.cfg);
  const EstimatorBank astar = build_estimator_bank(opt.estimator, s.stats, s.pilots, s.cfg);
  const auto astar_cf = ul_closed_form_sinr(eye, s.stats, s.pilots, astar, s.cfg);
  for (int k = 0; k < 2; ++k) {
    CHECK(opt.ue[k].sinr >= mmse_sinr[k] * 0.99);
    CHECK(astar_cf[k] >= mmse_sinr[k] * 0.99);
    CHECK(rel_err(opt.ue[k].sinr, obe.ue[k].sinr) <= 0.02);
  }

  const Scenario rician = make_scenario(2, 2, 2, 1, false, 80);
  CHECK_THROWS_AS(optimal_estimator_rayleigh(eye, rician.stats, rician.pilots, rician.cfg, mc(100, 1)),
                  std::invalid_argument);
}
