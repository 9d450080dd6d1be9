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

#pragma once

#include <doctest.h>

#include <cmath>
#include <string>

#include "cfobe/estimation.hpp"
#include "cfobe/linalg.hpp"
#include "cfobe/scenario.hpp"

namespace cfobe::testing {

struct Scenario {
  ScenarioConfig cfg;
  ChannelStatistics stats;
  PilotSetup pilots;
};

/// Random geometry-driven scenario on a small square, so every link is strong.
inline Scenario make_scenario(int big_m, int n, int big_k, int tau_p, bool rayleigh, std::uint64_t seed,
                              double side = 200.0) {
  Scenario s;
  s.cfg.num_aps = big_m;
  s.cfg.antennas_per_ap = n;
  s.cfg.num_ues = big_k;
  s.cfg.tau_p = tau_p;
  s.cfg.area_side_m = side;
  s.cfg.seed = seed;
  s.cfg.propagation.rayleigh = rayleigh;
  s.stats = build_statistics(generate_geometry(s.cfg), s.cfg);
  s.pilots = assign_pilots(s.cfg);
  return s;
}

/// Entrywise sample mean of complex matrices with standard errors of the mean.
class MatrixMoment {
 public:
  MatrixMoment(Eigen::Index rows, Eigen::Index cols)
      : sum_(CMatrix::Zero(rows, cols)),
        sq_re_(Eigen::MatrixXd::Zero(rows, cols)),
        sq_im_(Eigen::MatrixXd::Zero(rows, cols)) {}

  void add(const CMatrix& x) {
    sum_ += x;
    sq_re_ += x.real().cwiseAbs2();
    sq_im_ += x.imag().cwiseAbs2();
    ++count_;
  }

  CMatrix mean() const { return sum_ / static_cast<double>(count_); }

  /// True when every real and imaginary part lies within `z` standard errors
  /// (plus `abs_floor`) of the reference.
  bool within(const CMatrix& ref, double z, double abs_floor, std::string* report = nullptr) const {
    const double n = static_cast<double>(count_);
    const CMatrix mu = mean();
    bool ok = true;
    for (Eigen::Index i = 0; i < mu.rows(); ++i) {
      for (Eigen::Index j = 0; j < mu.cols(); ++j) {
        const double var_re = std::max(0.0, sq_re_(i, j) / n - mu(i, j).real() * mu(i, j).real());
        const double var_im = std::max(0.0, sq_im_(i, j) / n - mu(i, j).imag() * mu(i, j).imag());
        const double se_re = std::sqrt(var_re / n), se_im = std::sqrt(var_im / n);
        const double d_re = std::abs(mu(i, j).real() - ref(i, j).real());
        const double d_im = std::abs(mu(i, j).imag() - ref(i, j).imag());
        if (d_re > z * se_re + abs_floor || d_im > z * se_im + abs_floor) {
          ok = false;
          if (report) {
            *report += "(" + std::to_string(i) + "," + std::to_string(j) + ") dre=" + std::to_string(d_re / se_re) +
                       "se dim=" + std::to_string(d_im / se_im) + "se; ";
          }
        }
      }
    }
    return ok;
  }

 private:
  CMatrix sum_;
  Eigen::MatrixXd sq_re_, sq_im_;
  std::int64_t count_ = 0;
};

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace cfobe::testing
