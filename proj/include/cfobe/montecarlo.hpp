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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "cfobe/estimation.hpp"
#include "cfobe/linalg.hpp"
#include "cfobe/scenario.hpp"

namespace cfobe {

/// Monte-Carlo run policy. Realizations are split into `batches` fixed
/// chunks; chunk b draws from RngStream(seed, batch_stream(stream, b)), so
/// results depend on (seed, stream, realizations, batches) and never on the
/// number of workers.
struct McOptions {
  std::int64_t realizations = 10000;
  int batches = 20;
  int workers = 1;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
};

inline std::uint64_t batch_stream(std::uint64_t stream, int batch) {
  return (stream << 20) ^ static_cast<std::uint64_t>(batch);
}

namespace detail {

template <class Fn>
auto run_batch_range(const McOptions& opt, int first, int last, Fn& fn)
    -> std::vector<decltype(fn(0, std::int64_t{0}, std::declval<RngStream&>()))> {
  using Result = decltype(fn(0, std::int64_t{0}, std::declval<RngStream&>()));
  const int nb = opt.batches;
  std::vector<Result> results(static_cast<std::size_t>(last - first));
  auto run_one = [&](int b) {
    const std::int64_t base = opt.realizations / nb;
    const std::int64_t count = base + (b < opt.realizations % nb ? 1 : 0);
    RngStream rng(opt.seed, batch_stream(opt.stream, b));
    results[static_cast<std::size_t>(b - first)] = fn(b, count, rng);
  };
  const int workers = std::max(1, std::min(opt.workers, last - first));
  if (workers == 1) {
    for (int b = first; b < last; ++b) run_one(b);
    return results;
  }
  std::atomic<int> next{first};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int b = next++; b < last; b = next++) {
        try {
          run_one(b);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return results;
}

inline void check_options(const McOptions& opt) {
  if (opt.batches < 1) throw std::invalid_argument("McOptions: batches must be >= 1");
  if (opt.realizations < opt.batches) {
    throw std::invalid_argument("McOptions: fewer realizations than batches");
  }
}

}  // namespace detail

/// Runs fn(batch, count, rng) for every batch and returns the results in
/// batch order.
template <class Fn>
auto run_batches(const McOptions& opt, Fn&& fn)
    -> std::vector<decltype(fn(0, std::int64_t{0}, std::declval<RngStream&>()))> {
  detail::check_options(opt);
  return detail::run_batch_range(opt, 0, opt.batches, fn);
}

/// Like run_batches, but hands each result to fold(batch, result) in batch
/// order and keeps at most `workers` results alive at a time.
template <class Fn, class Fold>
void fold_batches(const McOptions& opt, Fn&& fn, Fold&& fold) {
  detail::check_options(opt);
  const int window = std::max(1, opt.workers);
  for (int first = 0; first < opt.batches; first += window) {
    const int last = std::min(opt.batches, first + window);
    auto results = detail::run_batch_range(opt, first, last, fn);
    for (int b = first; b < last; ++b) fold(b, std::move(results[static_cast<std::size_t>(b - first)]));
  }
}

/// Mean and standard error of the mean over batch values.
struct BatchSummary {
  double mean = 0.0;
  double std_error = 0.0;
};
BatchSummary summarize_batches(const std::vector<double>& values);

/// Draws (g, y^p, ĝ) for every link into reusable buffers.
class LinkDrawer {
 public:
  LinkDrawer(const ChannelStatistics& stats, const PilotSetup& pilots, const EstimatorBank& est,
             const ScenarioConfig& cfg);

  void draw(RngStream& rng);

  int num_aps() const { return big_m_; }
  int num_ues() const { return big_k_; }
  const CVector& channel(int m, int k) const { return channels_.at(m, k); }
  const CVector& estimate(int m, int k) const {
    return est_by_ap_[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)];
  }
  /// Estimates of every UE at AP m, in UE order.
  const std::vector<CVector>& estimates_at(int m) const { return est_by_ap_[static_cast<std::size_t>(m)]; }
  const CVector& pilot_signal(int m, int k) const { return y_[idx(m, k)]; }
  const ChannelRealization& channels() const { return channels_; }

 private:
  std::size_t idx(int m, int k) const { return static_cast<std::size_t>(m * big_k_ + k); }

  const ChannelStatistics& stats_;
  const PilotSetup& pilots_;
  const EstimatorBank& est_bank_;
  int big_m_, big_k_, n_;
  double pilot_scale_, noise_std_;
  ChannelSampler sampler_;
  std::vector<CVector> y_mean_;
  ChannelRealization channels_;
  std::vector<CVector> y_;
  std::vector<std::vector<CVector>> est_by_ap_;
};

/// Per-UE spectral-efficiency results. Columns that were not computed are NaN.
struct UeSe {
  double sinr_mc = std::numeric_limits<double>::quiet_NaN();
  double se_mc = std::numeric_limits<double>::quiet_NaN();
  double mc_stderr = std::numeric_limits<double>::quiet_NaN();
  double sinr_cf = std::numeric_limits<double>::quiet_NaN();
  double se_cf = std::numeric_limits<double>::quiet_NaN();
};

struct SeReport {
  std::string scheme;
  std::string estimator;
  std::vector<UeSe> ue;
};

/// Copies the closed-form columns of `cf` into `into` (same UE count).
void merge_closed_form(SeReport& into, const SeReport& cf);

/// prelog * log2(1 + sinr).
double spectral_efficiency(double sinr, int tau_data, int tau_c);

}  // namespace cfobe
