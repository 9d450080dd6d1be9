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

#include <chrono>
#include <optional>
#include <stdexcept>

#include "cfobe/downlink.hpp"
#include "cfobe/harness.hpp"
#include "cfobe/uplink.hpp"

namespace cfobe {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Stream roles inside one cell. LSFD evaluates on its statistics stream + 1,
// which is the shared evaluation stream.
enum Role : std::uint64_t { kLsfdStats = 0, kEval = 1, kObeStats = 2, kDlNorm = 3 };

std::uint64_t cell_stream(std::uint64_t cell, int dir, Role role) {
  return ((cell * 2 + static_cast<std::uint64_t>(dir)) << 3) | role;
}

bool applies(Scheme s, Direction d) {
  return !(d == Direction::kDl && (s == Scheme::kLmmseLsfd || s == Scheme::kLrzfLsfd));
}

LocalScheme local_of(Scheme s) {
  switch (s) {
    case Scheme::kMr: return LocalScheme::kMr;
    case Scheme::kLmmse:
    case Scheme::kLmmseLsfd: return LocalScheme::kLmmse;
    case Scheme::kLrzf:
    case Scheme::kLrzfLsfd: return LocalScheme::kLrzf;
    default: return LocalScheme::kBe;
  }
}

class Cell {
 public:
  Cell(const ExperimentConfig& cfg, const ScenarioConfig& scenario, const ChannelStatistics& stats,
       const PilotSetup& pilots, const EstimatorBank& est, std::uint64_t cell)
      : cfg_(cfg), scenario_(scenario), stats_(stats), pilots_(pilots), est_(est), cell_(cell) {}

  SeReport run(Scheme scheme, Direction dir) {
    const int d = dir == Direction::kUl ? 0 : 1;
    const McOptions eval = options(cfg_.mc_samples, cell_stream(cell_, d, kEval));
    if (scheme == Scheme::kLmmseLsfd || scheme == Scheme::kLrzfLsfd) {
      return lsfd_two_layer(local_of(scheme), stats_, pilots_, est_, scenario_,
                            options(cfg_.obe_samples, cell_stream(cell_, d, kLsfdStats)))
          .report;
    }
    if (scheme == Scheme::kLmmse || scheme == Scheme::kLrzf) {
      const LocalCombinerSource source(local_of(scheme), est_, scenario_);
      if (dir == Direction::kUl) return se_uatf_mc(source, stats_, pilots_, est_, scenario_, eval);
      DlPowerMap power = dl_power_allocation(stats_, scenario_);
      normalize_mc(power, source, stats_, pilots_, est_, scenario_,
                   options(cfg_.obe_samples, cell_stream(cell_, d, kDlNorm)));
      return se_dl_mc(source, power, stats_, pilots_, est_, scenario_, eval);
    }

    const CombinerBank& w = bank(scheme);
    const LocalCombinerSource source(LocalScheme::kBe, est_, scenario_, &w);
    SeReport report;
    if (dir == Direction::kUl) {
      report = se_uatf_mc(source, stats_, pilots_, est_, scenario_, eval);
      merge_closed_form(report, se_closed_form_ul(w, stats_, pilots_, est_, scenario_));
    } else {
      DlPowerMap power = dl_power_allocation(stats_, scenario_);
      normalize_closed(power, w, est_);
      report = se_dl_mc(source, power, stats_, pilots_, est_, scenario_, eval);
      merge_closed_form(report, se_dl_closed(w, power, stats_, pilots_, est_, scenario_));
    }
    return report;
  }

 private:
  McOptions options(std::int64_t samples, std::uint64_t stream) const {
    McOptions o;
    o.realizations = samples;
    o.batches = cfg_.batches;
    o.workers = cfg_.workers;
    o.seed = cfg_.seed;
    o.stream = stream;
    return o;
  }

  // BE banks are shared by both directions of the cell.
  const CombinerBank& bank(Scheme scheme) {
    const int m = stats_.num_aps(), n = stats_.antennas(), k = stats_.num_ues();
    switch (scheme) {
      case Scheme::kMr:
        if (!identity_) identity_ = CombinerBank::identity(m, n, k);
        return *identity_;
      case Scheme::kObe:
        if (!obe_) obe_ = obe_closed(stats_, pilots_, est_, scenario_).bank;
        return *obe_;
      case Scheme::kObeMc:
        if (!obe_mc_) {
          obe_mc_ = obe_mc(stats_, pilots_, est_, scenario_, options(cfg_.obe_samples, cell_stream(cell_, 0, kObeStats)))
                        .bank;
        }
        return *obe_mc_;
      default:
        throw std::logic_error("no BE bank for scheme " + to_string(scheme));
    }
  }

  const ExperimentConfig& cfg_;
  const ScenarioConfig& scenario_;
  const ChannelStatistics& stats_;
  const PilotSetup& pilots_;
  const EstimatorBank& est_;
  std::uint64_t cell_;
  std::optional<CombinerBank> identity_, obe_, obe_mc_;
};

}  // namespace

ScenarioConfig cell_scenario(const ExperimentConfig& cfg, int trial, int sweep_value) {
  ScenarioConfig s = cfg.scenario;
  switch (cfg.sweep_axis) {
    case SweepAxis::kK: s.num_ues = sweep_value; break;
    case SweepAxis::kN: s.antennas_per_ap = sweep_value; break;
    case SweepAxis::kM: s.num_aps = sweep_value; break;
  }
  s.seed = splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(trial)));
  return s;
}

std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg, const ChannelStatistics* imported) {
  cfg.validate();
  std::vector<Direction> directions;
  if (cfg.direction != Direction::kDl) directions.push_back(Direction::kUl);
  if (cfg.direction != Direction::kUl) directions.push_back(Direction::kDl);

  std::vector<ReportRow> rows;
  const auto n_sweep = static_cast<std::uint64_t>(cfg.sweep_values.size());
  for (int trial = 0; trial < cfg.trials; ++trial) {
    for (std::size_t si = 0; si < cfg.sweep_values.size(); ++si) {
      const int value = cfg.sweep_values[si];
      const ScenarioConfig scenario = cell_scenario(cfg, trial, value);
      ChannelStatistics stats;
      if (imported) {
        if (imported->num_aps() != scenario.num_aps || imported->antennas() != scenario.antennas_per_ap ||
            imported->num_ues() != scenario.num_ues) {
          throw std::invalid_argument("run_experiment: imported statistics do not match the scenario dimensions");
        }
        stats = *imported;
      } else {
        stats = build_statistics(generate_geometry(scenario), scenario);
      }
      const PilotSetup pilots = assign_pilots(scenario);
      const std::uint64_t cell = static_cast<std::uint64_t>(trial) * n_sweep + si;

      for (const auto& spec : cfg.estimators) {
        const EstimatorBank est = build_estimator_bank(spec, stats, pilots, scenario);
        Cell runner(cfg, scenario, stats, pilots, est, cell);
        for (Direction dir : directions) {
          for (Scheme scheme : cfg.schemes) {
            if (!applies(scheme, dir)) continue;
            const auto start = std::chrono::steady_clock::now();
            const SeReport report = runner.run(scheme, dir);
            const double ms =
                cfg.timing ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count()
                           : 0.0;
            for (std::size_t k = 0; k < report.ue.size(); ++k) {
              const UeSe& ue = report.ue[k];
              ReportRow row;
              row.trial = trial;
              row.sweep = value;
              row.direction = to_string(dir);
              row.scheme = to_string(scheme);
              row.estimator = spec.name();
              row.ue = static_cast<int>(k);
              row.sinr_mc = ue.sinr_mc;
              row.se_mc = ue.se_mc;
              row.stderr_mc = ue.mc_stderr;
              row.sinr_cf = ue.sinr_cf;
              row.se_cf = ue.se_cf;
              row.wall_ms = ms;
              rows.push_back(std::move(row));
            }
          }
        }
      }
    }
  }
  return rows;
}

}  // namespace cfobe
