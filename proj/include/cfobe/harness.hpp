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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfobe/estimation.hpp"
#include "cfobe/scenario.hpp"

namespace cfobe {

enum class Direction { kUl, kDl, kBoth };
enum class SweepAxis { kK, kN, kM };
enum class ReportFormat { kCsv, kJson };

/// Schemes understood by the runner. LSFD schemes exist in UL only.
enum class Scheme { kMr, kObe, kObeMc, kLmmse, kLrzf, kLmmseLsfd, kLrzfLsfd };

std::string to_string(Scheme s);
std::string to_string(Direction d);
std::string to_string(SweepAxis a);
Scheme parse_scheme(const std::string& text);
Direction parse_direction(const std::string& text);
SweepAxis parse_sweep_axis(const std::string& text);
ReportFormat parse_format(const std::string& text);

struct ExperimentConfig {
  ScenarioConfig scenario;
  SweepAxis sweep_axis = SweepAxis::kK;
  std::vector<int> sweep_values{4};
  std::vector<Scheme> schemes{Scheme::kMr, Scheme::kObe};
  std::vector<EstimatorSpec> estimators{EstimatorSpec::mmse()};
  Direction direction = Direction::kUl;
  std::int64_t mc_samples = 2000;   // evaluation realizations per cell
  std::int64_t obe_samples = 2000;  // moment realizations for OBE-MC, LSFD and MC normalization
  int batches = 20;
  int trials = 1;
  int workers = 1;
  std::uint64_t seed = 1;
  bool timing = false;              // wall_ms stays 0 unless set
  std::string output;               // empty: standard output
  ReportFormat format = ReportFormat::kCsv;

  /// Throws std::invalid_argument on violated invariants.
  void validate() const;
};

/// Parses flat `key = value` text. Blank lines and `#` comments are ignored;
/// unknown keys and malformed values throw std::invalid_argument.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Writes the configuration in the same format, one key per line.
std::string format_config(const ExperimentConfig& cfg);

struct ReportRow {
  int trial = 0;
  int sweep = 0;
  std::string direction;
  std::string scheme;
  std::string estimator;
  int ue = 0;
  double sinr_mc = 0.0;
  double se_mc = 0.0;
  double stderr_mc = 0.0;
  double sinr_cf = 0.0;
  double se_cf = 0.0;
  double wall_ms = 0.0;

  bool operator==(const ReportRow&) const = default;
};

/// Scenario of one trial at one sweep value, before statistics are built.
ScenarioConfig cell_scenario(const ExperimentConfig& cfg, int trial, int sweep_value);

/// Runs every (trial, sweep value, direction, scheme, estimator) cell.
/// When `imported` is given it replaces the generated statistics of every
/// cell, and its dimensions must match the swept scenario.
std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg,
                                      const ChannelStatistics* imported = nullptr);

inline constexpr const char* kCsvHeader = "trial,sweep,direction,scheme,estimator,ue,sinr_mc,se_mc,stderr,sinr_cf,se_cf,wall_ms";

void write_csv(const std::vector<ReportRow>& rows, std::ostream& out);
std::vector<ReportRow> read_csv(std::istream& in);
nlohmann::json rows_to_json(const std::vector<ReportRow>& rows);
std::vector<ReportRow> rows_from_json(const nlohmann::json& doc);

/// Writes rows to `path` (standard output when empty). Throws
/// std::invalid_argument on empty rows and std::runtime_error when the file
/// cannot be written.
void emit_report(const std::vector<ReportRow>& rows, ReportFormat format, const std::string& path);

struct CdfPoint {
  double value = 0.0;
  double probability = 0.0;
};

/// Empirical CDF of the finite values: sorted ascending, probability i/n.
std::vector<CdfPoint> empirical_cdf(std::vector<double> values);

}  // namespace cfobe
