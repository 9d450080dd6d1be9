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

// Command-line experiment runner.

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <optional>

#include "cfobe/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Cell-free massive MIMO bilinear-equalizer experiments"};

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::string> direction;
  std::optional<std::int64_t> mc_samples;
  std::optional<std::int64_t> obe_samples;
  std::optional<int> workers;
  std::string export_stats;
  std::string import_stats;
  bool print_config = false;

  app.add_option("--config", config_path, "flat key = value experiment file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out, "report path (standard output when omitted)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}, CLI::ignore_case));
  app.add_option("--direction", direction, "ul, dl or both")->check(CLI::IsMember({"ul", "dl", "both"}, CLI::ignore_case));
  app.add_option("--mc-samples", mc_samples, "evaluation realizations per cell")->check(CLI::PositiveNumber);
  app.add_option("--obe-samples", obe_samples, "moment realizations for OBE-MC, LSFD and DL normalization")
      ->check(CLI::PositiveNumber);
  app.add_option("--workers", workers, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
  app.add_option("--export-stats", export_stats,
                 "write the channel statistics of trial 0, first sweep value, to this JSON file");
  app.add_option("--import-stats", import_stats, "use channel statistics from this JSON file for every cell")
      ->check(CLI::ExistingFile);
  app.add_flag("--print-config", print_config, "print the effective configuration and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    cfobe::ExperimentConfig cfg = config_path.empty() ? cfobe::ExperimentConfig{} : cfobe::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (out) cfg.output = *out;
    if (format) cfg.format = cfobe::parse_format(*format);
    if (direction) cfg.direction = cfobe::parse_direction(*direction);
    if (mc_samples) cfg.mc_samples = *mc_samples;
    if (obe_samples) cfg.obe_samples = *obe_samples;
    if (workers) cfg.workers = *workers;
    cfg.validate();

    if (print_config) {
      std::cout << cfobe::format_config(cfg);
      return 0;
    }

    if (!export_stats.empty()) {
      const cfobe::ScenarioConfig s = cfobe::cell_scenario(cfg, 0, cfg.sweep_values.front());
      cfobe::write_statistics(cfobe::build_statistics(cfobe::generate_geometry(s), s), export_stats);
    }

    std::optional<cfobe::ChannelStatistics> imported;
    if (!import_stats.empty()) imported = cfobe::read_statistics(import_stats);

    const auto rows = cfobe::run_experiment(cfg, imported ? &*imported : nullptr);
    cfobe::emit_report(rows, cfg.format, cfg.output);
  } catch (const std::exception& e) {
    std::cerr << "cfobe: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
