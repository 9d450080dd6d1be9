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

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "cfobe/harness.hpp"

namespace cfobe {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

long long to_integer(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::logic_error&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) throw std::invalid_argument("config: '" + key + "' expects an integer, got '" + value + "'");
  return v;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    if (!value.empty() && value[0] != '-') v = std::stoull(value, &used);
  } catch (const std::logic_error&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) {
    throw std::invalid_argument("config: '" + key + "' expects an unsigned integer, got '" + value + "'");
  }
  return v;
}

double to_real(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::logic_error&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) throw std::invalid_argument("config: '" + key + "' expects a number, got '" + value + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& value) {
  const std::string v = upper(value);
  if (v == "TRUE" || v == "1" || v == "YES" || v == "ON") return true;
  if (v == "FALSE" || v == "0" || v == "NO" || v == "OFF") return false;
  throw std::invalid_argument("config: '" + key + "' expects true/false, got '" + value + "'");
}

std::string real_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"num_aps", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.scenario.num_aps = static_cast<int>(to_integer(k, v)); }},
      {"antennas_per_ap", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.scenario.antennas_per_ap = static_cast<int>(to_integer(k, v)); }},
      {"num_ues", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.scenario.num_ues = static_cast<int>(to_integer(k, v)); }},
      {"area_side_m", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.scenario.area_side_m = to_real(k, v); }},
      {"tau_c", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.scenario.tau_c = static_cast<int>(to_integer(k, v)); }},
      {"tau_p", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.scenario.tau_p = static_cast<int>(to_integer(k, v)); }},
      {"ul_power_w", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.scenario.ul_power_w = to_real(k, v); }},
      {"dl_power_per_ue_w", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.scenario.dl_power_per_ue_w = to_real(k, v); }},
      {"ap_power_budget_w", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.scenario.ap_power_budget_w = to_real(k, v); }},
      {"noise_power_w", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.scenario.noise_power_w = to_real(k, v); }},
      {"noise_power_dbm", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.scenario.noise_power_w = dbm_to_watts(to_real(k, v)); }},
      {"rayleigh", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.scenario.propagation.rayleigh = to_bool(k, v); }},
      {"pathloss_ref_db", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.scenario.propagation.pathloss_ref_db = to_real(k, v); }},
      {"pathloss_exponent", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.scenario.propagation.pathloss_exponent = to_real(k, v); }},
      {"rician_ref_db", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.scenario.propagation.rician_ref_db = to_real(k, v); }},
      {"rician_slope_db_per_m", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.scenario.propagation.rician_slope_db_per_m = to_real(k, v); }},
      {"angular_spread_deg", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.scenario.propagation.angular_spread_deg = to_real(k, v); }},
      {"antenna_spacing", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.scenario.propagation.antenna_spacing = to_real(k, v); }},
      {"min_distance_m", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.scenario.propagation.min_distance_m = to_real(k, v); }},
      {"sweep_axis", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.sweep_axis = parse_sweep_axis(v); }},
      {"sweep_values", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.sweep_values.clear();
         for (const auto& item : split_list(v)) c.sweep_values.push_back(static_cast<int>(to_integer(k, item)));
       }},
      {"schemes", [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.schemes.clear();
         for (const auto& item : split_list(v)) c.schemes.push_back(parse_scheme(item));
       }},
      {"estimators", [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.estimators.clear();
         for (const auto& item : split_list(v)) c.estimators.push_back(EstimatorSpec::parse(item));
       }},
      {"direction", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.direction = parse_direction(v); }},
      {"mc_samples", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.mc_samples = to_integer(k, v); }},
      {"obe_samples", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.obe_samples = to_integer(k, v); }},
      {"batches", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.batches = static_cast<int>(to_integer(k, v)); }},
      {"trials", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.trials = static_cast<int>(to_integer(k, v)); }},
      {"workers", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.workers = static_cast<int>(to_integer(k, v)); }},
      {"seed", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.seed = to_unsigned(k, v); }},
      {"timing", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.timing = to_bool(k, v); }},
      {"output", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.output = v; }},
      {"format", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.format = parse_format(v); }},
  };
  return table;
}

}  // namespace

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::kMr: return "MR";
    case Scheme::kObe: return "OBE";
    case Scheme::kObeMc: return "OBE-MC";
    case Scheme::kLmmse: return "LMMSE";
    case Scheme::kLrzf: return "LRZF";
    case Scheme::kLmmseLsfd: return "LMMSE-LSFD";
    case Scheme::kLrzfLsfd: return "LRZF-LSFD";
  }
  return "?";
}

std::string to_string(Direction d) {
  switch (d) {
    case Direction::kUl: return "ul";
    case Direction::kDl: return "dl";
    case Direction::kBoth: return "both";
  }
  return "?";
}

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::kK: return "K";
    case SweepAxis::kN: return "N";
    case SweepAxis::kM: return "M";
  }
  return "?";
}

Scheme parse_scheme(const std::string& text) {
  const std::string u = upper(trim(text));
  for (Scheme s : {Scheme::kMr, Scheme::kObe, Scheme::kObeMc, Scheme::kLmmse, Scheme::kLrzf, Scheme::kLmmseLsfd,
                   Scheme::kLrzfLsfd}) {
    if (u == to_string(s)) return s;
  }
  throw std::invalid_argument("unknown scheme '" + text +
                              "' (expected MR, OBE, OBE-MC, LMMSE, LRZF, LMMSE-LSFD, LRZF-LSFD)");
}

Direction parse_direction(const std::string& text) {
  const std::string u = upper(trim(text));
  if (u == "UL") return Direction::kUl;
  if (u == "DL") return Direction::kDl;
  if (u == "BOTH") return Direction::kBoth;
  throw std::invalid_argument("unknown direction '" + text + "' (expected ul, dl or both)");
}

SweepAxis parse_sweep_axis(const std::string& text) {
  const std::string u = upper(trim(text));
  if (u == "K") return SweepAxis::kK;
  if (u == "N") return SweepAxis::kN;
  if (u == "M") return SweepAxis::kM;
  throw std::invalid_argument("unknown sweep axis '" + text + "' (expected K, N or M)");
}

ReportFormat parse_format(const std::string& text) {
  const std::string u = upper(trim(text));
  if (u == "CSV") return ReportFormat::kCsv;
  if (u == "JSON") return ReportFormat::kJson;
  throw std::invalid_argument("unknown format '" + text + "' (expected csv or json)");
}

void ExperimentConfig::validate() const {
  if (sweep_values.empty()) throw std::invalid_argument("config: sweep_values must not be empty");
  for (int v : sweep_values) {
    if (v < 1) throw std::invalid_argument("config: sweep values must be >= 1");
  }
  if (schemes.empty()) throw std::invalid_argument("config: schemes must not be empty");
  if (estimators.empty()) throw std::invalid_argument("config: estimators must not be empty");
  for (const auto& e : estimators) {
    if (e.kind == EstimatorKind::kCustom) throw std::invalid_argument("config: Custom estimators are not configurable");
  }
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
  if (batches < 2) throw std::invalid_argument("config: batches must be >= 2");
  if (mc_samples < batches || obe_samples < batches) {
    throw std::invalid_argument("config: mc_samples and obe_samples must be >= batches");
  }
  for (int v : sweep_values) cell_scenario(*this, 0, v).validate();
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw std::invalid_argument("config line " + std::to_string(number) + ": unknown key '" + key + "'");
    }
    it->second(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string format_config(const ExperimentConfig& cfg) {
  const ScenarioConfig& s = cfg.scenario;
  const PropagationModel& p = s.propagation;
  std::ostringstream out;
  auto join = [](const auto& items, auto fn) {
    std::string text;
    for (const auto& item : items) text += (text.empty() ? "" : ",") + fn(item);
    return text;
  };
  out << "num_aps = " << s.num_aps << '\n'
      << "antennas_per_ap = " << s.antennas_per_ap << '\n'
      << "num_ues = " << s.num_ues << '\n'
      << "area_side_m = " << real_text(s.area_side_m) << '\n'
      << "tau_c = " << s.tau_c << '\n'
      << "tau_p = " << s.tau_p << '\n'
      << "ul_power_w = " << real_text(s.ul_power_w) << '\n'
      << "dl_power_per_ue_w = " << real_text(s.dl_power_per_ue_w) << '\n'
      << "ap_power_budget_w = " << real_text(s.ap_power_budget_w) << '\n'
      << "noise_power_w = " << real_text(s.noise_power_w) << '\n'
      << "rayleigh = " << (p.rayleigh ? "true" : "false") << '\n'
      << "pathloss_ref_db = " << real_text(p.pathloss_ref_db) << '\n'
      << "pathloss_exponent = " << real_text(p.pathloss_exponent) << '\n'
      << "rician_ref_db = " << real_text(p.rician_ref_db) << '\n'
      << "rician_slope_db_per_m = " << real_text(p.rician_slope_db_per_m) << '\n'
      << "angular_spread_deg = " << real_text(p.angular_spread_deg) << '\n'
      << "antenna_spacing = " << real_text(p.antenna_spacing) << '\n'
      << "min_distance_m = " << real_text(p.min_distance_m) << '\n'
      << "sweep_axis = " << to_string(cfg.sweep_axis) << '\n'
      << "sweep_values = " << join(cfg.sweep_values, [](int v) { return std::to_string(v); }) << '\n'
      << "schemes = " << join(cfg.schemes, [](Scheme v) { return to_string(v); }) << '\n'
      << "estimators = " << join(cfg.estimators, [](const EstimatorSpec& v) {
           std::string name = v.kind == EstimatorKind::kApproxMmse ? "ApproxMMSE:" + real_text(v.perturbation) : v.name();
           if (v.kind == EstimatorKind::kApproxMmse && v.perturbation_seed != 0) name += ":" + std::to_string(v.perturbation_seed);
           return name;
         }) << '\n'
      << "direction = " << to_string(cfg.direction) << '\n'
      << "mc_samples = " << cfg.mc_samples << '\n'
      << "obe_samples = " << cfg.obe_samples << '\n'
      << "batches = " << cfg.batches << '\n'
      << "trials = " << cfg.trials << '\n'
      << "workers = " << cfg.workers << '\n'
      << "seed = " << cfg.seed << '\n'
      << "timing = " << (cfg.timing ? "true" : "false") << '\n'
      << "format = " << (cfg.format == ReportFormat::kCsv ? "csv" : "json") << '\n';
  if (!cfg.output.empty()) out << "output = " << cfg.output << '\n';
  return out.str();
}

}  // namespace cfobe
