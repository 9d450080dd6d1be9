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
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cfobe/harness.hpp"

namespace cfobe {

namespace {

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& text) {
  if (text == "nan" || text.empty()) return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) throw std::invalid_argument("report: bad number '" + text + "'");
  return v;
}

nlohmann::json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

double from_json_number(const nlohmann::json& v) {
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

}  // namespace

void write_csv(const std::vector<ReportRow>& rows, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.trial << ',' << r.sweep << ',' << r.direction << ',' << r.scheme << ',' << r.estimator << ',' << r.ue
        << ',' << number(r.sinr_mc) << ',' << number(r.se_mc) << ',' << number(r.stderr_mc) << ','
        << number(r.sinr_cf) << ',' << number(r.se_cf) << ',' << number(r.wall_ms) << '\n';
  }
}

std::vector<ReportRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::invalid_argument("read_csv: missing or wrong header");
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != 12) throw std::invalid_argument("read_csv: expected 12 fields in '" + line + "'");
    ReportRow r;
    r.trial = std::stoi(f[0]);
    r.sweep = std::stoi(f[1]);
    r.direction = f[2];
    r.scheme = f[3];
    r.estimator = f[4];
    r.ue = std::stoi(f[5]);
    r.sinr_mc = parse_number(f[6]);
    r.se_mc = parse_number(f[7]);
    r.stderr_mc = parse_number(f[8]);
    r.sinr_cf = parse_number(f[9]);
    r.se_cf = parse_number(f[10]);
    r.wall_ms = parse_number(f[11]);
    rows.push_back(std::move(r));
  }
  return rows;
}

nlohmann::json rows_to_json(const std::vector<ReportRow>& rows) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& r : rows) {
    doc.push_back({{"trial", r.trial},
                   {"sweep", r.sweep},
                   {"direction", r.direction},
                   {"scheme", r.scheme},
                   {"estimator", r.estimator},
                   {"ue", r.ue},
                   {"sinr_mc", json_number(r.sinr_mc)},
                   {"se_mc", json_number(r.se_mc)},
                   {"stderr", json_number(r.stderr_mc)},
                   {"sinr_cf", json_number(r.sinr_cf)},
                   {"se_cf", json_number(r.se_cf)},
                   {"wall_ms", json_number(r.wall_ms)}});
  }
  return doc;
}

std::vector<ReportRow> rows_from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) throw std::invalid_argument("rows_from_json: expected an array of rows");
  std::vector<ReportRow> rows;
  for (const auto& o : doc) {
    ReportRow r;
    r.trial = o.at("trial").get<int>();
    r.sweep = o.at("sweep").get<int>();
    r.direction = o.at("direction").get<std::string>();
    r.scheme = o.at("scheme").get<std::string>();
    r.estimator = o.at("estimator").get<std::string>();
    r.ue = o.at("ue").get<int>();
    r.sinr_mc = from_json_number(o.at("sinr_mc"));
    r.se_mc = from_json_number(o.at("se_mc"));
    r.stderr_mc = from_json_number(o.at("stderr"));
    r.sinr_cf = from_json_number(o.at("sinr_cf"));
    r.se_cf = from_json_number(o.at("se_cf"));
    r.wall_ms = from_json_number(o.at("wall_ms"));
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit_report(const std::vector<ReportRow>& rows, ReportFormat format, const std::string& path) {
  if (rows.empty()) throw std::invalid_argument("emit_report: no rows to write");
  std::ofstream file;
  if (!path.empty()) {
    file.open(path);
    if (!file) throw std::runtime_error("emit_report: cannot write '" + path + "'");
  }
  std::ostream& out = path.empty() ? std::cout : file;
  if (format == ReportFormat::kCsv) {
    write_csv(rows, out);
  } else {
    out << rows_to_json(rows).dump(1) << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("emit_report: write to '" + (path.empty() ? std::string("stdout") : path) + "' failed");
}

std::vector<CdfPoint> empirical_cdf(std::vector<double> values) {
  values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return !std::isfinite(v); }), values.end());
  std::sort(values.begin(), values.end());
  std::vector<CdfPoint> out;
  const auto n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out.push_back({values[i], static_cast<double>(i + 1) / n});
  return out;
}

}  // namespace cfobe
