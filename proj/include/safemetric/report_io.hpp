// Copyright 2026 The safemetric Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Report output: one JSON object per line (full precision, lossless) and a
// fixed-point table laid out one metric per row, one scenario per column.

#ifndef SAFEMETRIC_REPORT_IO_HPP_
#define SAFEMETRIC_REPORT_IO_HPP_

#include <cstdio>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "safemetric/error.hpp"
#include "safemetric/safety.hpp"

namespace safemetric {

namespace detail {

using nlohmann::json;

inline json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline std::optional<double> read_opt(const json& obj, const char* key) {
  if (!obj.contains(key)) throw InputError(std::string("report: missing field ") + key);
  const json& v = obj[key];
  if (v.is_null()) return std::nullopt;
  if (!v.is_number()) throw InputError(std::string("report.") + key + ": expected number or null");
  return v.get<double>();
}

inline double read_num(const json& obj, const char* key) {
  auto v = read_opt(obj, key);
  if (!v) throw InputError(std::string("report.") + key + ": must not be null");
  return *v;
}

}  // namespace detail

inline nlohmann::json report_to_json(const SafetyReport& r) {
  using detail::json;
  using detail::opt;
  json frames = json::array();
  for (const FrameBreakdown& f : r.frames) {
    frames.push_back({{"index", f.index},
                      {"t", f.timestamp},
                      {"gt", f.gt},
                      {"tp", f.true_positives},
                      {"fp", f.false_positives},
                      {"miss", f.misses},
                      {"mme", f.mismatches},
                      {"critical", f.critical},
                      {"modp", opt(f.modp)},
                      {"f_c", f.relevance}});
  }
  return {{"scenario", r.scenario},
          {"precision", opt(r.precision)},
          {"recall", opt(r.recall)},
          {"mAP", opt(r.mean_average_precision)},
          {"MODA", opt(r.moda)},
          {"MODP", opt(r.modp)},
          {"MOTA", opt(r.mota)},
          {"MOTP", opt(r.motp)},
          {"MOTP_s", opt(r.motp_s)},
          {"f_c", r.relevance_factor},
          {"f_t", r.time_factor},
          {"t_dw", opt(r.weighted_perception_time)},
          {"S_D", opt(r.detection_safety)},
          {"S_T", opt(r.tracking_safety)},
          {"S", opt(r.safety)},
          {"label", r.label ? json(std::string(to_string(*r.label))) : json(nullptr)},
          {"w_D", r.weight_detection},
          {"w_T", r.weight_tracking},
          {"frames", std::move(frames)},
          {"warnings", r.warnings}};
}

inline SafetyReport report_from_json(const nlohmann::json& j) {
  using detail::read_num;
  using detail::read_opt;
  if (!j.is_object()) throw InputError("report: expected an object");
  SafetyReport r;
  try {
    r.scenario = j.at("scenario").get<std::string>();
    r.precision = read_opt(j, "precision");
    r.recall = read_opt(j, "recall");
    r.mean_average_precision = read_opt(j, "mAP");
    r.moda = read_opt(j, "MODA");
    r.modp = read_opt(j, "MODP");
    r.mota = read_opt(j, "MOTA");
    r.motp = read_opt(j, "MOTP");
    r.motp_s = read_opt(j, "MOTP_s");
    r.relevance_factor = read_num(j, "f_c");
    r.time_factor = read_num(j, "f_t");
    r.weighted_perception_time = read_opt(j, "t_dw");
    r.detection_safety = read_opt(j, "S_D");
    r.tracking_safety = read_opt(j, "S_T");
    r.safety = read_opt(j, "S");
    if (!j.at("label").is_null()) {
      r.label = parse_safety_label(j.at("label").get<std::string>());
      if (!r.label) throw InputError("report.label: unknown classification");
    }
    r.weight_detection = read_num(j, "w_D");
    r.weight_tracking = read_num(j, "w_T");
    for (const auto& fj : j.at("frames")) {
      FrameBreakdown f;
      f.index = fj.at("index").get<std::int64_t>();
      f.timestamp = fj.at("t").get<double>();
      f.gt = fj.at("gt").get<std::size_t>();
      f.true_positives = fj.at("tp").get<std::size_t>();
      f.false_positives = fj.at("fp").get<std::size_t>();
      f.misses = fj.at("miss").get<std::size_t>();
      f.mismatches = fj.at("mme").get<std::size_t>();
      f.critical = fj.at("critical").get<std::size_t>();
      f.modp = read_opt(fj, "modp");
      f.relevance = read_num(fj, "f_c");
      r.frames.push_back(f);
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("report: ") + e.what());
  }
  return r;
}

/// One compact JSON object per line, in input order.
inline std::string emit_jsonl(std::span<const SafetyReport> reports) {
  std::string out;
  for (const SafetyReport& r : reports) out += report_to_json(r).dump() + "\n";
  return out;
}

inline std::vector<SafetyReport> parse_jsonl(const std::string& text,
                                             const std::string& source = "<reports>") {
  std::vector<SafetyReport> out;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw InputError(source + ":" + std::to_string(line_no) + ": malformed JSON line");
    }
    out.push_back(report_from_json(j));
  }
  return out;
}

struct TableRow {
  std::string name;
  std::optional<double> (*get)(const SafetyReport&);
};

/// Metric rows in display order.
inline const std::vector<TableRow>& table_rows() {
  static const std::vector<TableRow> rows = {
      {"Precision", [](const SafetyReport& r) { return r.precision; }},
      {"Recall", [](const SafetyReport& r) { return r.recall; }},
      {"mAP", [](const SafetyReport& r) { return r.mean_average_precision; }},
      {"MODA", [](const SafetyReport& r) { return r.moda; }},
      {"MODP", [](const SafetyReport& r) { return r.modp; }},
      {"MOTA", [](const SafetyReport& r) { return r.mota; }},
      {"MOTP [m]", [](const SafetyReport& r) { return r.motp; }},
      {"S_D", [](const SafetyReport& r) { return r.detection_safety; }},
      {"S_T", [](const SafetyReport& r) { return r.tracking_safety; }},
      {"Safety score S", [](const SafetyReport& r) { return r.safety; }},
  };
  return rows;
}

namespace detail {

inline std::string fixed2(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", *v);
  return buf;
}

inline std::string signed2(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%+.2f", *v);
  return buf;
}

inline std::string pad(const std::string& s, std::size_t width, bool left = false) {
  if (s.size() >= width) return s;
  return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

inline std::string column_name(const SafetyReport& r, std::size_t i) {
  return r.scenario.empty() ? "#" + std::to_string(i + 1) : r.scenario;
}

}  // namespace detail

/// Metric-per-row table with two decimals.
inline std::string format_table(std::span<const SafetyReport> reports) {
  std::size_t width = 8;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    width = std::max(width, detail::column_name(reports[i], i).size() + 2);
    if (reports[i].label) width = std::max(width, to_string(*reports[i].label).size() + 2);
  }
  constexpr std::size_t kNameWidth = 16;
  std::string out = detail::pad("", kNameWidth, true);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    out += detail::pad(detail::column_name(reports[i], i), width);
  }
  out += "\n";
  for (const TableRow& row : table_rows()) {
    out += detail::pad(row.name, kNameWidth, true);
    for (const SafetyReport& r : reports) out += detail::pad(detail::fixed2(row.get(r)), width);
    out += "\n";
  }
  out += detail::pad("Classification", kNameWidth, true);
  for (const SafetyReport& r : reports) {
    out += detail::pad(r.label ? std::string(to_string(*r.label)) : "-", width);
  }
  out += "\n";
  return out;
}

/// Side-by-side metric columns plus signed deltas of each report against
/// the first one.
inline std::string format_comparison(std::span<const SafetyReport> reports) {
  if (reports.size() < 2) throw InputError("compare: need >= 2 reports");
  std::size_t width = 10;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    width = std::max(width, detail::column_name(reports[i], i).size() + 2);
  }
  constexpr std::size_t kNameWidth = 16;
  std::string out = detail::pad("", kNameWidth, true);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    out += detail::pad(detail::column_name(reports[i], i), width);
  }
  for (std::size_t i = 1; i < reports.size(); ++i) {
    out += detail::pad("d" + std::to_string(i + 1) + "-1", width);
  }
  out += "\n";
  auto delta = [](std::optional<double> a, std::optional<double> b) -> std::optional<double> {
    if (!a || !b) return std::nullopt;
    return *b - *a;
  };
  for (const TableRow& row : table_rows()) {
    out += detail::pad(row.name, kNameWidth, true);
    for (const SafetyReport& r : reports) out += detail::pad(detail::fixed2(row.get(r)), width);
    for (std::size_t i = 1; i < reports.size(); ++i) {
      out += detail::pad(detail::signed2(delta(row.get(reports[0]), row.get(reports[i]))), width);
    }
    out += "\n";
  }
  out += detail::pad("Classification", kNameWidth, true);
  for (const SafetyReport& r : reports) {
    out += detail::pad(r.label ? std::string(to_string(*r.label)) : "-", width);
  }
  out += "\n";
  return out;
}

/// Raw (unrounded) deltas of each table metric, report[i] - report[0].
inline std::vector<std::vector<std::optional<double>>> metric_deltas(
    std::span<const SafetyReport> reports) {
  if (reports.size() < 2) throw InputError("compare: need >= 2 reports");
  std::vector<std::vector<std::optional<double>>> out;
  for (std::size_t i = 1; i < reports.size(); ++i) {
    std::vector<std::optional<double>> row;
    for (const TableRow& m : table_rows()) {
      auto a = m.get(reports[0]);
      auto b = m.get(reports[i]);
      row.push_back(a && b ? std::optional<double>(*b - *a) : std::nullopt);
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace safemetric

#endif  // SAFEMETRIC_REPORT_IO_HPP_
