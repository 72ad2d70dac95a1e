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

// Evaluation configuration and its JSON file form. Every key is optional;
// unknown keys are rejected.
//
//   {"matching":     {"iou_threshold": 0.5},
//    "verification": {"enabled": true, "mC": 0.5, "oT": 1.5, "mO": 3.0,
//                     "max_distance": 100},
//    "motp":         {"T_l": 0.8, "T_u": 2.5},
//    "rss":          {"rho", "a_accel_max", "a_brake_min", "a_brake_max",
//                     "a_lat_accel_max", "a_lat_brake_min", "mu_lat"},
//    "severity":     {"vru": [2.8, 6.9, 15.3], "crumple": [4.2, 13.9, 22.2]},
//    "prediction":   {"dt": 0.1},
//    "time":         {"T_l": 0.1, "weighting": "count" | "weight_sum"},
//    "weights":      {"w_D": 0.5, "w_T": 0.5},
//    "aggregation":  {"mode": "cumulative" | "per_frame_mean"},
//    "threads": 1}
//
// "rss" values override the scenario's environment block.

#ifndef SAFEMETRIC_CONFIG_HPP_
#define SAFEMETRIC_CONFIG_HPP_

#include <array>
#include <cmath>
#include <optional>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "safemetric/clear_metrics.hpp"
#include "safemetric/collision_relevance.hpp"
#include "safemetric/error.hpp"
#include "safemetric/iou_verification.hpp"
#include "safemetric/perception_time.hpp"
#include "safemetric/scenario.hpp"

namespace safemetric {

struct MetricWeights {
  double detection = 0.5;  // w_D
  double tracking = 0.5;   // w_T
};

enum class AggregationMode { kCumulative, kPerFrameMean };

struct RssOverrides {
  std::optional<double> response_time, a_accel_max, a_brake_min, a_brake_max, a_lat_accel_max,
      a_lat_brake_min, lateral_fluctuation;

  RssParams apply(RssParams p) const {
    if (response_time) p.response_time = *response_time;
    if (a_accel_max) p.a_accel_max = *a_accel_max;
    if (a_brake_min) p.a_brake_min = *a_brake_min;
    if (a_brake_max) p.a_brake_max = *a_brake_max;
    if (a_lat_accel_max) p.a_lat_accel_max = *a_lat_accel_max;
    if (a_lat_brake_min) p.a_lat_brake_min = *a_lat_brake_min;
    if (lateral_fluctuation) p.lateral_fluctuation = *lateral_fluctuation;
    return p;
  }
};

struct EvaluationConfig {
  double iou_threshold = kDefaultIouThreshold;
  bool verification_enabled = true;
  VerificationConfig verification;
  NormalizationThresholds motp_thresholds{0.8, 2.5};
  RssOverrides rss;
  RelevanceConfig relevance;
  double time_lower = 0.1;
  TimeWeighting time_weighting = TimeWeighting::kObjectCount;
  MetricWeights weights;
  AggregationMode aggregation = AggregationMode::kCumulative;
  unsigned threads = 1;
};

inline void validate(const EvaluationConfig& cfg) {
  if (!(cfg.iou_threshold >= 0.0 && cfg.iou_threshold <= 1.0)) {
    throw ConfigError("matching.iou_threshold must be in [0,1]");
  }
  validate(cfg.verification);
  validate(cfg.motp_thresholds);
  validate(cfg.relevance.severity);
  if (!(cfg.relevance.prediction_dt > 0.0)) throw ConfigError("prediction.dt must be > 0");
  if (!(cfg.time_lower >= 0.0)) throw ConfigError("time.T_l must be >= 0");
  const MetricWeights& w = cfg.weights;
  if (w.detection < 0.0 || w.detection > 1.0 || w.tracking < 0.0 || w.tracking > 1.0 ||
      std::abs(w.detection + w.tracking - 1.0) > 1e-12) {
    throw ConfigError("weights: w_D, w_T must be in [0,1] and sum to 1");
  }
  if (cfg.threads == 0) throw ConfigError("threads must be >= 1");
}

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::set<std::string>& known,
                           const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) throw ConfigError(where + "." + key + ": unknown key");
  }
}

inline void read_number(const json& obj, const std::string& key, const std::string& where,
                        double& out) {
  if (!obj.contains(key)) return;
  if (!obj[key].is_number()) throw ConfigError(where + "." + key + ": expected a number");
  out = obj[key].get<double>();
}

inline void read_number(const json& obj, const std::string& key, const std::string& where,
                        std::optional<double>& out) {
  if (!obj.contains(key)) return;
  double v = 0.0;
  read_number(obj, key, where, v);
  out = v;
}

inline std::array<double, 3> read_cuts(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) throw ConfigError(where + ": expected 3 numbers");
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!v[i].is_number()) throw ConfigError(where + ": expected 3 numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

}  // namespace detail

/// Applies the keys present in `doc` on top of `cfg`.
inline EvaluationConfig apply_config_json(EvaluationConfig cfg, const nlohmann::json& doc) {
  using detail::read_number;
  detail::reject_unknown(doc, {"matching", "verification", "motp", "rss", "severity", "prediction",
                               "time", "weights", "aggregation", "threads"},
                         "config");
  if (doc.contains("matching")) {
    const auto& s = doc["matching"];
    detail::reject_unknown(s, {"iou_threshold"}, "matching");
    read_number(s, "iou_threshold", "matching", cfg.iou_threshold);
  }
  if (doc.contains("verification")) {
    const auto& s = doc["verification"];
    detail::reject_unknown(s, {"enabled", "mC", "oT", "mO", "max_distance"}, "verification");
    if (s.contains("enabled")) {
      if (!s["enabled"].is_boolean()) throw ConfigError("verification.enabled: expected a boolean");
      cfg.verification_enabled = s["enabled"].get<bool>();
    }
    read_number(s, "mC", "verification", cfg.verification.min_cover);
    read_number(s, "oT", "verification", cfg.verification.over_tolerance);
    read_number(s, "mO", "verification", cfg.verification.max_over_detection);
    read_number(s, "max_distance", "verification", cfg.verification.range.max_distance);
  }
  if (doc.contains("motp")) {
    const auto& s = doc["motp"];
    detail::reject_unknown(s, {"T_l", "T_u"}, "motp");
    read_number(s, "T_l", "motp", cfg.motp_thresholds.lower);
    read_number(s, "T_u", "motp", cfg.motp_thresholds.upper);
  }
  if (doc.contains("rss")) {
    const auto& s = doc["rss"];
    detail::reject_unknown(s, {"rho", "a_accel_max", "a_brake_min", "a_brake_max",
                               "a_lat_accel_max", "a_lat_brake_min", "mu_lat"},
                           "rss");
    read_number(s, "rho", "rss", cfg.rss.response_time);
    read_number(s, "a_accel_max", "rss", cfg.rss.a_accel_max);
    read_number(s, "a_brake_min", "rss", cfg.rss.a_brake_min);
    read_number(s, "a_brake_max", "rss", cfg.rss.a_brake_max);
    read_number(s, "a_lat_accel_max", "rss", cfg.rss.a_lat_accel_max);
    read_number(s, "a_lat_brake_min", "rss", cfg.rss.a_lat_brake_min);
    read_number(s, "mu_lat", "rss", cfg.rss.lateral_fluctuation);
  }
  if (doc.contains("severity")) {
    const auto& s = doc["severity"];
    detail::reject_unknown(s, {"vru", "crumple"}, "severity");
    if (s.contains("vru")) cfg.relevance.severity.vru = detail::read_cuts(s["vru"], "severity.vru");
    if (s.contains("crumple")) {
      cfg.relevance.severity.crumple_zone = detail::read_cuts(s["crumple"], "severity.crumple");
    }
  }
  if (doc.contains("prediction")) {
    const auto& s = doc["prediction"];
    detail::reject_unknown(s, {"dt"}, "prediction");
    read_number(s, "dt", "prediction", cfg.relevance.prediction_dt);
  }
  if (doc.contains("time")) {
    const auto& s = doc["time"];
    detail::reject_unknown(s, {"T_l", "weighting"}, "time");
    read_number(s, "T_l", "time", cfg.time_lower);
    if (s.contains("weighting")) {
      const auto& v = s["weighting"];
      if (v == "count") {
        cfg.time_weighting = TimeWeighting::kObjectCount;
      } else if (v == "weight_sum") {
        cfg.time_weighting = TimeWeighting::kWeightSum;
      } else {
        throw ConfigError("time.weighting: expected \"count\" or \"weight_sum\"");
      }
    }
  }
  if (doc.contains("weights")) {
    const auto& s = doc["weights"];
    detail::reject_unknown(s, {"w_D", "w_T"}, "weights");
    read_number(s, "w_D", "weights", cfg.weights.detection);
    read_number(s, "w_T", "weights", cfg.weights.tracking);
  }
  if (doc.contains("aggregation")) {
    const auto& s = doc["aggregation"];
    detail::reject_unknown(s, {"mode"}, "aggregation");
    if (s.contains("mode")) {
      const auto& v = s["mode"];
      if (v == "cumulative") {
        cfg.aggregation = AggregationMode::kCumulative;
      } else if (v == "per_frame_mean") {
        cfg.aggregation = AggregationMode::kPerFrameMean;
      } else {
        throw ConfigError("aggregation.mode: expected \"cumulative\" or \"per_frame_mean\"");
      }
    }
  }
  if (doc.contains("threads")) {
    if (!doc["threads"].is_number_unsigned()) throw ConfigError("threads: expected a positive integer");
    cfg.threads = doc["threads"].get<unsigned>();
  }
  validate(cfg);
  return cfg;
}

inline EvaluationConfig parse_config(const std::string& text, EvaluationConfig base = {}) {
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false, /*ignore_comments=*/true);
  if (doc.is_discarded()) throw ConfigError("config: malformed JSON");
  return apply_config_json(std::move(base), doc);
}

inline EvaluationConfig load_config(const std::string& path, EvaluationConfig base = {}) {
  std::string text;
  try {
    text = detail::read_file(path);
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text, std::move(base));
}

}  // namespace safemetric

#endif  // SAFEMETRIC_CONFIG_HPP_
