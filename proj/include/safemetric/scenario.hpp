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

// Data model for ground-truth scenarios and perception logs, plus the
// line-delimited JSON file format used to store them.
//
// Scenario file: a header line {"meta": {...}, "environment": {...}}
// followed by one frame object per line:
//   {"index": 0, "t": 0.0,
//    "ego": {"x", "y", "yaw", "v", "l", "w"},
//    "objects": [{"id", "class", "x", "y", "yaw", "l", "w", "vx", "vy"}]}
//
// Perception log: one line per frame:
//   {"index": 0, "detections": [{"x", "y", "yaw", "l", "w", "class",
//                                "score", "track_id"?, "t_detect"?}]}
//
// Both loaders also accept a single JSON document with a "frames" array.

#ifndef SAFEMETRIC_SCENARIO_HPP_
#define SAFEMETRIC_SCENARIO_HPP_

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "safemetric/error.hpp"
#include "safemetric/geometry.hpp"

namespace safemetric {

enum class ObjectClass { kCar, kVan, kTruck, kPedestrian, kCyclist, kTram, kMisc };

enum class RoadUserCategory { kVru, kCrumpleZone };

inline RoadUserCategory category_of(ObjectClass c) {
  return (c == ObjectClass::kPedestrian || c == ObjectClass::kCyclist)
             ? RoadUserCategory::kVru
             : RoadUserCategory::kCrumpleZone;
}

inline std::string_view to_string(ObjectClass c) {
  switch (c) {
    case ObjectClass::kCar: return "car";
    case ObjectClass::kVan: return "van";
    case ObjectClass::kTruck: return "truck";
    case ObjectClass::kPedestrian: return "pedestrian";
    case ObjectClass::kCyclist: return "cyclist";
    case ObjectClass::kTram: return "tram";
    case ObjectClass::kMisc: return "misc";
  }
  return "misc";
}

inline std::optional<ObjectClass> parse_object_class(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  for (ObjectClass c : {ObjectClass::kCar, ObjectClass::kVan, ObjectClass::kTruck,
                        ObjectClass::kPedestrian, ObjectClass::kCyclist,
                        ObjectClass::kTram, ObjectClass::kMisc}) {
    if (lower == to_string(c)) return c;
  }
  return std::nullopt;
}

struct ObjectState {
  std::string id;
  ObjectClass class_label = ObjectClass::kCar;
  OrientedBox box;
  Vec2 velocity;

  RoadUserCategory category() const { return category_of(class_label); }
  friend bool operator==(const ObjectState&, const ObjectState&) = default;
};

struct EgoState {
  Vec2 position;
  double yaw = 0.0;
  double speed = 0.0;
  double length = 4.5;
  double width = 1.8;

  Vec2 heading() const { return {std::cos(yaw), std::sin(yaw)}; }
  Vec2 velocity() const { return speed * heading(); }
  OrientedBox box() const { return {position.x, position.y, length, width, yaw}; }
  friend bool operator==(const EgoState&, const EgoState&) = default;
};

/// Responsibility-sensitive-safety distance parameters.
struct RssParams {
  double response_time = 0.5;
  double a_accel_max = 2.0;
  double a_brake_min = 4.0;
  double a_brake_max = 8.0;
  double a_lat_accel_max = 1.0;
  double a_lat_brake_min = 1.0;
  double lateral_fluctuation = 0.2;

  friend bool operator==(const RssParams&, const RssParams&) = default;
};

struct EnvironmentParams {
  double friction = 0.8;  // dry asphalt
  double gravity = 9.81;
  std::optional<double> brake_deceleration_override;
  RssParams rss;

  /// Weather-dependent ego braking deceleration a = mu * g unless overridden.
  double brake_deceleration() const {
    return brake_deceleration_override.value_or(friction * gravity);
  }
  friend bool operator==(const EnvironmentParams&, const EnvironmentParams&) = default;
};

struct Frame {
  std::int64_t index = 0;
  double timestamp = 0.0;
  EgoState ego;
  std::vector<ObjectState> objects;

  friend bool operator==(const Frame&, const Frame&) = default;
};

struct ScenarioMeta {
  std::string name;
  double frame_rate_hz = 10.0;
  friend bool operator==(const ScenarioMeta&, const ScenarioMeta&) = default;
};

struct Scenario {
  ScenarioMeta meta;
  EnvironmentParams environment;
  std::vector<Frame> frames;
  std::vector<std::string> warnings;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct Detection {
  OrientedBox box;
  ObjectClass class_label = ObjectClass::kCar;
  double score = 1.0;
  std::optional<std::string> track_id;
  double detection_timestamp = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct PerceptionLog {
  std::vector<std::vector<Detection>> frames;
  /// True when at least one detection carries a track id.
  bool has_track_ids = false;
  /// True when some detection omitted t_detect and got its frame timestamp.
  bool timestamps_defaulted = false;
  std::vector<std::string> warnings;

  friend bool operator==(const PerceptionLog&, const PerceptionLog&) = default;
};

namespace detail {

using nlohmann::json;

inline std::string frame_prefix(std::int64_t frame) {
  return "frame " + std::to_string(frame) + ": ";
}

inline const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) throw InputError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(where + "." + key + ": missing field");
  return *it;
}

inline double require_number(const json& obj, const std::string& key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) throw InputError(where + "." + key + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw InputError(where + "." + key + ": not finite");
  return d;
}

inline double optional_number(const json& obj, const std::string& key, double fallback,
                              const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return require_number(obj, key, where);
}

inline std::string require_string(const json& obj, const std::string& key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) throw InputError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

// Ids may be written as strings or integers.
inline std::string require_id(const json& obj, const std::string& key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  throw InputError(where + "." + key + ": expected a string or integer id");
}

inline OrientedBox parse_box(const json& obj, const std::string& where) {
  OrientedBox box{require_number(obj, "x", where), require_number(obj, "y", where),
                  require_number(obj, "l", where), require_number(obj, "w", where),
                  normalize_angle(require_number(obj, "yaw", where))};
  if (box.length <= 0.0) throw InputError(where + ".l: must be > 0");
  if (box.width <= 0.0) throw InputError(where + ".w: must be > 0");
  return box;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct ParsedDocument {
  std::optional<json> header;  // only for line-delimited input
  std::vector<json> frames;
};

// Accepts either a single document with a "frames" array or line-delimited
// objects. With `header_line`, the first line-delimited object is a header.
inline ParsedDocument parse_document(const std::string& text, bool header_line,
                                     const std::string& path) {
  ParsedDocument doc;
  json whole = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (!whole.is_discarded() && whole.is_object() && whole.contains("frames")) {
    if (!whole["frames"].is_array()) throw InputError(path + ": frames: expected an array");
    doc.frames.assign(whole["frames"].begin(), whole["frames"].end());
    whole.erase("frames");
    doc.header = std::move(whole);
    return doc;
  }
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = header_line;
  while (std::getline(lines, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    json value = json::parse(line, nullptr, false);
    if (value.is_discarded() || !value.is_object()) {
      throw InputError(path + ":" + std::to_string(line_no) + ": malformed JSON line");
    }
    if (header_pending) {
      doc.header = std::move(value);
      header_pending = false;
    } else {
      doc.frames.push_back(std::move(value));
    }
  }
  return doc;
}

inline EnvironmentParams parse_environment(const json& env) {
  const std::string w = "environment";
  EnvironmentParams p;
  if (!env.is_object()) throw InputError("environment: expected an object");
  p.friction = optional_number(env, "mu", p.friction, w);
  p.gravity = optional_number(env, "g", p.gravity, w);
  if (env.contains("brake_deceleration")) {
    p.brake_deceleration_override = require_number(env, "brake_deceleration", w);
  }
  p.rss.response_time = optional_number(env, "rho", p.rss.response_time, w);
  p.rss.a_accel_max = optional_number(env, "a_accel_max", p.rss.a_accel_max, w);
  p.rss.a_brake_min = optional_number(env, "a_brake_min", p.rss.a_brake_min, w);
  p.rss.a_brake_max = optional_number(env, "a_brake_max", p.rss.a_brake_max, w);
  p.rss.a_lat_accel_max = optional_number(env, "a_lat_accel_max", p.rss.a_lat_accel_max, w);
  p.rss.a_lat_brake_min = optional_number(env, "a_lat_brake_min", p.rss.a_lat_brake_min, w);
  p.rss.lateral_fluctuation = optional_number(env, "mu_lat", p.rss.lateral_fluctuation, w);
  return p;
}

}  // namespace detail

/// Throws InputError when an environment block violates its invariants.
inline void validate_environment(const EnvironmentParams& p) {
  if (!(p.friction > 0.0 && p.friction <= 1.5)) {
    throw InputError("environment.mu: must be in (0, 1.5]");
  }
  if (!(p.brake_deceleration() > 0.0)) {
    throw InputError("environment.brake_deceleration: must be > 0");
  }
  const RssParams& r = p.rss;
  if (r.response_time < 0.0) throw InputError("environment.rho: must be >= 0");
  if (!(r.a_accel_max > 0.0 && r.a_brake_min > 0.0 && r.a_brake_max > 0.0 &&
        r.a_lat_accel_max > 0.0 && r.a_lat_brake_min > 0.0)) {
    throw InputError("environment: all RSS accelerations must be > 0");
  }
  if (r.lateral_fluctuation < 0.0) throw InputError("environment.mu_lat: must be >= 0");
}

/// Checks the frame-sequence invariants shared by every ingestion path.
inline void validate_frames(const std::vector<Frame>& frames) {
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (!(frames[i].timestamp > frames[i - 1].timestamp)) {
      throw InputError("non-monotonic timestamps at frame " + std::to_string(frames[i].index));
    }
    if (frames[i].index <= frames[i - 1].index) {
      throw InputError("non-increasing frame index at frame " + std::to_string(frames[i].index));
    }
  }
  if (frames.size() >= 3) {
    std::vector<double> dts;
    for (std::size_t i = 1; i < frames.size(); ++i) {
      dts.push_back(frames[i].timestamp - frames[i - 1].timestamp);
    }
    std::vector<double> sorted = dts;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    for (std::size_t i = 0; i < dts.size(); ++i) {
      if (std::abs(dts[i] - median) > 0.01 * median) {
        throw InputError("frame rate not constant within 1% at frame " +
                         std::to_string(frames[i + 1].index));
      }
    }
  }
  for (const Frame& f : frames) {
    std::set<std::string> ids;
    for (const ObjectState& o : f.objects) {
      if (!ids.insert(o.id).second) {
        throw InputError(detail::frame_prefix(f.index) + "duplicate object_id '" + o.id + "'");
      }
    }
  }
}

inline Scenario parse_scenario(const std::string& text, const std::string& source = "<scenario>") {
  using detail::json;
  const detail::ParsedDocument doc = detail::parse_document(text, true, source);
  Scenario sc;
  if (!doc.header) throw InputError(source + ": missing header line");
  const json& header = *doc.header;
  const json& meta = detail::require(header, "meta", "header");
  if (meta.contains("name")) sc.meta.name = detail::require_string(meta, "name", "meta");
  sc.meta.frame_rate_hz = detail::optional_number(meta, "frame_rate_hz", 10.0, "meta");
  if (!(sc.meta.frame_rate_hz > 0.0)) throw InputError("meta.frame_rate_hz: must be > 0");
  if (header.contains("environment")) sc.environment = detail::parse_environment(header["environment"]);
  validate_environment(sc.environment);

  for (std::size_t i = 0; i < doc.frames.size(); ++i) {
    const json& fj = doc.frames[i];
    Frame f;
    const std::string fw = "frames[" + std::to_string(i) + "]";
    const json& idx = detail::require(fj, "index", fw);
    if (!idx.is_number_integer()) throw InputError(fw + ".index: expected an integer");
    f.index = idx.get<std::int64_t>();
    const std::string where = "frame " + std::to_string(f.index);
    f.timestamp = fj.contains("t") ? detail::require_number(fj, "t", where)
                                   : static_cast<double>(f.index) / sc.meta.frame_rate_hz;
    const json& ej = detail::require(fj, "ego", where);
    const std::string ew = where + ": ego";
    f.ego.position = {detail::require_number(ej, "x", ew), detail::require_number(ej, "y", ew)};
    f.ego.yaw = normalize_angle(detail::require_number(ej, "yaw", ew));
    f.ego.speed = detail::require_number(ej, "v", ew);
    if (f.ego.speed < 0.0) throw InputError(ew + ".v: must be >= 0");
    f.ego.length = detail::optional_number(ej, "l", f.ego.length, ew);
    f.ego.width = detail::optional_number(ej, "w", f.ego.width, ew);
    if (f.ego.length <= 0.0 || f.ego.width <= 0.0) throw InputError(ew + ": l and w must be > 0");

    const json& objs = detail::require(fj, "objects", where);
    if (!objs.is_array()) throw InputError(where + ": objects: expected an array");
    for (std::size_t k = 0; k < objs.size(); ++k) {
      const std::string ow = where + ": objects[" + std::to_string(k) + "]";
      const json& oj = objs[k];
      ObjectState o;
      o.id = detail::require_id(oj, "id", ow);
      const std::string cls = detail::require_string(oj, "class", ow);
      auto parsed = parse_object_class(cls);
      if (!parsed) throw InputError(ow + ".class: unknown class '" + cls + "'");
      o.class_label = *parsed;
      o.box = detail::parse_box(oj, ow);
      o.velocity = {detail::require_number(oj, "vx", ow), detail::require_number(oj, "vy", ow)};
      if (o.id == "ego") {
        sc.warnings.push_back(where + ": object 'ego' excluded from evaluation");
        continue;
      }
      f.objects.push_back(std::move(o));
    }
    sc.frames.push_back(std::move(f));
  }
  validate_frames(sc.frames);
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  return parse_scenario(detail::read_file(path), path);
}

/// Canonical line-delimited serialization.
inline std::string serialize_scenario(const Scenario& sc) {
  using detail::json;
  std::string out;
  const RssParams& r = sc.environment.rss;
  json env = {{"mu", sc.environment.friction},
              {"g", sc.environment.gravity},
              {"rho", r.response_time},
              {"a_accel_max", r.a_accel_max},
              {"a_brake_min", r.a_brake_min},
              {"a_brake_max", r.a_brake_max},
              {"a_lat_accel_max", r.a_lat_accel_max},
              {"a_lat_brake_min", r.a_lat_brake_min},
              {"mu_lat", r.lateral_fluctuation}};
  if (sc.environment.brake_deceleration_override) {
    env["brake_deceleration"] = *sc.environment.brake_deceleration_override;
  }
  json header = {{"meta", {{"name", sc.meta.name}, {"frame_rate_hz", sc.meta.frame_rate_hz}}},
                 {"environment", env}};
  out += header.dump() + "\n";
  for (const Frame& f : sc.frames) {
    json objs = json::array();
    for (const ObjectState& o : f.objects) {
      objs.push_back({{"id", o.id},
                      {"class", std::string(to_string(o.class_label))},
                      {"x", o.box.center_x},
                      {"y", o.box.center_y},
                      {"yaw", o.box.yaw},
                      {"l", o.box.length},
                      {"w", o.box.width},
                      {"vx", o.velocity.x},
                      {"vy", o.velocity.y}});
    }
    json fj = {{"index", f.index},
               {"t", f.timestamp},
               {"ego",
                {{"x", f.ego.position.x},
                 {"y", f.ego.position.y},
                 {"yaw", f.ego.yaw},
                 {"v", f.ego.speed},
                 {"l", f.ego.length},
                 {"w", f.ego.width}}},
               {"objects", std::move(objs)}};
    out += fj.dump() + "\n";
  }
  return out;
}

inline PerceptionLog parse_perception_log(const std::string& text, const Scenario& scenario,
                                          const std::string& source = "<log>") {
  using detail::json;
  const detail::ParsedDocument doc = detail::parse_document(text, false, source);
  if (doc.frames.size() != scenario.frames.size()) {
    throw InputError(source + ": frame count mismatch: log has " +
                     std::to_string(doc.frames.size()) + ", scenario has " +
                     std::to_string(scenario.frames.size()));
  }
  PerceptionLog log;
  for (std::size_t i = 0; i < doc.frames.size(); ++i) {
    const json& fj = doc.frames[i];
    const Frame& gt = scenario.frames[i];
    const std::string fw = "log frames[" + std::to_string(i) + "]";
    const json& idx = detail::require(fj, "index", fw);
    if (!idx.is_number_integer() || idx.get<std::int64_t>() != gt.index) {
      throw InputError(fw + ".index: does not match scenario frame " + std::to_string(gt.index));
    }
    const std::string where = "log frame " + std::to_string(gt.index);
    const json& dets = detail::require(fj, "detections", where);
    if (!dets.is_array()) throw InputError(where + ": detections: expected an array");
    std::vector<Detection> out;
    for (std::size_t k = 0; k < dets.size(); ++k) {
      const std::string dw = where + ": detections[" + std::to_string(k) + "]";
      const json& dj = dets[k];
      Detection d;
      d.box = detail::parse_box(dj, dw);
      const std::string cls = detail::require_string(dj, "class", dw);
      if (auto parsed = parse_object_class(cls)) {
        d.class_label = *parsed;
      } else {
        d.class_label = ObjectClass::kMisc;
        log.warnings.push_back(dw + ": unknown class '" + cls + "' mapped to misc");
      }
      d.score = detail::require_number(dj, "score", dw);
      if (d.score < 0.0 || d.score > 1.0) throw InputError(dw + ".score: must be in [0,1]");
      if (dj.contains("track_id") && !dj["track_id"].is_null()) {
        d.track_id = detail::require_id(dj, "track_id", dw);
        log.has_track_ids = true;
      }
      if (dj.contains("t_detect") && !dj["t_detect"].is_null()) {
        d.detection_timestamp = detail::require_number(dj, "t_detect", dw);
      } else {
        d.detection_timestamp = gt.timestamp;
        log.timestamps_defaulted = true;
      }
      out.push_back(std::move(d));
    }
    log.frames.push_back(std::move(out));
  }
  return log;
}

inline PerceptionLog load_perception_log(const std::string& path, const Scenario& scenario) {
  return parse_perception_log(detail::read_file(path), scenario, path);
}

/// Line-delimited serialization; frame indices are taken from `scenario`.
inline std::string serialize_perception_log(const PerceptionLog& log, const Scenario& scenario) {
  using detail::json;
  std::string out;
  for (std::size_t i = 0; i < log.frames.size(); ++i) {
    json dets = json::array();
    for (const Detection& d : log.frames[i]) {
      json dj = {{"x", d.box.center_x},
                 {"y", d.box.center_y},
                 {"yaw", d.box.yaw},
                 {"l", d.box.length},
                 {"w", d.box.width},
                 {"class", std::string(to_string(d.class_label))},
                 {"score", d.score}};
      if (d.track_id) dj["track_id"] = *d.track_id;
      dj["t_detect"] = d.detection_timestamp;
      dets.push_back(std::move(dj));
    }
    const std::int64_t index = i < scenario.frames.size() ? scenario.frames[i].index
                                                          : static_cast<std::int64_t>(i);
    out += json{{"index", index}, {"detections", std::move(dets)}}.dump() + "\n";
  }
  return out;
}

}  // namespace safemetric

#endif  // SAFEMETRIC_SCENARIO_HPP_
