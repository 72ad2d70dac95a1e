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

// Synthetic scenario fixtures: scripted urban crossing, motorway and rural
// scenes with a perception log derived from the ground truth and optional
// injected faults. Output depends only on the archetype, faults and seed.

#ifndef SAFEMETRIC_FIXTURES_HPP_
#define SAFEMETRIC_FIXTURES_HPP_

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "safemetric/error.hpp"
#include "safemetric/scenario.hpp"

namespace safemetric {

enum class Archetype { kCrossing, kMotorway, kRural };

inline std::optional<Archetype> parse_archetype(std::string_view name) {
  if (name == "crossing") return Archetype::kCrossing;
  if (name == "motorway") return Archetype::kMotorway;
  if (name == "rural") return Archetype::kRural;
  return std::nullopt;
}

inline std::string_view to_string(Archetype a) {
  switch (a) {
    case Archetype::kCrossing: return "crossing";
    case Archetype::kMotorway: return "motorway";
    case Archetype::kRural: return "rural";
  }
  return "crossing";
}

/// Faults applied when deriving the perception log from ground truth.
struct FaultSpec {
  std::set<std::string> drop_objects;   // never detected
  double miss_rate = 0.0;               // per-detection drop probability
  std::size_t delay_frames = 0;         // first k frames of every track missed
  double jitter_sigma = 0.0;            // Gaussian centre noise, metres
  double false_positive_rate = 0.0;     // probability of one clutter box per frame
  struct Swap {
    std::string a, b;
    std::int64_t from_frame = 0;
  };
  std::vector<Swap> swaps;              // exchange track ids from a frame on
};

/// Parses one `--fault` token:
///   drop:<id>  miss:<p>  delay:<k>  jitter:<sigma>  fp:<p>  swap:<a>,<b>@<frame>
inline void add_fault(FaultSpec& spec, const std::string& token) {
  const auto colon = token.find(':');
  if (colon == std::string::npos) throw ConfigError("fault '" + token + "': expected kind:value");
  const std::string kind = token.substr(0, colon);
  const std::string value = token.substr(colon + 1);
  auto number = [&](double lo, double hi) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || !(v >= lo && v <= hi)) {
      throw ConfigError("fault '" + token + "': value out of range");
    }
    return v;
  };
  if (kind == "drop") {
    if (value.empty()) throw ConfigError("fault '" + token + "': missing object id");
    spec.drop_objects.insert(value);
  } else if (kind == "miss") {
    spec.miss_rate = number(0.0, 1.0);
  } else if (kind == "delay") {
    const double k = number(0.0, 1e6);
    if (k != std::floor(k)) throw ConfigError("fault '" + token + "': delay must be an integer");
    spec.delay_frames = static_cast<std::size_t>(k);
  } else if (kind == "jitter") {
    spec.jitter_sigma = number(0.0, 1e3);
  } else if (kind == "fp") {
    spec.false_positive_rate = number(0.0, 1.0);
  } else if (kind == "swap") {
    const auto comma = value.find(',');
    const auto at = value.find('@');
    if (comma == std::string::npos || at == std::string::npos || at < comma) {
      throw ConfigError("fault '" + token + "': expected swap:<a>,<b>@<frame>");
    }
    FaultSpec::Swap s{value.substr(0, comma), value.substr(comma + 1, at - comma - 1), 0};
    try {
      s.from_frame = std::stoll(value.substr(at + 1));
    } catch (const std::exception&) {
      throw ConfigError("fault '" + token + "': bad frame number");
    }
    spec.swaps.push_back(std::move(s));
  } else {
    throw ConfigError("fault '" + token + "': unknown kind '" + kind + "'");
  }
}

/// Portable uniform and normal draws on top of mt19937_64, whose output
/// sequence is fixed by the standard.
class FixtureRng {
 public:
  explicit FixtureRng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

struct Fixture {
  Scenario scenario;
  PerceptionLog log;
};

namespace detail {

struct ScriptedObject {
  std::string id;
  ObjectClass cls;
  Vec2 start;
  Vec2 velocity;
};

inline std::pair<double, double> class_dimensions(ObjectClass c) {
  switch (c) {
    case ObjectClass::kPedestrian: return {0.6, 0.6};
    case ObjectClass::kCyclist: return {1.8, 0.6};
    case ObjectClass::kVan: return {5.0, 2.0};
    case ObjectClass::kTruck: return {10.0, 2.5};
    case ObjectClass::kTram: return {30.0, 2.6};
    default: return {4.5, 1.8};
  }
}

struct Script {
  double ego_speed;
  std::size_t frames;
  std::vector<ScriptedObject> objects;
};

inline Script archetype_script(Archetype a) {
  using OC = ObjectClass;
  switch (a) {
    case Archetype::kMotorway:
      // Three lanes at y = 0, 3.5, 7; oncoming carriageway at y < -8.
      return {33.0, 60,
              {{"lead", OC::kCar, {35, 0}, {30, 0}},
               {"truck1", OC::kTruck, {10, 3.5}, {25, 0}},
               {"merger", OC::kCar, {50, 3.5}, {31, -0.5}},
               {"overtaker", OC::kCar, {-20, 7}, {38, 0}},
               {"follower", OC::kCar, {-25, 0}, {34, 0}},
               {"oncoming", OC::kCar, {150, -10}, {-33, 0}},
               {"van1", OC::kVan, {80, 7}, {28, 0}},
               {"slow_truck", OC::kTruck, {110, 0}, {22, 0}}}};
    case Archetype::kCrossing:
      // Intersection centred at x = 40; crosswalk at x = 30.
      return {12.0, 50,
              {{"crossing_car", OC::kCar, {40, -40}, {0, 10}},
               {"ped_crossing", OC::kPedestrian, {30, -6}, {0, 1.4}},
               {"cyclist", OC::kCyclist, {20, -2.5}, {5, 0}},
               {"parked", OC::kCar, {15, -3.5}, {0, 0}},
               {"oncoming", OC::kCar, {80, 3.5}, {-10, 0}},
               {"ped_walk", OC::kPedestrian, {10, 6}, {1, 0}},
               {"lead", OC::kCar, {60, 0}, {8, 0}}}};
    case Archetype::kRural:
      return {25.0, 60,
              {{"oncoming", OC::kCar, {120, 3.5}, {-22, 0}},
               {"far", OC::kCar, {140, 0}, {25, 0}}}};
  }
  return {};
}

}  // namespace detail

inline constexpr double kFixtureVisibleRange = 120.0;

/// Builds the scenario for `archetype` and a perception log with `faults`.
inline Fixture generate_fixture(Archetype archetype, const FaultSpec& faults, std::uint64_t seed) {
  const detail::Script script = detail::archetype_script(archetype);
  Fixture fx;
  fx.scenario.meta = {std::string(to_string(archetype)), 10.0};
  FixtureRng rng(seed);

  std::map<std::string, std::size_t> seen_frames;
  for (std::size_t k = 0; k < script.frames; ++k) {
    const double t = static_cast<double>(k) / fx.scenario.meta.frame_rate_hz;
    Frame f;
    f.index = static_cast<std::int64_t>(k);
    f.timestamp = t;
    f.ego.position = {script.ego_speed * t, 0.0};
    f.ego.speed = script.ego_speed;
    for (const detail::ScriptedObject& s : script.objects) {
      const Vec2 p = s.start + t * s.velocity;
      if (norm(p - f.ego.position) > kFixtureVisibleRange) continue;
      const auto [len, wid] = detail::class_dimensions(s.cls);
      const double yaw = norm(s.velocity) > 0.0 ? std::atan2(s.velocity.y, s.velocity.x) : 0.0;
      f.objects.push_back({s.id, s.cls, {p.x, p.y, len, wid, normalize_angle(yaw)}, s.velocity});
    }

    std::vector<Detection> dets;
    for (const ObjectState& o : f.objects) {
      const std::size_t age = seen_frames[o.id]++;
      // Draws are taken for every object so faults do not shift the stream.
      const double miss_draw = rng.uniform();
      const double nx = rng.normal();
      const double ny = rng.normal();
      if (faults.drop_objects.contains(o.id)) continue;
      if (age < faults.delay_frames) continue;
      if (miss_draw < faults.miss_rate) continue;
      Detection d;
      d.box = o.box;
      d.box.center_x += faults.jitter_sigma * nx;
      d.box.center_y += faults.jitter_sigma * ny;
      d.class_label = o.class_label;
      d.score = 1.0;
      d.track_id = o.id;
      for (const FaultSpec::Swap& s : faults.swaps) {
        if (f.index < s.from_frame) continue;
        if (*d.track_id == s.a) {
          d.track_id = s.b;
        } else if (*d.track_id == s.b) {
          d.track_id = s.a;
        }
      }
      d.detection_timestamp = t;
      dets.push_back(std::move(d));
    }
    const double fp_draw = rng.uniform();
    const double fx_draw = rng.uniform(5.0, 60.0);
    const double fy_draw = rng.uniform(-8.0, 8.0);
    const double fs_draw = rng.uniform(0.2, 0.8);
    if (fp_draw < faults.false_positive_rate) {
      Detection d;
      d.box = {f.ego.position.x + fx_draw, fy_draw, 4.5, 1.8, 0.0};
      d.class_label = ObjectClass::kCar;
      d.score = fs_draw;
      d.track_id = "fp" + std::to_string(k);
      d.detection_timestamp = t;
      dets.push_back(std::move(d));
    }
    fx.log.frames.push_back(std::move(dets));
    fx.scenario.frames.push_back(std::move(f));
  }
  fx.log.has_track_ids = true;
  for (const std::string& id : faults.drop_objects) {
    bool known = false;
    for (const auto& s : script.objects) known = known || s.id == id;
    if (!known) throw ConfigError("fault drop:" + id + ": no such object in " + std::string(to_string(archetype)));
  }
  return fx;
}

}  // namespace safemetric

#endif  // SAFEMETRIC_FIXTURES_HPP_
