/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include <fstream>

#include <nlohmann/json.hpp>

#include "trilimb/task_world.hpp"

namespace trilimb {

using nlohmann::json;

namespace {

Vec3 vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw SceneError(std::string(what) + " must be [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json to_array(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

TargetKind kind_from(const std::string& s) {
  if (s == "exposed") return TargetKind::Exposed;
  if (s == "covered") return TargetKind::Covered;
  throw SceneError("unknown target kind '" + s + "'");
}

json optional_tick(const std::optional<std::uint64_t>& t) { return t ? json(*t) : json(nullptr); }

std::optional<std::uint64_t> tick_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::uint64_t>();
}

TargetStatus status_from(const std::string& s) {
  for (auto st : {TargetStatus::Pending, TargetStatus::Lifted, TargetStatus::Cut,
                  TargetStatus::Failed})
    if (s == to_string(st)) return st;
  throw TraceError("unknown target status '" + s + "'");
}

}  // namespace

SceneConfig parse_scene_config(const json& j) {
  try {
    SceneConfig cfg;
    cfg.name = j.value("name", std::string("unnamed"));
    const json& plane = j.at("plane");
    cfg.plane_center = vec3(plane.at("center"), "plane.center");
    cfg.tilt_deg = plane.value("tilt_deg", 45.0);
    if (plane.contains("u_axis")) cfg.u_axis = vec3(plane["u_axis"], "plane.u_axis");
    if (plane.contains("size")) {
      const auto& s = plane["size"];
      cfg.plane_size = {s.at(0).get<double>(), s.at(1).get<double>()};
    }
    if (j.contains("zone")) cfg.zone_size = vec3(j["zone"], "zone");
    cfg.target_radius_mm = j.value("target_radius_mm", 4.0);
    cfg.incision_len_mm = j.value("incision_len_mm", 15.0);
    for (const auto& t : j.at("targets")) {
      cfg.targets.push_back({kind_from(t.at("kind").get<std::string>()), vec3(t.at("at"), "target.at")});
    }
    return cfg;
  } catch (const json::exception& e) {
    throw SceneError(std::string("malformed scene: ") + e.what());
  }
}

json scene_config_to_json(const SceneConfig& cfg) {
  json targets = json::array();
  for (const auto& t : cfg.targets)
    targets.push_back({{"kind", to_string(t.kind)}, {"at", to_array(t.plane_coords)}});
  return {
      {"name", cfg.name},
      {"plane",
       {{"center", to_array(cfg.plane_center)},
        {"tilt_deg", cfg.tilt_deg},
        {"u_axis", to_array(cfg.u_axis)},
        {"size", {cfg.plane_size.x(), cfg.plane_size.y()}}}},
      {"zone", to_array(cfg.zone_size)},
      {"target_radius_mm", cfg.target_radius_mm},
      {"incision_len_mm", cfg.incision_len_mm},
      {"targets", targets},
  };
}

SceneConfig read_scene_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SceneError("cannot open scene file " + path.string());
  json j = json::parse(in, nullptr, false, /*ignore_comments=*/true);
  if (j.is_discarded()) throw SceneError("scene file " + path.string() + " is not valid JSON");
  return parse_scene_config(j);
}

json trial_result_to_json(const TrialResult& r) {
  json targets = json::array();
  for (const auto& t : r.targets) {
    targets.push_back({{"kind", to_string(t.kind)},
                       {"status", to_string(t.status)},
                       {"lifted_tick", optional_tick(t.lifted_tick)},
                       {"cut_tick", optional_tick(t.cut_tick)}});
  }
  return {
      {"completed", r.completed},
      {"completion_time_s", r.completion_time_s ? json(*r.completion_time_s) : json(nullptr)},
      {"failures", r.failures},
      {"failure_ticks", r.failure_ticks},
      {"targets", targets},
  };
}

TrialResult trial_result_from_json(const json& j) {
  TrialResult r;
  r.completed = j.at("completed").get<bool>();
  if (!j.at("completion_time_s").is_null()) r.completion_time_s = j["completion_time_s"].get<double>();
  r.failures = j.at("failures").get<std::uint32_t>();
  r.failure_ticks = j.at("failure_ticks").get<std::vector<std::uint64_t>>();
  const auto& targets = j.at("targets");
  if (targets.size() != kTargetCount) throw TraceError("result must list 4 targets");
  for (std::size_t i = 0; i < kTargetCount; ++i) {
    const auto& t = targets[i];
    r.targets[i].kind = t.at("kind").get<std::string>() == "covered" ? TargetKind::Covered
                                                                     : TargetKind::Exposed;
    r.targets[i].status = status_from(t.at("status").get<std::string>());
    r.targets[i].lifted_tick = tick_from(t.at("lifted_tick"));
    r.targets[i].cut_tick = tick_from(t.at("cut_tick"));
  }
  return r;
}

}  // namespace trilimb
