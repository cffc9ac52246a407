/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include <nlohmann/json.hpp>

#include "trilimb/hash.hpp"
#include "trilimb/session.hpp"

namespace trilimb {

using nlohmann::json;

const char* to_string(ControlMode mode) {
  return mode == ControlMode::ThreeLimb ? "three-limb" : "clutch";
}

ControlMode control_mode_from(const std::string& s) {
  if (s == "three-limb") return ControlMode::ThreeLimb;
  if (s == "clutch") return ControlMode::HandClutch;
  throw InvalidInput("unknown control mode '" + s + "' (expected three-limb or clutch)");
}

namespace {

const char* hand_name(Hand h) { return h == Hand::Left ? "left" : "right"; }

Hand hand_from(const std::string& s) {
  if (s == "left") return Hand::Left;
  if (s == "right") return Hand::Right;
  throw InvalidInput("unknown hand '" + s + "'");
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

}  // namespace

json config_to_json(const SessionConfig& c) {
  return json{
      {"tick_hz", c.tick_hz},
      {"mode", to_string(c.mode)},
      {"clutch_hand", hand_name(c.clutch_hand)},
      {"rates",
       {{"max_bend_rate", c.rates.max_bend_rate},
        {"max_trans_rate", c.rates.max_trans_rate},
        {"max_roll_rate", c.rates.max_roll_rate},
        {"deadband", c.rates.deadband},
        {"tool_rot_rate", c.rates.tool_rot_rate}}},
      {"travel", {{"translation_mm", c.travel.translation_mm}, {"roll_deg", c.travel.roll_deg}}},
      {"endoscope",
       {{"backlash_half_width_deg", c.endoscope.backlash_half_width_deg},
        {"motor_to_distal_gain", c.endoscope.motor_to_distal_gain},
        {"bend_limit_deg", c.endoscope.bend_limit_deg},
        {"bend_length_mm", c.endoscope.bend_length_mm},
        {"travel_mm", c.endoscope.travel_mm}}},
      {"tool_geometry",
       {{"nominal_protrusion_mm", c.tool_geometry.nominal_protrusion_mm},
        {"segment_mm", c.tool_geometry.segment_mm}}},
      {"tool_rates",
       {{"bend_dps", c.tool_rates.bend_dps},
        {"trans_mmps", c.tool_rates.trans_mmps},
        {"roll_dps", c.tool_rates.roll_dps},
        {"grip_per_s", c.tool_rates.grip_per_s}}},
      {"channel_offset_mm", c.channel_offset_mm},
      {"scene", scene_config_to_json(c.scene)},
      {"world",
       {{"contact_tol_mm", c.world.contact_tol_mm},
        {"grasp_radius_mm", c.world.grasp_radius_mm},
        {"lift_threshold_mm", c.world.lift_threshold_mm},
        {"grip_close", c.world.grip_close}}},
      {"link",
       {{"latency_ticks", c.latency_ticks},
        {"jitter_ticks", c.jitter_ticks},
        {"drop_rate", c.drop_rate}}},
      {"seed", c.seed},
  };
}

SessionConfig config_from_json(const json& j) {
  SessionConfig c;
  try {
    read(j, "tick_hz", c.tick_hz);
    if (auto it = j.find("mode"); it != j.end()) c.mode = control_mode_from(it->get<std::string>());
    if (auto it = j.find("clutch_hand"); it != j.end())
      c.clutch_hand = hand_from(it->get<std::string>());
    if (auto r = j.find("rates"); r != j.end()) {
      read(*r, "max_bend_rate", c.rates.max_bend_rate);
      read(*r, "max_trans_rate", c.rates.max_trans_rate);
      read(*r, "max_roll_rate", c.rates.max_roll_rate);
      read(*r, "deadband", c.rates.deadband);
      read(*r, "tool_rot_rate", c.rates.tool_rot_rate);
    }
    if (auto t = j.find("travel"); t != j.end()) {
      read(*t, "translation_mm", c.travel.translation_mm);
      read(*t, "roll_deg", c.travel.roll_deg);
    }
    if (auto e = j.find("endoscope"); e != j.end()) {
      read(*e, "backlash_half_width_deg", c.endoscope.backlash_half_width_deg);
      read(*e, "motor_to_distal_gain", c.endoscope.motor_to_distal_gain);
      read(*e, "bend_limit_deg", c.endoscope.bend_limit_deg);
      read(*e, "bend_length_mm", c.endoscope.bend_length_mm);
      read(*e, "travel_mm", c.endoscope.travel_mm);
    }
    if (auto g = j.find("tool_geometry"); g != j.end()) {
      read(*g, "nominal_protrusion_mm", c.tool_geometry.nominal_protrusion_mm);
      read(*g, "segment_mm", c.tool_geometry.segment_mm);
    }
    if (auto r = j.find("tool_rates"); r != j.end()) {
      read(*r, "bend_dps", c.tool_rates.bend_dps);
      read(*r, "trans_mmps", c.tool_rates.trans_mmps);
      read(*r, "roll_dps", c.tool_rates.roll_dps);
      read(*r, "grip_per_s", c.tool_rates.grip_per_s);
    }
    read(j, "channel_offset_mm", c.channel_offset_mm);
    if (auto s = j.find("scene"); s != j.end()) c.scene = parse_scene_config(*s);
    if (auto w = j.find("world"); w != j.end()) {
      read(*w, "contact_tol_mm", c.world.contact_tol_mm);
      read(*w, "grasp_radius_mm", c.world.grasp_radius_mm);
      read(*w, "lift_threshold_mm", c.world.lift_threshold_mm);
      read(*w, "grip_close", c.world.grip_close);
    }
    if (auto l = j.find("link"); l != j.end()) {
      read(*l, "latency_ticks", c.latency_ticks);
      read(*l, "jitter_ticks", c.jitter_ticks);
      read(*l, "drop_rate", c.drop_rate);
    }
    read(j, "seed", c.seed);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed session config: ") + e.what());
  }
  c.validate();
  return c;
}

std::uint64_t config_digest(const SessionConfig& cfg) {
  json j = config_to_json(cfg);
  j.erase("seed");
  StateHasher h;
  h.str(j.dump());
  return h.digest();
}

}  // namespace trilimb
