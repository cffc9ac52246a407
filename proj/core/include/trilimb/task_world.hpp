/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "trilimb/slave_model.hpp"

namespace trilimb {

inline constexpr std::size_t kTargetCount = 4;

enum class TargetKind : std::uint8_t { Exposed = 0, Covered = 1 };
enum class TargetStatus : std::uint8_t { Pending = 0, Lifted = 1, Cut = 2, Failed = 3 };

struct Target {
  Vec3 center = Vec3::Zero();
  TargetKind kind = TargetKind::Exposed;
  double radius_mm = 4.0;
  double incision_len_mm = 15.0;
  TargetStatus status = TargetStatus::Pending;
};

/// Rectangular tissue plate. `normal` faces the scope; `u_axis` runs along
/// the row of targets and is the incision direction of covered targets.
struct TissuePlane {
  Vec3 center = Vec3::Zero();
  Vec3 u_axis = Vec3::UnitY();
  Vec3 v_axis = Vec3::UnitX();
  Vec3 normal = -Vec3::UnitZ();
  double width_mm = 150.0;   // along u
  double height_mm = 150.0;  // along v

  /// Signed height of `p` above the plate, positive on the scope side.
  double height_of(const Vec3& p) const { return normal.dot(p - center); }
  /// In-plane coordinates (u, v) of the orthogonal projection of `p`.
  Eigen::Vector2d plane_coords(const Vec3& p) const {
    const Vec3 d = p - center;
    return {u_axis.dot(d), v_axis.dot(d)};
  }
  Vec3 at(double u, double v, double h = 0.0) const {
    return center + u * u_axis + v * v_axis + h * normal;
  }
};

/// Scene file contents before validation. Target centers are given in the
/// plate frame as (u, v, h).
struct SceneConfig {
  struct TargetSpec {
    TargetKind kind = TargetKind::Exposed;
    Vec3 plane_coords = Vec3::Zero();
  };

  std::string name = "default";
  Vec3 plane_center{0.0, 0.0, 300.0};
  /// Incline of the plate relative to the insertion axis, about u.
  double tilt_deg = 45.0;
  Vec3 u_axis = Vec3::UnitY();
  Eigen::Vector2d plane_size{150.0, 150.0};
  Vec3 zone_size{100.0, 50.0, 50.0};
  double target_radius_mm = 4.0;
  double incision_len_mm = 15.0;
  std::vector<TargetSpec> targets;

  /// Four targets, indexed right to left, alternating exposed/covered.
  static SceneConfig default_config();
};

struct Scene {
  std::string name;
  TissuePlane plane;
  Vec3 zone_size{100.0, 50.0, 50.0};
  std::array<Target, kTargetCount> targets;
};

/// Validates and builds a scene. Throws SceneError on a wrong target count,
/// a target outside the placement zone or a malformed plate.
Scene load_scene(const SceneConfig& config);

SceneConfig parse_scene_config(const nlohmann::json& j);
nlohmann::json scene_config_to_json(const SceneConfig& config);
SceneConfig read_scene_file(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// World state and stepping
// ---------------------------------------------------------------------------

struct WorldConfig {
  double contact_tol_mm = 1.5;
  double grasp_radius_mm = 5.0;
  double lift_threshold_mm = 5.0;
  double grip_close = 0.8;

  friend bool operator==(const WorldConfig&, const WorldConfig&) = default;
};

enum class EventKind : std::uint8_t {
  TargetCut = 1,
  CoveredBlocked = 2,
  MissCut = 3,
  Grasped = 4,
  Released = 5,
  Lifted = 6,
};

inline constexpr std::uint8_t kNoTarget = 0xFF;

struct TaskEvent {
  EventKind kind = EventKind::MissCut;
  std::uint8_t target = kNoTarget;

  friend bool operator==(const TaskEvent&, const TaskEvent&) = default;
};

const char* to_string(EventKind kind);
const char* to_string(TargetStatus status);
const char* to_string(TargetKind kind);

struct GraspState {
  std::optional<std::uint8_t> held_target;
  double lift_mm = 0.0;
  Vec3 attach_point = Vec3::Zero();
  bool grip_closed = false;
};

struct World {
  Scene scene;
  WorldConfig cfg;
  GraspState grasp;
  std::uint64_t tick = 0;  // set by the session before stepping
  bool burning = false;    // cautery-on contact episode in progress
  std::uint32_t failures = 0;
  std::vector<std::uint64_t> failure_ticks;
  std::array<std::optional<std::uint64_t>, kTargetCount> lifted_tick;
  std::array<std::optional<std::uint64_t>, kTargetCount> cut_tick;
  std::optional<std::uint64_t> motion_start_tick;

  static World make(Scene scene, WorldConfig cfg = {});

  /// Lowest index not yet Cut, or nullopt when all four are done.
  std::optional<std::size_t> current_target() const;
};

struct WorldStep {
  World world;
  std::optional<TaskEvent> event;
};

WorldStep grasp_step(const World& world, const TipPose& grasper_tip, double grip);

/// Evaluated on the first tick of each cautery-on contact episode.
WorldStep cut_step(const World& world, const TipPose& hook_tip, bool cautery);

/// True when `p` lies in the cut zone of target `i` (disk for exposed,
/// capsule along u for covered), ignoring height.
bool in_target_zone(const Scene& scene, std::size_t i, const Vec3& p);

struct TargetOutcome {
  TargetKind kind = TargetKind::Exposed;
  TargetStatus status = TargetStatus::Pending;
  std::optional<std::uint64_t> lifted_tick;
  std::optional<std::uint64_t> cut_tick;
};

struct TrialResult {
  std::array<TargetOutcome, kTargetCount> targets;
  std::uint32_t failures = 0;
  std::vector<std::uint64_t> failure_ticks;
  std::optional<double> completion_time_s;
  bool completed = false;
};

/// Snapshot of the trial. With `final_snapshot`, targets still uncut are
/// reported as Failed.
TrialResult trial_status(const World& world, double tick_hz, bool final_snapshot = false);

nlohmann::json trial_result_to_json(const TrialResult& result);
TrialResult trial_result_from_json(const nlohmann::json& j);

bool operator==(const TargetOutcome& a, const TargetOutcome& b);
bool operator==(const TrialResult& a, const TrialResult& b);

}  // namespace trilimb
