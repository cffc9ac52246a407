/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "trilimb/task_world.hpp"

#include <algorithm>
#include <cmath>

namespace trilimb {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::TargetCut: return "TargetCut";
    case EventKind::CoveredBlocked: return "CoveredBlocked";
    case EventKind::MissCut: return "MissCut";
    case EventKind::Grasped: return "Grasped";
    case EventKind::Released: return "Released";
    case EventKind::Lifted: return "Lifted";
  }
  return "?";
}

const char* to_string(TargetStatus status) {
  switch (status) {
    case TargetStatus::Pending: return "Pending";
    case TargetStatus::Lifted: return "Lifted";
    case TargetStatus::Cut: return "Cut";
    case TargetStatus::Failed: return "Failed";
  }
  return "?";
}

const char* to_string(TargetKind kind) {
  return kind == TargetKind::Exposed ? "exposed" : "covered";
}

SceneConfig SceneConfig::default_config() {
  SceneConfig cfg;
  cfg.targets = {
      {TargetKind::Exposed, Vec3(36.0, 8.0, 0.0)},
      {TargetKind::Covered, Vec3(12.0, -8.0, 0.0)},
      {TargetKind::Exposed, Vec3(-12.0, 8.0, 0.0)},
      {TargetKind::Covered, Vec3(-36.0, -8.0, 0.0)},
  };
  return cfg;
}

Scene load_scene(const SceneConfig& config) {
  if (config.targets.size() != kTargetCount)
    throw SceneError("scene needs exactly 4 targets, got " + std::to_string(config.targets.size()));
  const auto exposed = std::count_if(config.targets.begin(), config.targets.end(),
                                     [](const auto& t) { return t.kind == TargetKind::Exposed; });
  if (exposed != 2) throw SceneError("scene needs two exposed and two covered targets");
  if (!(config.plane_size.x() > 0.0 && config.plane_size.y() > 0.0))
    throw SceneError("plane size must be positive");
  if (!(config.target_radius_mm > 0.0) || !(config.incision_len_mm >= 0.0))
    throw SceneError("target radius must be positive");

  // The row direction is taken perpendicular to the insertion axis.
  Vec3 u = config.u_axis;
  u.z() = 0.0;
  if (u.norm() < 1e-9) throw SceneError("plane u_axis must not be parallel to the insertion axis");
  u.normalize();
  const Vec3 facing = -Vec3::UnitZ();
  const Vec3 v0 = facing.cross(u);
  const Vec3 v = Eigen::AngleAxisd(-deg2rad(config.tilt_deg), u) * v0;

  Scene scene;
  scene.name = config.name;
  scene.zone_size = config.zone_size;
  scene.plane.center = config.plane_center;
  scene.plane.u_axis = u;
  scene.plane.v_axis = v.normalized();
  scene.plane.normal = u.cross(scene.plane.v_axis).normalized();
  scene.plane.width_mm = config.plane_size.x();
  scene.plane.height_mm = config.plane_size.y();

  const Vec3 half_zone = config.zone_size / 2.0;
  for (std::size_t i = 0; i < kTargetCount; ++i) {
    const auto& spec = config.targets[i];
    const Vec3& c = spec.plane_coords;
    if (!c.allFinite()) throw SceneError("target " + std::to_string(i) + " is not finite");
    if (std::abs(c.x()) > half_zone.x() || std::abs(c.y()) > half_zone.y() ||
        std::abs(c.z()) > half_zone.z())
      throw SceneError("target " + std::to_string(i) + " lies outside the placement zone");
    Target& t = scene.targets[i];
    t.kind = spec.kind;
    t.center = scene.plane.at(c.x(), c.y());
    t.radius_mm = config.target_radius_mm;
    t.incision_len_mm = config.incision_len_mm;
  }
  return scene;
}

World World::make(Scene scene, WorldConfig cfg) {
  World w;
  w.scene = std::move(scene);
  w.cfg = cfg;
  return w;
}

std::optional<std::size_t> World::current_target() const {
  for (std::size_t i = 0; i < kTargetCount; ++i)
    if (scene.targets[i].status != TargetStatus::Cut) return i;
  return std::nullopt;
}

bool in_target_zone(const Scene& scene, std::size_t i, const Vec3& p) {
  const Target& t = scene.targets.at(i);
  const Eigen::Vector2d d = scene.plane.plane_coords(p) - scene.plane.plane_coords(t.center);
  if (t.kind == TargetKind::Exposed) return d.norm() <= t.radius_mm;
  const double half = t.incision_len_mm / 2.0;
  const double along = d.x() - std::clamp(d.x(), -half, half);
  return std::hypot(along, d.y()) <= t.radius_mm;
}

WorldStep grasp_step(const World& world, const TipPose& tip, double grip) {
  World w = world;
  std::optional<TaskEvent> event;
  const bool closed = grip >= w.cfg.grip_close;

  if (!closed) {
    if (w.grasp.held_target) {
      event = TaskEvent{EventKind::Released, *w.grasp.held_target};
      w.grasp.held_target.reset();
      w.grasp.lift_mm = 0.0;
    }
    w.grasp.grip_closed = false;
    return {std::move(w), event};
  }

  if (!w.grasp.grip_closed) {
    // Closing edge: attach to the nearest pending covered target in reach.
    std::optional<std::uint8_t> best;
    double best_dist = w.cfg.grasp_radius_mm;
    for (std::size_t i = 0; i < kTargetCount; ++i) {
      const Target& t = w.scene.targets[i];
      if (t.kind != TargetKind::Covered || t.status != TargetStatus::Pending) continue;
      const double d = (tip.position - t.center).norm();
      if (d <= best_dist) {
        best_dist = d;
        best = static_cast<std::uint8_t>(i);
      }
    }
    if (best) {
      w.grasp.held_target = best;
      w.grasp.attach_point = tip.position;
      w.grasp.lift_mm = 0.0;
      event = TaskEvent{EventKind::Grasped, *best};
    }
    w.grasp.grip_closed = true;
    return {std::move(w), event};
  }

  if (w.grasp.held_target) {
    const std::uint8_t i = *w.grasp.held_target;
    w.grasp.lift_mm = w.scene.plane.normal.dot(tip.position - w.grasp.attach_point);
    Target& t = w.scene.targets[i];
    if (t.status == TargetStatus::Pending && w.grasp.lift_mm >= w.cfg.lift_threshold_mm) {
      t.status = TargetStatus::Lifted;
      w.lifted_tick[i] = w.tick;
      event = TaskEvent{EventKind::Lifted, i};
    }
  }
  return {std::move(w), event};
}

WorldStep cut_step(const World& world, const TipPose& tip, bool cautery) {
  World w = world;
  const TissuePlane& plane = w.scene.plane;
  const Eigen::Vector2d uv = plane.plane_coords(tip.position);
  const bool contact = std::abs(plane.height_of(tip.position)) <= w.cfg.contact_tol_mm &&
                       std::abs(uv.x()) <= plane.width_mm / 2.0 &&
                       std::abs(uv.y()) <= plane.height_mm / 2.0;
  const bool burn = cautery && contact;
  if (!burn) {
    w.burning = false;
    return {std::move(w), std::nullopt};
  }
  if (w.burning) return {std::move(w), std::nullopt};
  w.burning = true;

  const auto current = w.current_target();
  if (current && in_target_zone(w.scene, *current, tip.position)) {
    const auto i = static_cast<std::uint8_t>(*current);
    Target& t = w.scene.targets[i];
    if (t.kind == TargetKind::Exposed || t.status == TargetStatus::Lifted) {
      t.status = TargetStatus::Cut;
      w.cut_tick[i] = w.tick;
      return {std::move(w), TaskEvent{EventKind::TargetCut, i}};
    }
    return {std::move(w), TaskEvent{EventKind::CoveredBlocked, i}};
  }

  ++w.failures;
  w.failure_ticks.push_back(w.tick);
  return {std::move(w), TaskEvent{EventKind::MissCut, kNoTarget}};
}

TrialResult trial_status(const World& world, double tick_hz, bool final_snapshot) {
  TrialResult r;
  r.completed = true;
  for (std::size_t i = 0; i < kTargetCount; ++i) {
    const Target& t = world.scene.targets[i];
    auto& o = r.targets[i];
    o.kind = t.kind;
    o.status = t.status;
    o.lifted_tick = world.lifted_tick[i];
    o.cut_tick = world.cut_tick[i];
    if (t.status != TargetStatus::Cut) {
      r.completed = false;
      if (final_snapshot) o.status = TargetStatus::Failed;
    }
  }
  r.failures = world.failures;
  r.failure_ticks = world.failure_ticks;
  if (r.completed && world.motion_start_tick) {
    const auto last_cut = *std::max_element(
        world.cut_tick.begin(), world.cut_tick.end(),
        [](const auto& a, const auto& b) { return a.value_or(0) < b.value_or(0); });
    r.completion_time_s =
        static_cast<double>(*last_cut - *world.motion_start_tick) / tick_hz;
  }
  return r;
}

bool operator==(const TargetOutcome& a, const TargetOutcome& b) {
  return a.kind == b.kind && a.status == b.status && a.lifted_tick == b.lifted_tick &&
         a.cut_tick == b.cut_tick;
}

bool operator==(const TrialResult& a, const TrialResult& b) {
  return a.targets == b.targets && a.failures == b.failures &&
         a.failure_ticks == b.failure_ticks && a.completion_time_s == b.completion_time_s &&
         a.completed == b.completed;
}

}  // namespace trilimb
