/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <random>

#include "trilimb/trace.hpp"

namespace trilimb {
namespace {

World fresh_world() { return World::make(load_scene(SceneConfig::default_config())); }

TipPose at(const Vec3& p) {
  TipPose t;
  t.position = p;
  return t;
}

Vec3 target_point(const World& w, std::size_t i, double lift = 0.0) {
  return w.scene.targets[i].center + lift * w.scene.plane.normal;
}

// One cautery press: a rising edge on contact, then release.
std::optional<TaskEvent> burn(World& w, const Vec3& p) {
  auto step = cut_step(w, at(p), true);
  w = std::move(step.world);
  w = cut_step(w, at(p), false).world;
  return step.event;
}

std::optional<TaskEvent> grasp(World& w, const Vec3& p, double grip) {
  auto step = grasp_step(w, at(p), grip);
  w = std::move(step.world);
  return step.event;
}

void lift_target(World& w, std::size_t i) {
  grasp(w, target_point(w, i), 1.0);
  grasp(w, target_point(w, i, 6.0), 1.0);
  grasp(w, target_point(w, i, 6.0), 0.0);
}

TEST(Scene, DefaultHasTwoExposedTwoCovered) {
  const Scene s = load_scene(SceneConfig::default_config());
  int exposed = 0;
  for (const auto& t : s.targets) exposed += t.kind == TargetKind::Exposed;
  EXPECT_EQ(exposed, 2);
  for (const auto& t : s.targets) {
    EXPECT_NEAR(s.plane.height_of(t.center), 0.0, 1e-12);
    const auto uv = s.plane.plane_coords(t.center);
    EXPECT_LE(std::abs(uv.x()), 50.0);
    EXPECT_LE(std::abs(uv.y()), 25.0);
  }
}

TEST(Scene, TargetsRunRightToLeft) {
  const Scene s = load_scene(SceneConfig::default_config());
  for (std::size_t i = 1; i < kTargetCount; ++i)
    EXPECT_GT(s.plane.plane_coords(s.targets[i - 1].center).x(),
              s.plane.plane_coords(s.targets[i].center).x());
}

TEST(Scene, WrongTargetCountRejected) {
  auto cfg = SceneConfig::default_config();
  cfg.targets.pop_back();
  EXPECT_THROW(load_scene(cfg), SceneError);
}

TEST(Scene, TargetOutsideZoneRejected) {
  auto cfg = SceneConfig::default_config();
  cfg.targets[0].plane_coords = Vec3(60.0, 0.0, 0.0);
  EXPECT_THROW(load_scene(cfg), SceneError);
  cfg = SceneConfig::default_config();
  cfg.targets[0].plane_coords = Vec3(0.0, 26.0, 0.0);
  EXPECT_THROW(load_scene(cfg), SceneError);
}

TEST(Scene, KindMixEnforced) {
  auto cfg = SceneConfig::default_config();
  cfg.targets[1].kind = TargetKind::Exposed;
  EXPECT_THROW(load_scene(cfg), SceneError);
}

TEST(Scene, JsonRoundTrip) {
  const auto cfg = SceneConfig::default_config();
  const auto back = parse_scene_config(scene_config_to_json(cfg));
  ASSERT_EQ(back.targets.size(), cfg.targets.size());
  for (std::size_t i = 0; i < cfg.targets.size(); ++i) {
    EXPECT_EQ(back.targets[i].kind, cfg.targets[i].kind);
    EXPECT_EQ(back.targets[i].plane_coords, cfg.targets[i].plane_coords);
  }
  EXPECT_EQ(back.tilt_deg, cfg.tilt_deg);
}

TEST(Grasp, OpenGripNeverAttaches) {
  World w = fresh_world();
  EXPECT_FALSE(grasp(w, target_point(w, 1), 0.0).has_value());
  EXPECT_FALSE(w.grasp.held_target.has_value());
}

TEST(Grasp, CloseAtCoverPointAndRaiseLifts) {
  World w = fresh_world();
  auto ev = grasp(w, target_point(w, 1), 1.0);
  ASSERT_TRUE(ev);
  EXPECT_EQ(*ev, (TaskEvent{EventKind::Grasped, 1}));
  ev = grasp(w, target_point(w, 1, 6.0), 1.0);
  ASSERT_TRUE(ev);
  EXPECT_EQ(*ev, (TaskEvent{EventKind::Lifted, 1}));
  EXPECT_EQ(w.scene.targets[1].status, TargetStatus::Lifted);
}

TEST(Grasp, ReleaseBeforeThresholdStaysPending) {
  World w = fresh_world();
  grasp(w, target_point(w, 1), 1.0);
  grasp(w, target_point(w, 1, 4.0), 1.0);
  const auto ev = grasp(w, target_point(w, 1, 4.0), 0.0);
  ASSERT_TRUE(ev);
  EXPECT_EQ(ev->kind, EventKind::Released);
  EXPECT_EQ(w.scene.targets[1].status, TargetStatus::Pending);
  EXPECT_FALSE(w.grasp.held_target.has_value());
}

TEST(Grasp, ClosingOutsideRadiusMissesAndHoldsNothing) {
  World w = fresh_world();
  grasp(w, target_point(w, 1) + Vec3(6.0, 0, 0), 1.0);
  EXPECT_FALSE(w.grasp.held_target.has_value());
  // Sliding onto the target with the jaws already closed does not attach.
  grasp(w, target_point(w, 1), 1.0);
  EXPECT_FALSE(w.grasp.held_target.has_value());
}

TEST(Cut, ExposedCurrentTargetCuts) {
  World w = fresh_world();
  const auto ev = burn(w, target_point(w, 0));
  ASSERT_TRUE(ev);
  EXPECT_EQ(*ev, (TaskEvent{EventKind::TargetCut, 0}));
  EXPECT_EQ(w.scene.targets[0].status, TargetStatus::Cut);
}

TEST(Cut, CoveredUnliftedIsBlocked) {
  World w = fresh_world();
  burn(w, target_point(w, 0));
  const auto ev = burn(w, target_point(w, 1));
  ASSERT_TRUE(ev);
  EXPECT_EQ(*ev, (TaskEvent{EventKind::CoveredBlocked, 1}));
  EXPECT_EQ(w.scene.targets[1].status, TargetStatus::Pending);
  EXPECT_EQ(w.failures, 0u);
}

TEST(Cut, FarFromTargetsIsMiss) {
  World w = fresh_world();
  const auto ev = burn(w, w.scene.plane.at(0.0, 40.0));
  ASSERT_TRUE(ev);
  EXPECT_EQ(ev->kind, EventKind::MissCut);
  EXPECT_EQ(w.failures, 1u);
}

TEST(Cut, OutOfOrderIsMiss) {
  World w = fresh_world();
  const auto ev = burn(w, target_point(w, 2));
  ASSERT_TRUE(ev);
  EXPECT_EQ(ev->kind, EventKind::MissCut);
  EXPECT_EQ(w.scene.targets[2].status, TargetStatus::Pending);
  EXPECT_FALSE(trial_status(w, 100.0).completed);
}

TEST(Cut, CauteryOffOrNoContactDoesNothing) {
  World w = fresh_world();
  EXPECT_FALSE(cut_step(w, at(target_point(w, 0)), false).event);
  EXPECT_FALSE(cut_step(w, at(target_point(w, 0, 2.0)), true).event);
}

TEST(Cut, HeldContactFiresOnce) {
  World w = fresh_world();
  const Vec3 p = w.scene.plane.at(0.0, 40.0);
  int events = 0;
  for (int i = 0; i < 10; ++i) {
    auto s = cut_step(w, at(p), true);
    w = std::move(s.world);
    events += s.event.has_value();
  }
  EXPECT_EQ(events, 1);
  EXPECT_EQ(w.failures, 1u);
}

TEST(Trial, FreshWorldNotCompleted) {
  const auto r = trial_status(fresh_world(), 100.0);
  EXPECT_FALSE(r.completed);
  for (const auto& t : r.targets) EXPECT_NE(t.status, TargetStatus::Cut);
}

TEST(Trial, FourCutsInOrderComplete) {
  World w = fresh_world();
  for (std::size_t i = 0; i < kTargetCount; ++i) {
    w.tick = 100 * (i + 1);
    if (w.scene.targets[i].kind == TargetKind::Covered) lift_target(w, i);
    const auto ev = burn(w, target_point(w, i));
    ASSERT_TRUE(ev);
    EXPECT_EQ(*ev, (TaskEvent{EventKind::TargetCut, static_cast<std::uint8_t>(i)}));
  }
  w.motion_start_tick = 20;
  const auto r = trial_status(w, 100.0);
  EXPECT_TRUE(r.completed);
  ASSERT_TRUE(r.completion_time_s);
  EXPECT_DOUBLE_EQ(*r.completion_time_s, 3.8);
}

TEST(Trial, FinalSnapshotMarksUnfinishedFailed) {
  World w = fresh_world();
  burn(w, target_point(w, 0));
  const auto r = trial_status(w, 100.0, true);
  EXPECT_EQ(r.targets[0].status, TargetStatus::Cut);
  for (std::size_t i = 1; i < kTargetCount; ++i) EXPECT_EQ(r.targets[i].status, TargetStatus::Failed);
}

TrialLog synthetic_log(std::optional<std::uint64_t> motion, std::uint64_t last_cut) {
  TrialLog log;
  log.header.tick_hz = 100.0;
  const std::array<std::uint64_t, 4> cuts{3000, 6000, 9000, last_cut};
  for (std::uint64_t t = 0; t <= last_cut; ++t) {
    TickRecord r;
    r.tick = t;
    r.endo_moving = motion && t >= *motion && t < 11000;
    for (std::size_t i = 0; i < cuts.size(); ++i)
      if (cuts[i] == t) r.events.push_back({EventKind::TargetCut, static_cast<std::uint8_t>(i)});
    log.ticks.push_back(r);
  }
  return log;
}

TEST(CompletionTime, ArithmeticByDefinition) {
  EXPECT_DOUBLE_EQ(completion_time(synthetic_log(200, 12000)), 118.0);
}

TEST(CompletionTime, NoMotionIsNotCompleted) {
  EXPECT_THROW(completion_time(synthetic_log(std::nullopt, 12000)), NotCompleted);
  TrialLog log = synthetic_log(200, 12000);
  log.ticks.resize(9500);
  EXPECT_THROW(completion_time(log), NotCompleted);
}

// Randomized micro-traces of grasp and cautery actions near the targets.
TEST(Property, MicroTraces) {
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<int> which(0, 3);
  std::uniform_int_distribution<int> action(0, 5);
  std::uniform_real_distribution<double> jitter(-6.0, 6.0);
  std::uniform_real_distribution<double> lift(-1.0, 9.0);
  std::uniform_real_distribution<double> anywhere(-70.0, 70.0);
  std::bernoulli_distribution coin(0.5);

  int total_cuts = 0;
  int total_misses = 0;
  for (int trace = 0; trace < 2000; ++trace) {
    World w = fresh_world();
    for (std::uint64_t t = 0; t < 200; ++t) {
      w.tick = t;
      const World before = w;
      const int i = which(rng);
      const Vec3 near = target_point(w, i, lift(rng)) +
                        jitter(rng) * w.scene.plane.u_axis + jitter(rng) * w.scene.plane.v_axis;
      std::optional<TaskEvent> ev;
      switch (action(rng)) {
        case 0:
        case 1: {
          auto s = grasp_step(w, at(near), coin(rng) ? 1.0 : 0.0);
          w = std::move(s.world);
          ev = s.event;
          break;
        }
        case 2: {
          auto s = cut_step(w, at(w.scene.plane.at(anywhere(rng), anywhere(rng))), coin(rng));
          w = std::move(s.world);
          ev = s.event;
          break;
        }
        default: {
          auto s = cut_step(w, at(near), coin(rng));
          w = std::move(s.world);
          ev = s.event;
          break;
        }
      }

      for (std::size_t k = 0; k < kTargetCount; ++k) {
        const auto& prev = before.scene.targets[k];
        const auto& cur = w.scene.targets[k];
        if (prev.status == TargetStatus::Cut) ASSERT_EQ(cur.status, TargetStatus::Cut);
        if (cur.status == TargetStatus::Cut && cur.kind == TargetKind::Covered) {
          ASSERT_TRUE(w.lifted_tick[k].has_value());
          ASSERT_LT(*w.lifted_tick[k], *w.cut_tick[k]);
        }
      }
      if (ev && ev->kind == EventKind::MissCut) {
        ++total_misses;
        ASSERT_EQ(w.failures, before.failures + 1);
        for (std::size_t k = 0; k < kTargetCount; ++k)
          ASSERT_EQ(w.scene.targets[k].status, before.scene.targets[k].status);
      } else {
        ASSERT_EQ(w.failures, before.failures);
      }
      if (ev && ev->kind == EventKind::TargetCut) {
        ++total_cuts;
        ASSERT_EQ(ev->target, before.current_target().value());
      }
    }
  }
  EXPECT_GT(total_cuts, 100);
  EXPECT_GT(total_misses, 100);
}

// Rotating and translating the whole scene together with the tip leaves
// cut detection unchanged.
TEST(Property, RigidTransformInvariance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> off(-20.0, 20.0);
  std::uniform_real_distribution<double> h(-3.0, 3.0);
  const World base = fresh_world();
  for (int n = 0; n < 2000; ++n) {
    const Quat q = Quat(Eigen::AngleAxisd(u(rng) * 3.14159, Vec3(u(rng), u(rng), u(rng)).normalized()));
    const Vec3 shift(off(rng) * 10, off(rng) * 10, off(rng) * 10);
    auto xf = [&](const Vec3& p) { return Vec3(q * p + shift); };
    World moved = base;
    auto& pl = moved.scene.plane;
    pl.center = xf(pl.center);
    pl.u_axis = q * pl.u_axis;
    pl.v_axis = q * pl.v_axis;
    pl.normal = q * pl.normal;
    for (auto& t : moved.scene.targets) t.center = xf(t.center);

    const int i = static_cast<int>(rng() % 4);
    const Vec3 p = target_point(base, i, h(rng)) + off(rng) * base.scene.plane.u_axis +
                   off(rng) * base.scene.plane.v_axis;
    const auto a = cut_step(base, at(p), true);
    const auto b = cut_step(moved, at(xf(p)), true);
    ASSERT_EQ(a.event, b.event);
  }
}

}  // namespace
}  // namespace trilimb
