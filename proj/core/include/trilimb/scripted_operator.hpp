/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <deque>
#include <optional>

#include "trilimb/session.hpp"
#include "trilimb/trace.hpp"

namespace trilimb {

struct ScriptOptions {
  /// Cautery pulses fired outside every zone before the first cut.
  std::uint32_t miss_touches = 0;
  std::uint64_t idle_ticks = 10;
  /// Zero-input ticks appended after the last cut, so a delayed open-loop
  /// replay still sees the final cut.
  std::uint64_t tail_ticks = 100;
  std::uint64_t max_ticks = 60000;
  /// Distance from the scope tip to the aimed target along the scope axis.
  double standoff_mm = 45.0;
  double lift_mm = 8.0;
  /// Per-step give-up limit.
  std::uint64_t step_timeout_ticks = 3000;
};

/// Scope joint values whose aim point (tip + standoff along the tip axis)
/// lands on `point`. Roll is kept at the state's current value.
std::optional<EndoscopeState> aim_endoscope(const EndoscopeState& from, const Vec3& point,
                                            double standoff_mm, double bend_len_mm);

/// (bend1, bend2, trans) placing the tool tip of `arm` mounted at `base` on
/// `point`, within joint limits. nullopt when the residual exceeds 0.05 mm.
std::optional<InstrumentArmState> reach_tool(const InstrumentArmState& arm, const TipPose& base,
                                             const Vec3& point, const InstrumentGeometry& geom);

/// Closed-loop operator that performs the four-target task in the session's
/// control mode. It reads the true session state and emits one axes record
/// per tick, working through the targets right to left.
class ScriptedOperator {
 public:
  explicit ScriptedOperator(ScriptOptions opt = {});

  /// Axes record for the next tick of `s`.
  AxesRecord next(const Session& s);
  bool done() const { return done_; }

 private:
  enum class Kind {
    Idle, AimScope, Press, Reach, Grip, Cautery, Rest, Tail
  };
  struct Step {
    Kind kind = Kind::Idle;
    Hand hand = Hand::Right;
    std::size_t target = 0;
    Vec3 offset = Vec3::Zero();  // (u, v, h) around the target center
    double value = 0.0;          // grip level or button/cautery state
    bool upper = false;
    std::uint64_t ticks = 0;     // fixed-length steps
  };

  void plan(const Session& s);
  bool run_step(const Session& s, Step& step, AxesRecord& out);
  void emit_hands(AxesRecord& out) const;

  ScriptOptions opt_;
  std::deque<Step> steps_;
  bool planned_ = false;
  bool done_ = false;
  std::uint64_t step_age_ = 0;
  std::optional<EndoscopeState> scope_goal_;
  // Hand joint-space axes held between steps: x, y, z, grip.
  std::array<std::array<double, 4>, 2> hand_{};
};

/// Runs the scripted operator on a fresh session and records every tick.
TrialLog run_scripted(const SessionConfig& cfg, const ScriptOptions& opt = {});

}  // namespace trilimb
