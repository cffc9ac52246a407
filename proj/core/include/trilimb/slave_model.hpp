/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <array>
#include <optional>
#include <vector>

#include "trilimb/common.hpp"

namespace trilimb {

// ---------------------------------------------------------------------------
// Cable backlash
// ---------------------------------------------------------------------------

/// Classical play operator. The output stays put until the input has moved
/// more than `half_width_deg` away from it, then drags along at unit slope.
struct BacklashModel {
  double half_width_deg = 0.0;
  double play_state_deg = 0.0;

  friend bool operator==(const BacklashModel&, const BacklashModel&) = default;
};

struct BacklashStep {
  BacklashModel model;
  double output_deg = 0.0;
};

BacklashStep apply_backlash(const BacklashModel& model, double input_deg);

// ---------------------------------------------------------------------------
// Flexible endoscope
// ---------------------------------------------------------------------------

struct EndoscopeConfig {
  double backlash_half_width_deg = 22.5;
  /// Distal bend per degree of play-operator output, outside the dead zone.
  double motor_to_distal_gain = 1.0;
  double bend_limit_deg = 180.0;
  double bend_length_mm = 100.0;
  double travel_mm = 500.0;

  friend bool operator==(const EndoscopeConfig&, const EndoscopeConfig&) = default;
};

/// Rates for (theta, phi, insertion, roll). Bend rates drive the proximal
/// motors; insertion and roll integrate directly.
struct EndoVelocity {
  double theta_dps = 0.0;
  double phi_dps = 0.0;
  double y_mmps = 0.0;
  double gamma_dps = 0.0;

  bool is_zero() const {
    return theta_dps == 0.0 && phi_dps == 0.0 && y_mmps == 0.0 && gamma_dps == 0.0;
  }
  bool is_finite() const {
    return std::isfinite(theta_dps) && std::isfinite(phi_dps) && std::isfinite(y_mmps) &&
           std::isfinite(gamma_dps);
  }

  friend bool operator==(const EndoVelocity&, const EndoVelocity&) = default;
};

struct EndoscopeState {
  double ud_motor_deg = 0.0;
  double lr_motor_deg = 0.0;
  double theta_e_deg = 0.0;
  double phi_e_deg = 0.0;
  double y_e_mm = 0.0;
  double gamma_e_deg = 0.0;  // kept in [0, 360)
  BacklashModel backlash_ud;
  BacklashModel backlash_lr;

  static EndoscopeState initial(const EndoscopeConfig& cfg = {});

  friend bool operator==(const EndoscopeState&, const EndoscopeState&) = default;
};

/// Forward-Euler step of the 4-DoF scope. Throws InvalidCommand on a
/// non-finite rate or a non-positive dt.
EndoscopeState step_endoscope(const EndoscopeState& state, const EndoVelocity& vel, double dt,
                              const EndoscopeConfig& cfg = {});

struct TipPose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  /// Unit vector along the local +z (pointing direction).
  Vec3 axis() const { return orientation * Vec3::UnitZ(); }
};

/// Constant-curvature forward kinematics of the bending section. The scope
/// base sits at the world origin and inserts along +z; theta bends toward +x
/// (up), phi toward +y (right).
TipPose endoscope_fk(const EndoscopeState& state, double bend_len_mm);

/// Pose of the end of a constant-curvature arc of length `len_mm`, bent by
/// `bend_rad` (signed) in the plane at `azimuth_rad` around local z.
TipPose arc_end(double bend_rad, double azimuth_rad, double len_mm);

// ---------------------------------------------------------------------------
// Instrument arms
// ---------------------------------------------------------------------------

enum class ToolKind : std::uint8_t { Grasper = 0, Hook = 1 };

inline constexpr double kToolBendLimitDeg = 83.0;
inline constexpr double kToolWithdrawMm = 40.0;

/// bend1 is the L/R joint (first segment), bend2 the U/D joint (second
/// segment). trans_mm is relative to the nominal protrusion, in [-40, 0].
struct InstrumentArmState {
  ToolKind kind = ToolKind::Hook;
  double bend1_deg = 0.0;
  double bend2_deg = 0.0;
  double trans_mm = 0.0;
  double roll_deg = 0.0;
  std::optional<double> grip;  // present iff kind == Grasper

  static InstrumentArmState initial(ToolKind kind);

  friend bool operator==(const InstrumentArmState&, const InstrumentArmState&) = default;
};

/// Joint-space target, same layout as InstrumentArmState minus the kind.
struct InstrumentTarget {
  double bend1_deg = 0.0;
  double bend2_deg = 0.0;
  double trans_mm = 0.0;
  double roll_deg = 0.0;
  std::optional<double> grip;

  friend bool operator==(const InstrumentTarget&, const InstrumentTarget&) = default;
};

struct JointRateLimits {
  double bend_dps = 60.0;
  double trans_mmps = 20.0;
  double roll_dps = 90.0;
  double grip_per_s = 2.0;

  friend bool operator==(const JointRateLimits&, const JointRateLimits&) = default;
};

InstrumentArmState step_instrument(const InstrumentArmState& arm, const InstrumentTarget& target,
                                   const JointRateLimits& limits, double dt);

struct InstrumentGeometry {
  double nominal_protrusion_mm = 60.0;
  std::array<double, 2> segment_mm{25.0, 25.0};

  friend bool operator==(const InstrumentGeometry&, const InstrumentGeometry&) = default;
};

/// Tool-tip pose of a two-segment constant-curvature arm mounted at `base`.
/// With all joints at zero the tip lies nominal_protrusion + trans_mm ahead of
/// the base along its axis.
TipPose instrument_fk(const InstrumentArmState& arm, const TipPose& base,
                      const InstrumentGeometry& geometry = {});

// ---------------------------------------------------------------------------
// Marker-based bend estimation
// ---------------------------------------------------------------------------

struct MarkerChain {
  /// points[0] is the proximal end of the bending section.
  std::vector<Eigen::Vector2d> points;

  double delta_x() const;
  double delta_y() const;
};

/// Bend angle in degrees from markers 1 and 8: 2 * atan(dx / dy).
double estimate_bend_from_markers(const MarkerChain& chain);

}  // namespace trilimb
