/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "trilimb/slave_model.hpp"

namespace trilimb {

enum class ControlMode : std::uint8_t { ThreeLimb = 0, HandClutch = 1 };
enum class Hand : std::uint8_t { Left = 0, Right = 1 };
enum class HandRole : std::uint8_t { ToolControl = 0, EndoscopeControl = 1 };

/// Which master device populated the endoscope velocity of a command.
/// `None` means the endoscope is commanded to hold (zero velocity).
enum class EndoSource : std::uint8_t { None = 0, Foot = 1, LeftHand = 2, RightHand = 3 };

/// The grasper hangs off the left hand, the hook off the right.
constexpr ToolKind tool_for(Hand h) { return h == Hand::Left ? ToolKind::Grasper : ToolKind::Hook; }
constexpr Hand other(Hand h) { return h == Hand::Left ? Hand::Right : Hand::Left; }

/// Normalized pedal deflections, each in [-1, 1].
struct FootPose {
  double theta_f = 0.0;
  double phi_f = 0.0;
  double x_f = 0.0;
  double y_f = 0.0;

  friend bool operator==(const FootPose&, const FootPose&) = default;
};

struct HandPose {
  double x_mm = 0.0;
  double y_mm = 0.0;
  double z_mm = 0.0;
  double gamma_deg = 0.0;
  double grip = 0.0;
  bool btn_upper = false;
  bool btn_lower = false;

  friend bool operator==(const HandPose&, const HandPose&) = default;
};

struct InterfaceTravel {
  double translation_mm = 60.0;
  double roll_deg = 60.0;

  friend bool operator==(const InterfaceTravel&, const InterfaceTravel&) = default;
};

struct RateConfig {
  double max_bend_rate = 30.0;   // deg/s
  double max_trans_rate = 20.0;  // mm/s
  double max_roll_rate = 30.0;   // deg/s
  double deadband = 0.05;
  double tool_rot_rate = 45.0;  // deg/s at full handle roll

  void validate() const;

  friend bool operator==(const RateConfig&, const RateConfig&) = default;
};

/// Hand-travel to tool joint-space scaling.
struct WorkspaceMap {
  InterfaceTravel travel;
  double bend_limit_deg = kToolBendLimitDeg;
  double withdraw_mm = kToolWithdrawMm;
  double deadband = 0.05;
  double tool_rot_rate = 45.0;

  static WorkspaceMap from(const RateConfig& rates, const InterfaceTravel& travel);
};

/// Dead-band and rescale: |d| <= eps maps to 0, otherwise (|d|-eps)/(1-eps)
/// with the sign of d. Input is clamped to [-1, 1].
double apply_deadband(double deflection, double eps);

EndoVelocity foot_to_endoscope_velocity(const FootPose& pose, const RateConfig& cfg);

/// Same velocity range as the foot path; deflection normalized by travel.
EndoVelocity hand_to_endoscope_velocity(const HandPose& pose, const RateConfig& cfg,
                                        const InterfaceTravel& travel = {});

/// Slave-bound tool command: position targets for bends and translation,
/// a rate for roll, and grip for the grasper.
struct ToolCommand {
  double bend1_deg = 0.0;
  double bend2_deg = 0.0;
  double trans_mm = 0.0;
  double roll_rate_dps = 0.0;
  std::optional<double> grip;

  static ToolCommand zero(ToolKind kind);

  friend bool operator==(const ToolCommand&, const ToolCommand&) = default;
};

ToolCommand hand_to_instrument_target(const HandPose& pose, const WorkspaceMap& map, ToolKind kind);

/// Tool command relative to a rebase anchor: `held` plus the mapped hand
/// displacement since `anchor`.
ToolCommand relative_tool_command(const ToolCommand& held, const HandPose& pose,
                                  const HandPose& anchor, const WorkspaceMap& map);

// ---------------------------------------------------------------------------
// Clutch
// ---------------------------------------------------------------------------

struct ClutchState {
  ControlMode mode = ControlMode::ThreeLimb;
  Hand endoscope_hand = Hand::Right;
  std::array<HandRole, 2> role{HandRole::ToolControl, HandRole::ToolControl};
  HandPose rebase_anchor;
  /// Tool command of the clutch hand, frozen while it drives the endoscope.
  ToolCommand held_tool;
  bool prev_upper = false;
  bool prev_lower = false;
  bool swapped = false;  // a swap happened on the last clutch_step

  static ClutchState initial(ControlMode mode, Hand endoscope_hand = Hand::Right);

  HandRole role_of(Hand h) const { return role[static_cast<std::size_t>(h)]; }

  friend bool operator==(const ClutchState&, const ClutchState&) = default;
};

/// Edge-triggered swap on the clutch hand's buttons. Upper selects the
/// endoscope, lower the tool; a press of both on the same tick is ignored.
/// Outside HandClutch mode the state passes through unchanged.
ClutchState clutch_step(const ClutchState& state, const HandPose& clutch_hand_pose,
                        const WorkspaceMap& map);

/// Restoring force for a normalized deflection: -peak * d, so 0 N at home
/// and -/+peak at the travel limits.
double haptic_force(double deflection, double peak_n = 2.0);

// ---------------------------------------------------------------------------
// Composed command
// ---------------------------------------------------------------------------

struct MasterCommand {
  std::uint64_t tick = 0;
  std::uint64_t seq = 0;
  ControlMode mode = ControlMode::ThreeLimb;
  EndoSource endo_source = EndoSource::None;
  EndoVelocity endo_vel;
  ToolCommand left = ToolCommand::zero(ToolKind::Grasper);
  ToolCommand right = ToolCommand::zero(ToolKind::Hook);
  bool cautery = false;

  friend bool operator==(const MasterCommand&, const MasterCommand&) = default;
};

struct MasterInputs {
  FootPose foot;
  HandPose left;
  HandPose right;
  bool cautery = false;

  const HandPose& hand(Hand h) const { return h == Hand::Left ? left : right; }
};

/// Arbitrates foot and hands into one command. `clutch` must already be
/// stepped for this tick. seq is left at 0 for the session to assign.
MasterCommand compose_master_command(ControlMode mode, const ClutchState& clutch,
                                     const MasterInputs& inputs, std::uint64_t tick,
                                     const RateConfig& rates, const InterfaceTravel& travel = {});

// ---------------------------------------------------------------------------
// Input-device record
// ---------------------------------------------------------------------------

/// One normalized input frame. Axis order:
/// [θf, φf, xf, yf, Lx, Ly, Lz, Lγ, Lgrip, LbtnU, LbtnD,
///  Rx, Ry, Rz, Rγ, Rgrip, RbtnU, RbtnD, cautery]
struct AxesRecord {
  enum Index : std::size_t {
    kThetaF = 0, kPhiF, kXF, kYF,
    kLx, kLy, kLz, kLGamma, kLGrip, kLBtnUpper, kLBtnLower,
    kRx, kRy, kRz, kRGamma, kRGrip, kRBtnUpper, kRBtnLower,
    kCautery,
    kCount
  };

  std::array<double, kCount> v{};

  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
  bool all_finite() const;

  friend bool operator==(const AxesRecord&, const AxesRecord&) = default;
};

/// Converts a record to device poses, clamping each axis to its range.
/// Buttons and cautery are pressed when > 0.5.
MasterInputs to_master_inputs(const AxesRecord& axes, const InterfaceTravel& travel = {});

}  // namespace trilimb
