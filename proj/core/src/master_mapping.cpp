/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "trilimb/master_mapping.hpp"

#include <algorithm>
#include <cmath>

namespace trilimb {

void RateConfig::validate() const {
  if (!(max_bend_rate > 0.0) || !(max_trans_rate > 0.0) || !(max_roll_rate > 0.0) ||
      !(tool_rot_rate > 0.0))
    throw InvalidInput("rate limits must be positive");
  if (!(deadband >= 0.0 && deadband < 1.0)) throw InvalidInput("deadband must be in [0, 1)");
}

WorkspaceMap WorkspaceMap::from(const RateConfig& rates, const InterfaceTravel& travel) {
  WorkspaceMap map;
  map.travel = travel;
  map.deadband = rates.deadband;
  map.tool_rot_rate = rates.tool_rot_rate;
  return map;
}

double apply_deadband(double deflection, double eps) {
  const double d = std::clamp(deflection, -1.0, 1.0);
  const double mag = std::abs(d);
  if (mag <= eps) return 0.0;
  return std::copysign((mag - eps) / (1.0 - eps), d);
}

EndoVelocity foot_to_endoscope_velocity(const FootPose& pose, const RateConfig& cfg) {
  const double eps = cfg.deadband;
  return EndoVelocity{
      .theta_dps = apply_deadband(pose.theta_f, eps) * cfg.max_bend_rate,
      .phi_dps = apply_deadband(pose.phi_f, eps) * cfg.max_bend_rate,
      .y_mmps = apply_deadband(pose.y_f, eps) * cfg.max_trans_rate,
      .gamma_dps = apply_deadband(pose.x_f, eps) * cfg.max_roll_rate,
  };
}

EndoVelocity hand_to_endoscope_velocity(const HandPose& pose, const RateConfig& cfg,
                                        const InterfaceTravel& travel) {
  const double eps = cfg.deadband;
  const double t = travel.translation_mm;
  return EndoVelocity{
      .theta_dps = apply_deadband(pose.z_mm / t, eps) * cfg.max_bend_rate,
      .phi_dps = apply_deadband(pose.y_mm / t, eps) * cfg.max_bend_rate,
      .y_mmps = apply_deadband(pose.x_mm / t, eps) * cfg.max_trans_rate,
      .gamma_dps = apply_deadband(pose.gamma_deg / travel.roll_deg, eps) * cfg.max_roll_rate,
  };
}

ToolCommand ToolCommand::zero(ToolKind kind) {
  ToolCommand cmd;
  if (kind == ToolKind::Grasper) cmd.grip = 0.0;
  return cmd;
}

ToolCommand hand_to_instrument_target(const HandPose& pose, const WorkspaceMap& map,
                                      ToolKind kind) {
  const double t = map.travel.translation_mm;
  const double lim = map.bend_limit_deg;
  ToolCommand cmd;
  cmd.bend1_deg = std::clamp(pose.y_mm / t * lim, -lim, lim);
  cmd.bend2_deg = std::clamp(pose.z_mm / t * lim, -lim, lim);
  // Centered or forward hand keeps the nominal protrusion; pulling back
  // withdraws the tool.
  cmd.trans_mm = std::clamp(pose.x_mm / t * map.withdraw_mm, -map.withdraw_mm, 0.0);
  cmd.roll_rate_dps = apply_deadband(pose.gamma_deg / map.travel.roll_deg, map.deadband) *
                      map.tool_rot_rate;
  if (kind == ToolKind::Grasper) cmd.grip = std::clamp(pose.grip, 0.0, 1.0);
  return cmd;
}

ToolCommand relative_tool_command(const ToolCommand& held, const HandPose& pose,
                                  const HandPose& anchor, const WorkspaceMap& map) {
  const double t = map.travel.translation_mm;
  const double lim = map.bend_limit_deg;
  ToolCommand cmd;
  cmd.bend1_deg = std::clamp(held.bend1_deg + (pose.y_mm - anchor.y_mm) / t * lim, -lim, lim);
  cmd.bend2_deg = std::clamp(held.bend2_deg + (pose.z_mm - anchor.z_mm) / t * lim, -lim, lim);
  cmd.trans_mm = std::clamp(held.trans_mm + (pose.x_mm - anchor.x_mm) / t * map.withdraw_mm,
                            -map.withdraw_mm, 0.0);
  cmd.roll_rate_dps =
      apply_deadband((pose.gamma_deg - anchor.gamma_deg) / map.travel.roll_deg, map.deadband) *
      map.tool_rot_rate;
  if (held.grip) cmd.grip = std::clamp(*held.grip + (pose.grip - anchor.grip), 0.0, 1.0);
  return cmd;
}

ClutchState ClutchState::initial(ControlMode mode, Hand endoscope_hand) {
  ClutchState s;
  s.mode = mode;
  s.endoscope_hand = endoscope_hand;
  s.held_tool = ToolCommand::zero(tool_for(endoscope_hand));
  if (mode == ControlMode::HandClutch)
    s.role[static_cast<std::size_t>(endoscope_hand)] = HandRole::EndoscopeControl;
  return s;
}

ClutchState clutch_step(const ClutchState& state, const HandPose& pose, const WorkspaceMap& map) {
  ClutchState next = state;
  next.swapped = false;
  if (state.mode != ControlMode::HandClutch) return next;

  const bool upper_edge = pose.btn_upper && !state.prev_upper;
  const bool lower_edge = pose.btn_lower && !state.prev_lower;
  next.prev_upper = pose.btn_upper;
  next.prev_lower = pose.btn_lower;
  if (upper_edge && lower_edge) return next;

  auto& role = next.role[static_cast<std::size_t>(state.endoscope_hand)];
  if (upper_edge && role == HandRole::ToolControl) {
    next.held_tool = relative_tool_command(state.held_tool, pose, state.rebase_anchor, map);
    next.held_tool.roll_rate_dps = 0.0;
    role = HandRole::EndoscopeControl;
    next.rebase_anchor = pose;
    next.swapped = true;
  } else if (lower_edge && role == HandRole::EndoscopeControl) {
    role = HandRole::ToolControl;
    next.rebase_anchor = pose;
    next.swapped = true;
  }
  return next;
}

double haptic_force(double deflection, double peak_n) {
  return -peak_n * std::clamp(deflection, -1.0, 1.0);
}

namespace {

HandPose displacement(const HandPose& pose, const HandPose& anchor) {
  HandPose d = pose;
  d.x_mm -= anchor.x_mm;
  d.y_mm -= anchor.y_mm;
  d.z_mm -= anchor.z_mm;
  d.gamma_deg -= anchor.gamma_deg;
  d.grip -= anchor.grip;
  return d;
}

EndoSource source_for(Hand h) { return h == Hand::Left ? EndoSource::LeftHand : EndoSource::RightHand; }

}  // namespace

MasterCommand compose_master_command(ControlMode mode, const ClutchState& clutch,
                                     const MasterInputs& inputs, std::uint64_t tick,
                                     const RateConfig& rates, const InterfaceTravel& travel) {
  const WorkspaceMap map = WorkspaceMap::from(rates, travel);
  MasterCommand cmd;
  cmd.tick = tick;
  cmd.mode = mode;
  cmd.cautery = inputs.cautery;
  cmd.left = hand_to_instrument_target(inputs.left, map, ToolKind::Grasper);
  cmd.right = hand_to_instrument_target(inputs.right, map, ToolKind::Hook);

  if (mode == ControlMode::ThreeLimb) {
    cmd.endo_source = EndoSource::Foot;
    cmd.endo_vel = foot_to_endoscope_velocity(inputs.foot, rates);
    return cmd;
  }

  const Hand h = clutch.endoscope_hand;
  const HandPose& pose = inputs.hand(h);
  ToolCommand& clutch_tool = h == Hand::Left ? cmd.left : cmd.right;
  if (clutch.role_of(h) == HandRole::EndoscopeControl) {
    cmd.endo_source = source_for(h);
    cmd.endo_vel =
        hand_to_endoscope_velocity(displacement(pose, clutch.rebase_anchor), rates, travel);
    clutch_tool = clutch.held_tool;
  } else {
    cmd.endo_source = EndoSource::None;
    cmd.endo_vel = EndoVelocity{};
    clutch_tool = relative_tool_command(clutch.held_tool, pose, clutch.rebase_anchor, map);
  }
  return cmd;
}

bool AxesRecord::all_finite() const {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

MasterInputs to_master_inputs(const AxesRecord& axes, const InterfaceTravel& travel) {
  auto unit = [&](std::size_t i) { return std::clamp(axes[i], -1.0, 1.0); };
  auto frac = [&](std::size_t i) { return std::clamp(axes[i], 0.0, 1.0); };
  auto pressed = [&](std::size_t i) { return axes[i] > 0.5; };
  auto hand = [&](std::size_t x, std::size_t y, std::size_t z, std::size_t g, std::size_t grip,
                  std::size_t up, std::size_t down) {
    return HandPose{
        .x_mm = unit(x) * travel.translation_mm,
        .y_mm = unit(y) * travel.translation_mm,
        .z_mm = unit(z) * travel.translation_mm,
        .gamma_deg = unit(g) * travel.roll_deg,
        .grip = frac(grip),
        .btn_upper = pressed(up),
        .btn_lower = pressed(down),
    };
  };
  using A = AxesRecord;
  MasterInputs in;
  in.foot = FootPose{unit(A::kThetaF), unit(A::kPhiF), unit(A::kXF), unit(A::kYF)};
  in.left = hand(A::kLx, A::kLy, A::kLz, A::kLGamma, A::kLGrip, A::kLBtnUpper, A::kLBtnLower);
  in.right = hand(A::kRx, A::kRy, A::kRz, A::kRGamma, A::kRGrip, A::kRBtnUpper, A::kRBtnLower);
  in.cautery = pressed(A::kCautery);
  return in;
}

}  // namespace trilimb
