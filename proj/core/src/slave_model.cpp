/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "trilimb/slave_model.hpp"

#include <algorithm>
#include <cmath>

namespace trilimb {

BacklashStep apply_backlash(const BacklashModel& model, double input_deg) {
  const double w = model.half_width_deg;
  const double out = std::clamp(model.play_state_deg, input_deg - w, input_deg + w);
  return {BacklashModel{w, out}, out};
}

EndoscopeState EndoscopeState::initial(const EndoscopeConfig& cfg) {
  EndoscopeState s;
  s.backlash_ud.half_width_deg = cfg.backlash_half_width_deg;
  s.backlash_lr.half_width_deg = cfg.backlash_half_width_deg;
  return s;
}

namespace {

struct BendAxis {
  double motor_deg;
  double distal_deg;
  BacklashModel backlash;
};

// The motor is held within one half-width of the distal saturation point so
// the play state can always be clamped at the bend limit without leaving the
// envelope around the motor angle.
BendAxis step_bend_axis(double motor_deg, const BacklashModel& backlash, double rate_dps,
                        double dt, const EndoscopeConfig& cfg) {
  const double out_limit = cfg.bend_limit_deg / cfg.motor_to_distal_gain;
  const double w = backlash.half_width_deg;
  double motor = motor_deg;
  if (rate_dps != 0.0) motor = std::clamp(motor + rate_dps * dt, -(out_limit + w), out_limit + w);
  auto step = apply_backlash(backlash, motor);
  const double out = std::clamp(step.output_deg, -out_limit, out_limit);
  step.model.play_state_deg = out;
  return {motor, cfg.motor_to_distal_gain * out, step.model};
}

double wrap_360(double deg) {
  double g = std::fmod(deg, 360.0);
  if (g < 0.0) g += 360.0;
  if (g >= 360.0) g = 0.0;
  return g;
}

}  // namespace

EndoscopeState step_endoscope(const EndoscopeState& state, const EndoVelocity& vel, double dt,
                              const EndoscopeConfig& cfg) {
  if (!vel.is_finite()) throw InvalidCommand("endoscope velocity is not finite");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidCommand("dt must be positive and finite");
  if (!(cfg.motor_to_distal_gain > 0.0)) throw InvalidCommand("motor_to_distal_gain must be > 0");

  EndoscopeState next = state;

  const auto ud = step_bend_axis(state.ud_motor_deg, state.backlash_ud, vel.theta_dps, dt, cfg);
  next.ud_motor_deg = ud.motor_deg;
  next.theta_e_deg = ud.distal_deg;
  next.backlash_ud = ud.backlash;

  const auto lr = step_bend_axis(state.lr_motor_deg, state.backlash_lr, vel.phi_dps, dt, cfg);
  next.lr_motor_deg = lr.motor_deg;
  next.phi_e_deg = lr.distal_deg;
  next.backlash_lr = lr.backlash;

  // Insertion and roll are separate mechanisms; a zero rate leaves the field
  // bit-for-bit untouched.
  if (vel.y_mmps != 0.0) next.y_e_mm = std::clamp(state.y_e_mm + vel.y_mmps * dt, 0.0, cfg.travel_mm);
  if (vel.gamma_dps != 0.0) next.gamma_e_deg = wrap_360(state.gamma_e_deg + vel.gamma_dps * dt);

  return next;
}

TipPose arc_end(double bend_rad, double azimuth_rad, double len_mm) {
  // (1 - cos b) / b and sin b / b, with series near zero.
  double radial;
  double axial;
  const double b = bend_rad;
  if (std::abs(b) < 1e-4) {
    radial = len_mm * (b / 2.0 - b * b * b / 24.0);
    axial = len_mm * (1.0 - b * b / 6.0);
  } else {
    radial = len_mm * (1.0 - std::cos(b)) / b;
    axial = len_mm * std::sin(b) / b;
  }
  const double ca = std::cos(azimuth_rad);
  const double sa = std::sin(azimuth_rad);
  TipPose pose;
  pose.position = Vec3(radial * ca, radial * sa, axial);
  pose.orientation = Quat(Eigen::AngleAxisd(b, Vec3(-sa, ca, 0.0)));
  return pose;
}

namespace {

TipPose compose(const TipPose& a, const TipPose& b) {
  TipPose out;
  out.position = a.position + a.orientation * b.position;
  out.orientation = (a.orientation * b.orientation).normalized();
  return out;
}

TipPose rotation_z(double rad) {
  TipPose p;
  p.orientation = Quat(Eigen::AngleAxisd(rad, Vec3::UnitZ()));
  return p;
}

TipPose translation_z(double mm) {
  TipPose p;
  p.position = Vec3(0.0, 0.0, mm);
  return p;
}

}  // namespace

TipPose endoscope_fk(const EndoscopeState& state, double bend_len_mm) {
  const double theta = deg2rad(state.theta_e_deg);
  const double phi = deg2rad(state.phi_e_deg);
  const double bend = std::hypot(theta, phi);
  const double azimuth = bend > 0.0 ? std::atan2(phi, theta) : 0.0;
  TipPose pose = compose(translation_z(state.y_e_mm), rotation_z(deg2rad(state.gamma_e_deg)));
  return compose(pose, arc_end(bend, azimuth, bend_len_mm));
}

InstrumentArmState InstrumentArmState::initial(ToolKind kind) {
  InstrumentArmState arm;
  arm.kind = kind;
  if (kind == ToolKind::Grasper) arm.grip = 0.0;
  return arm;
}

namespace {

double move_toward(double current, double target, double max_step) {
  const double delta = target - current;
  if (std::abs(delta) <= max_step) return target;
  return current + std::copysign(max_step, delta);
}

}  // namespace

InstrumentArmState step_instrument(const InstrumentArmState& arm, const InstrumentTarget& target,
                                   const JointRateLimits& limits, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidCommand("dt must be positive and finite");
  const bool wants_grip = arm.kind == ToolKind::Grasper;
  if (target.grip.has_value() != wants_grip)
    throw InvalidCommand(wants_grip ? "grasper target needs a grip value"
                                    : "hook target must not carry a grip value");
  if (!std::isfinite(target.bend1_deg) || !std::isfinite(target.bend2_deg) ||
      !std::isfinite(target.trans_mm) || !std::isfinite(target.roll_deg) ||
      (target.grip && !std::isfinite(*target.grip)))
    throw InvalidCommand("instrument target is not finite");

  InstrumentArmState next = arm;
  next.bend1_deg = std::clamp(move_toward(arm.bend1_deg, target.bend1_deg, limits.bend_dps * dt),
                              -kToolBendLimitDeg, kToolBendLimitDeg);
  next.bend2_deg = std::clamp(move_toward(arm.bend2_deg, target.bend2_deg, limits.bend_dps * dt),
                              -kToolBendLimitDeg, kToolBendLimitDeg);
  next.trans_mm = std::clamp(move_toward(arm.trans_mm, target.trans_mm, limits.trans_mmps * dt),
                             -kToolWithdrawMm, 0.0);
  next.roll_deg = move_toward(arm.roll_deg, target.roll_deg, limits.roll_dps * dt);
  if (wants_grip) {
    next.grip = std::clamp(move_toward(arm.grip.value_or(0.0), *target.grip, limits.grip_per_s * dt),
                           0.0, 1.0);
  }
  return next;
}

TipPose instrument_fk(const InstrumentArmState& arm, const TipPose& base,
                      const InstrumentGeometry& geometry) {
  const double l1 = geometry.segment_mm[0];
  const double l2 = geometry.segment_mm[1];
  const double shaft = geometry.nominal_protrusion_mm + arm.trans_mm - l1 - l2;
  TipPose pose = compose(base, rotation_z(deg2rad(arm.roll_deg)));
  pose = compose(pose, translation_z(shaft));
  pose = compose(pose, arc_end(deg2rad(arm.bend1_deg), std::numbers::pi / 2.0, l1));
  return compose(pose, arc_end(deg2rad(arm.bend2_deg), 0.0, l2));
}

double MarkerChain::delta_x() const { return points.at(7).x() - points.at(0).x(); }
double MarkerChain::delta_y() const { return points.at(7).y() - points.at(0).y(); }

double estimate_bend_from_markers(const MarkerChain& chain) {
  if (chain.points.size() < 8) throw DegenerateMarkers("need at least 8 marker points");
  const double dy = chain.delta_y();
  if (dy == 0.0) throw DegenerateMarkers("markers 1 and 8 have zero delta_y");
  return rad2deg(2.0 * std::atan(chain.delta_x() / dy));
}

}  // namespace trilimb
