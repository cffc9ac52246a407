/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "trilimb/session.hpp"

#include <cmath>

#include "trilimb/hash.hpp"

namespace trilimb {

void SessionConfig::validate() const {
  if (!(tick_hz > 0.0) || !std::isfinite(tick_hz)) throw InvalidInput("tick_hz must be positive");
  rates.validate();
  if (!(travel.translation_mm > 0.0) || !(travel.roll_deg > 0.0))
    throw InvalidInput("interface travel must be positive");
  if (!(endoscope.backlash_half_width_deg >= 0.0))
    throw InvalidInput("backlash half-width must be >= 0");
  if (!(endoscope.motor_to_distal_gain > 0.0) || !(endoscope.bend_length_mm > 0.0) ||
      !(endoscope.bend_limit_deg > 0.0) || !(endoscope.travel_mm > 0.0))
    throw InvalidInput("endoscope geometry must be positive");
  command_channel().validate();
}

ChannelConfig SessionConfig::command_channel() const {
  return {latency_ticks, jitter_ticks, drop_rate, seed};
}

ChannelConfig SessionConfig::feedback_channel() const {
  return {latency_ticks, jitter_ticks, drop_rate, seed ^ 0x9e3779b97f4a7c15ULL};
}

Session::Session(SessionConfig cfg)
    : cfg_(std::move(cfg)),
      map_(WorkspaceMap::from(cfg_.rates, cfg_.travel)),
      clutch_(ClutchState::initial(cfg_.mode, cfg_.clutch_hand)),
      to_slave_(cfg_.command_channel()),
      to_master_(cfg_.feedback_channel()),
      endo_(EndoscopeState::initial(cfg_.endoscope)),
      arms_{InstrumentArmState::initial(ToolKind::Grasper),
            InstrumentArmState::initial(ToolKind::Hook)},
      world_(World::make(load_scene(cfg_.scene), cfg_.world)) {
  cfg_.validate();
}

TipPose Session::tool_base(Hand h) const {
  const TipPose tip = endoscope_fk(endo_, cfg_.endoscope.bend_length_mm);
  const double side = h == Hand::Left ? -1.0 : 1.0;
  TipPose base = tip;
  base.position = tip.position + tip.orientation * Vec3(0.0, side * cfg_.channel_offset_mm, 0.0);
  return base;
}

std::array<TipPose, 3> Session::tip_poses() const {
  return {
      endoscope_fk(endo_, cfg_.endoscope.bend_length_mm),
      instrument_fk(arms_[0], tool_base(Hand::Left), cfg_.tool_geometry),
      instrument_fk(arms_[1], tool_base(Hand::Right), cfg_.tool_geometry),
  };
}

namespace {

InstrumentTarget to_target(const ToolCommand& cmd, const InstrumentArmState& arm, double dt) {
  return InstrumentTarget{
      .bend1_deg = cmd.bend1_deg,
      .bend2_deg = cmd.bend2_deg,
      .trans_mm = cmd.trans_mm,
      .roll_deg = arm.roll_deg + cmd.roll_rate_dps * dt,
      .grip = cmd.grip,
  };
}

}  // namespace

TickOutput Session::tick(const AxesRecord& axes) {
  if (!axes.all_finite()) throw InvalidInput("axes record contains non-finite values");
  const double dt = 1.0 / cfg_.tick_hz;
  TickOutput out;
  out.tick = tick_;

  // (1) master side
  const MasterInputs inputs = to_master_inputs(axes, cfg_.travel);
  clutch_ = clutch_step(clutch_, inputs.hand(cfg_.clutch_hand), map_);
  MasterCommand cmd =
      compose_master_command(cfg_.mode, clutch_, inputs, tick_, cfg_.rates, cfg_.travel);
  cmd.seq = ++seq_;
  out.sent = cmd;

  // (2) + (3) command link; the slave holds the last command it received
  out.command_dropped = !to_slave_.send(std::move(cmd), tick_);
  for (auto& delivered : to_slave_.poll(tick_)) active_ = std::move(delivered);
  const MasterCommand applied = active_.value_or(MasterCommand{});
  if (active_) out.applied_seq = active_->seq;

  // (4) slave
  endo_ = step_endoscope(endo_, applied.endo_vel, dt, cfg_.endoscope);
  out.endo_moving = !applied.endo_vel.is_zero();
  if (out.endo_moving && !world_.motion_start_tick) world_.motion_start_tick = tick_;
  arms_[0] = step_instrument(arms_[0], to_target(applied.left, arms_[0], dt), cfg_.tool_rates, dt);
  arms_[1] = step_instrument(arms_[1], to_target(applied.right, arms_[1], dt), cfg_.tool_rates, dt);
  const auto poses = tip_poses();

  // (5) task world
  world_.tick = tick_;
  auto grasp = grasp_step(world_, poses[1], arms_[0].grip.value_or(0.0));
  world_ = std::move(grasp.world);
  if (grasp.event) out.events.push_back(*grasp.event);
  auto cut = cut_step(world_, poses[2], applied.cautery);
  world_ = std::move(cut.world);
  if (cut.event) out.events.push_back(*cut.event);

  // (6) feedback link
  SlaveStateMsg msg;
  msg.tick = tick_;
  msg.applied_seq = out.applied_seq;
  msg.endoscope = endo_;
  msg.arms = arms_;
  msg.tip_poses = poses;
  msg.events = out.events;
  to_master_.send(std::move(msg), tick_);
  auto feedback = to_master_.poll(tick_);
  if (!feedback.empty()) out.feedback = std::move(feedback.back());

  ++tick_;
  return out;
}

TrialResult Session::result(bool final_snapshot) const {
  return trial_status(world_, cfg_.tick_hz, final_snapshot);
}

SceneInfo Session::scene_info() const {
  SceneInfo info;
  info.mode = cfg_.mode;
  info.tick_hz = cfg_.tick_hz;
  info.plane = world_.scene.plane;
  info.targets = world_.scene.targets;
  return info;
}

namespace {

void hash_optional(StateHasher& h, const std::optional<std::uint64_t>& v) {
  h.boolean(v.has_value());
  h.u64(v.value_or(0));
}

void hash_hand_pose(StateHasher& h, const HandPose& p) {
  h.f64(p.x_mm);
  h.f64(p.y_mm);
  h.f64(p.z_mm);
  h.f64(p.gamma_deg);
  h.f64(p.grip);
  h.boolean(p.btn_upper);
  h.boolean(p.btn_lower);
}

template <class T>
void hash_channel(StateHasher& h, const Channel<T>& ch) {
  h.u64(ch.config().seed);
  h.u64(ch.draws());
  h.u64(ch.last_due_tick());
  h.u64(ch.in_flight().size());
  for (const auto& f : ch.in_flight()) {
    h.u64(f.due_tick);
    h.bytes(encode(f.msg));
  }
}

}  // namespace

std::uint64_t Session::state_hash() const {
  StateHasher h;
  h.u64(tick_);
  h.u64(seq_);

  h.byte(static_cast<std::uint8_t>(clutch_.mode));
  h.byte(static_cast<std::uint8_t>(clutch_.endoscope_hand));
  for (auto r : clutch_.role) h.byte(static_cast<std::uint8_t>(r));
  hash_hand_pose(h, clutch_.rebase_anchor);
  {
    MasterCommand held;
    held.left = clutch_.held_tool;
    h.bytes(encode(held));
  }
  h.boolean(clutch_.prev_upper);
  h.boolean(clutch_.prev_lower);
  h.boolean(clutch_.swapped);

  hash_channel(h, to_slave_);
  hash_channel(h, to_master_);
  h.boolean(active_.has_value());
  if (active_) h.bytes(encode(*active_));

  // Slave snapshot through the wire codec: endoscope, arms, poses.
  SlaveStateMsg snap;
  snap.endoscope = endo_;
  snap.arms = arms_;
  snap.tip_poses = tip_poses();
  h.bytes(encode(snap));

  h.u64(world_.tick);
  for (const auto& t : world_.scene.targets) h.byte(static_cast<std::uint8_t>(t.status));
  h.boolean(world_.grasp.held_target.has_value());
  h.byte(world_.grasp.held_target.value_or(kNoTarget));
  h.f64(world_.grasp.lift_mm);
  for (int i = 0; i < 3; ++i) h.f64(world_.grasp.attach_point[i]);
  h.boolean(world_.grasp.grip_closed);
  h.boolean(world_.burning);
  h.u32(world_.failures);
  h.u64(world_.failure_ticks.size());
  for (auto t : world_.failure_ticks) h.u64(t);
  for (const auto& t : world_.lifted_tick) hash_optional(h, t);
  for (const auto& t : world_.cut_tick) hash_optional(h, t);
  hash_optional(h, world_.motion_start_tick);
  return h.digest();
}

}  // namespace trilimb
