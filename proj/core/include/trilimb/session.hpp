/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "trilimb/channel.hpp"
#include "trilimb/master_mapping.hpp"
#include "trilimb/protocol.hpp"
#include "trilimb/slave_model.hpp"
#include "trilimb/task_world.hpp"

namespace trilimb {

/// Everything that determines a run. Defaults are engineering choices for a
/// desk-scale setup; `trilimb --show-config` prints them.
struct SessionConfig {
  double tick_hz = 100.0;
  ControlMode mode = ControlMode::ThreeLimb;
  Hand clutch_hand = Hand::Right;
  RateConfig rates;
  InterfaceTravel travel;
  EndoscopeConfig endoscope;
  InstrumentGeometry tool_geometry;
  JointRateLimits tool_rates;
  /// Lateral offset of each instrument channel from the scope axis.
  double channel_offset_mm = 3.5;
  SceneConfig scene = SceneConfig::default_config();
  WorldConfig world;
  std::uint32_t latency_ticks = 0;
  std::uint32_t jitter_ticks = 0;
  double drop_rate = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
  ChannelConfig command_channel() const;
  ChannelConfig feedback_channel() const;
};

nlohmann::json config_to_json(const SessionConfig& cfg);
/// Missing keys keep their defaults.
SessionConfig config_from_json(const nlohmann::json& j);
/// Digest of every field except the seed.
std::uint64_t config_digest(const SessionConfig& cfg);

const char* to_string(ControlMode mode);
ControlMode control_mode_from(const std::string& s);

struct TickOutput {
  std::uint64_t tick = 0;
  MasterCommand sent;
  bool command_dropped = false;
  /// seq of the command integrated by the slave this tick.
  std::optional<std::uint64_t> applied_seq;
  bool endo_moving = false;
  std::vector<TaskEvent> events;
  /// Latest slave state that reached the master side this tick.
  std::optional<SlaveStateMsg> feedback;
};

/// Fixed-tick lockstep master/slave session. Each tick: map inputs, send the
/// command, deliver due commands, step the slave, step the task world, send
/// the slave state back. The only randomness is the two seeded channels.
class Session {
 public:
  explicit Session(SessionConfig cfg);

  /// Throws InvalidInput on a non-finite record; the session is unchanged.
  TickOutput tick(const AxesRecord& axes);

  std::uint64_t current_tick() const { return tick_; }
  const SessionConfig& config() const { return cfg_; }
  const EndoscopeState& endoscope() const { return endo_; }
  /// Overwrites the slave endoscope state; for fault injection.
  void set_endoscope_state(const EndoscopeState& s) { endo_ = s; }
  const InstrumentArmState& arm(Hand h) const { return arms_[static_cast<std::size_t>(h)]; }
  const World& world() const { return world_; }
  const ClutchState& clutch() const { return clutch_; }
  const std::optional<MasterCommand>& active_command() const { return active_; }
  const Channel<MasterCommand>& command_channel() const { return to_slave_; }
  const Channel<SlaveStateMsg>& feedback_channel() const { return to_master_; }

  /// Endoscope tip, grasper tip, hook tip.
  std::array<TipPose, 3> tip_poses() const;
  /// Mounting pose of the instrument held by hand `h`.
  TipPose tool_base(Hand h) const;

  TrialResult result(bool final_snapshot = false) const;
  SceneInfo scene_info() const;
  std::uint64_t state_hash() const;

 private:
  SessionConfig cfg_;
  WorkspaceMap map_;
  std::uint64_t tick_ = 0;
  std::uint64_t seq_ = 0;
  ClutchState clutch_;
  Channel<MasterCommand> to_slave_;
  Channel<SlaveStateMsg> to_master_;
  std::optional<MasterCommand> active_;
  EndoscopeState endo_;
  std::array<InstrumentArmState, 2> arms_;
  World world_;
};

inline std::uint64_t state_hash(const Session& s) { return s.state_hash(); }

}  // namespace trilimb
