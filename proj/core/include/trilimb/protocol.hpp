/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "trilimb/master_mapping.hpp"
#include "trilimb/task_world.hpp"

namespace trilimb {

// Wire layout (all little-endian, fixed size except the event list):
//
//   offset 0  magic   "ETOP"
//   offset 4  version 0x01
//   offset 5  type    0x01 MasterCommand, 0x02 SlaveStateMsg,
//                     0x03 AxesFrame, 0x04 SceneInfo
//   offset 6  payload
//
// Field tables live in docs/wire_format.md.

inline constexpr std::array<std::uint8_t, 4> kWireMagic{'E', 'T', 'O', 'P'};
inline constexpr std::uint8_t kWireVersion = 0x01;
inline constexpr std::size_t kWireHeaderSize = 6;
inline constexpr std::uint32_t kMaxFrameBytes = 1u << 20;

enum class MessageType : std::uint8_t {
  MasterCommand = 0x01,
  SlaveState = 0x02,
  AxesFrame = 0x03,
  SceneInfo = 0x04,
};

struct SlaveStateMsg {
  std::uint64_t tick = 0;
  /// seq of the command the slave integrated on this tick.
  std::optional<std::uint64_t> applied_seq;
  EndoscopeState endoscope;
  std::array<InstrumentArmState, 2> arms{InstrumentArmState::initial(ToolKind::Grasper),
                                         InstrumentArmState::initial(ToolKind::Hook)};
  /// Endoscope tip, grasper tip, hook tip.
  std::array<TipPose, 3> tip_poses;
  std::vector<TaskEvent> events;
};

bool operator==(const SlaveStateMsg& a, const SlaveStateMsg& b);

/// One operator input frame as sent by a console.
struct AxesFrame {
  std::uint64_t frame = 0;
  AxesRecord axes;

  friend bool operator==(const AxesFrame&, const AxesFrame&) = default;
};

/// Scene geometry pushed to a console right after it connects.
struct SceneInfo {
  ControlMode mode = ControlMode::ThreeLimb;
  double tick_hz = 100.0;
  TissuePlane plane;
  std::array<Target, kTargetCount> targets;
};

using Message = std::variant<MasterCommand, SlaveStateMsg, AxesFrame, SceneInfo>;

std::vector<std::uint8_t> encode(const MasterCommand& msg);
std::vector<std::uint8_t> encode(const SlaveStateMsg& msg);
std::vector<std::uint8_t> encode(const AxesFrame& msg);
std::vector<std::uint8_t> encode(const SceneInfo& msg);
std::vector<std::uint8_t> encode(const Message& msg);

/// Throws CodecError carrying the offset of the first offending byte.
Message decode(std::span<const std::uint8_t> bytes);

template <class T>
T decode_as(std::span<const std::uint8_t> bytes) {
  Message m = decode(bytes);
  if (auto* p = std::get_if<T>(&m)) return std::move(*p);
  throw CodecError("unexpected message type", 5);
}

// ---------------------------------------------------------------------------
// Stream framing: [u32 length LE][payload]
// ---------------------------------------------------------------------------

std::vector<std::uint8_t> frame(std::span<const std::uint8_t> payload);

/// Incremental deframer for a byte stream.
class FrameReader {
 public:
  void feed(std::span<const std::uint8_t> bytes);
  /// Next complete payload, if buffered. Throws CodecError on an oversized
  /// length prefix.
  std::optional<std::vector<std::uint8_t>> next();
  std::size_t buffered() const { return buf_.size(); }

 private:
  std::vector<std::uint8_t> buf_;
};

}  // namespace trilimb
