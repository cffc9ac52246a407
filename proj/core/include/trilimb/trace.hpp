/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "trilimb/session.hpp"

namespace trilimb {

// Trace files (.trace) are JSON lines. Line 1 is the header, every further
// line is one tick:
//
//   {"t":0,"ax":[...19 numbers...],"seq":1,"h":"9f0c...","mv":false,"ev":[[1,0]]}
//
// t: tick index, ax: axes record, seq: seq of the command applied by the
// slave (null before the first delivery), h: state_hash after the tick as 16
// lowercase hex digits, mv: endoscope commanded to move, ev: [kind, target]
// pairs. Files are append-only; a truncated last line is ignored on read.

inline constexpr const char* kTraceFormat = "trilimb-trace";
inline constexpr int kTraceVersion = 1;

struct TraceHeader {
  std::uint64_t seed = 0;
  ControlMode mode = ControlMode::ThreeLimb;
  std::string scene_id;
  double tick_hz = 100.0;
  std::uint64_t config_digest = 0;
  SessionConfig config;
};

struct TickRecord {
  std::uint64_t tick = 0;
  AxesRecord axes;
  std::optional<std::uint64_t> applied_seq;
  std::uint64_t digest = 0;
  bool endo_moving = false;
  std::vector<TaskEvent> events;

  friend bool operator==(const TickRecord&, const TickRecord&) = default;
};

struct TrialLog {
  TraceHeader header;
  std::vector<TickRecord> ticks;
};

TraceHeader make_header(const SessionConfig& cfg);
TickRecord make_record(const AxesRecord& axes, const TickOutput& out, std::uint64_t digest);

void write_header(std::ostream& os, const TraceHeader& header);
void write_record(std::ostream& os, const TickRecord& record);
void write_trace(std::ostream& os, const TrialLog& log);
void write_trace_file(const std::filesystem::path& path, const TrialLog& log);

/// Throws TraceError on a malformed header, a malformed non-final line,
/// non-contiguous ticks or a header digest that does not match its config.
TrialLog read_trace(std::istream& is);
TrialLog read_trace_file(const std::filesystem::path& path);

/// Session wrapper that records every tick.
class Recorder {
 public:
  explicit Recorder(SessionConfig cfg);

  TickOutput step(const AxesRecord& axes);

  const Session& session() const { return session_; }
  const TrialLog& log() const { return log_; }

 private:
  Session session_;
  TrialLog log_;
};

struct ReplayResult {
  TrialResult result;
  std::uint64_t final_hash = 0;
  std::uint64_t ticks = 0;
};

/// Re-runs the recorded axes and checks the digest after every tick. With
/// `config` the given configuration is used instead of the header's; its
/// digest must match the header. Throws ReplayDivergence at the first
/// mismatching tick.
ReplayResult replay(const TrialLog& log, const std::optional<SessionConfig>& config = {});

/// Seconds from the first tick with a commanded endoscope motion to the tick
/// of the final TargetCut. Throws NotCompleted when either is missing.
double completion_time(const TrialLog& log);

std::string hex_digest(std::uint64_t digest);

}  // namespace trilimb
