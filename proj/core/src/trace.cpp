/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "trilimb/trace.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

namespace trilimb {

using nlohmann::json;

std::string hex_digest(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

namespace {

std::uint64_t parse_hex(const std::string& s) {
  if (s.size() != 16) throw TraceError("digest must be 16 hex digits: '" + s + "'");
  std::uint64_t v = 0;
  for (char c : s) {
    int d;
    if (c >= '0' && c <= '9')
      d = c - '0';
    else if (c >= 'a' && c <= 'f')
      d = c - 'a' + 10;
    else
      throw TraceError("bad hex digit in digest '" + s + "'");
    v = (v << 4) | static_cast<std::uint64_t>(d);
  }
  return v;
}

json header_json(const TraceHeader& h) {
  return json{
      {"format", kTraceFormat},
      {"version", kTraceVersion},
      {"seed", h.seed},
      {"mode", to_string(h.mode)},
      {"scene", h.scene_id},
      {"tick_hz", h.tick_hz},
      {"config_digest", hex_digest(h.config_digest)},
      {"config", config_to_json(h.config)},
  };
}

TraceHeader parse_header(const std::string& line) {
  TraceHeader h;
  try {
    const json j = json::parse(line);
    if (j.at("format").get<std::string>() != kTraceFormat) throw TraceError("not a trace file");
    if (j.at("version").get<int>() != kTraceVersion)
      throw TraceError("unsupported trace version " + j.at("version").dump());
    h.config = config_from_json(j.at("config"));
    h.seed = j.at("seed").get<std::uint64_t>();
    h.mode = control_mode_from(j.at("mode").get<std::string>());
    h.scene_id = j.at("scene").get<std::string>();
    h.tick_hz = j.at("tick_hz").get<double>();
    h.config_digest = parse_hex(j.at("config_digest").get<std::string>());
  } catch (const json::exception& e) {
    throw TraceError(std::string("malformed trace header: ") + e.what());
  } catch (const InvalidInput& e) {
    throw TraceError(std::string("malformed trace header: ") + e.what());
  }
  if (h.config_digest != config_digest(h.config))
    throw TraceError("header digest does not match its config");
  if (h.seed != h.config.seed || h.mode != h.config.mode || h.tick_hz != h.config.tick_hz)
    throw TraceError("header fields disagree with its config");
  return h;
}

TickRecord parse_record(const std::string& line) {
  const json j = json::parse(line);
  TickRecord r;
  r.tick = j.at("t").get<std::uint64_t>();
  const auto& ax = j.at("ax");
  if (!ax.is_array() || ax.size() != AxesRecord::kCount)
    throw TraceError("tick " + std::to_string(r.tick) + ": axes record must have 19 entries");
  for (std::size_t i = 0; i < AxesRecord::kCount; ++i) r.axes[i] = ax[i].get<double>();
  if (!j.at("seq").is_null()) r.applied_seq = j.at("seq").get<std::uint64_t>();
  r.digest = parse_hex(j.at("h").get<std::string>());
  r.endo_moving = j.at("mv").get<bool>();
  for (const auto& e : j.at("ev")) {
    const auto kind = e.at(0).get<int>();
    if (kind < 1 || kind > 6) throw TraceError("unknown event kind " + std::to_string(kind));
    r.events.push_back({static_cast<EventKind>(kind), e.at(1).get<std::uint8_t>()});
  }
  return r;
}

}  // namespace

TraceHeader make_header(const SessionConfig& cfg) {
  return TraceHeader{
      .seed = cfg.seed,
      .mode = cfg.mode,
      .scene_id = cfg.scene.name,
      .tick_hz = cfg.tick_hz,
      .config_digest = config_digest(cfg),
      .config = cfg,
  };
}

TickRecord make_record(const AxesRecord& axes, const TickOutput& out, std::uint64_t digest) {
  return TickRecord{
      .tick = out.tick,
      .axes = axes,
      .applied_seq = out.applied_seq,
      .digest = digest,
      .endo_moving = out.endo_moving,
      .events = out.events,
  };
}

void write_header(std::ostream& os, const TraceHeader& header) {
  os << header_json(header).dump() << '\n';
}

void write_record(std::ostream& os, const TickRecord& r) {
  json ev = json::array();
  for (const auto& e : r.events) ev.push_back({static_cast<int>(e.kind), e.target});
  const json j{
      {"t", r.tick},
      {"ax", r.axes.v},
      {"seq", r.applied_seq ? json(*r.applied_seq) : json(nullptr)},
      {"h", hex_digest(r.digest)},
      {"mv", r.endo_moving},
      {"ev", std::move(ev)},
  };
  os << j.dump() << '\n';
}

void write_trace(std::ostream& os, const TrialLog& log) {
  write_header(os, log.header);
  for (const auto& r : log.ticks) write_record(os, r);
}

void write_trace_file(const std::filesystem::path& path, const TrialLog& log) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw TraceError("cannot open " + path.string() + " for writing");
  write_trace(os, log);
  if (!os) throw TraceError("write failed: " + path.string());
}

TrialLog read_trace(std::istream& is) {
  TrialLog log;
  std::string line;
  if (!std::getline(is, line)) throw TraceError("empty trace");
  log.header = parse_header(line);

  while (std::getline(is, line)) {
    const bool last_without_newline = is.eof();
    if (line.empty()) continue;
    TickRecord r;
    try {
      r = parse_record(line);
    } catch (const json::exception& e) {
      if (last_without_newline) break;  // torn final write
      throw TraceError("malformed record after tick " + std::to_string(log.ticks.size()) + ": " +
                       e.what());
    }
    if (r.tick != log.ticks.size())
      throw TraceError("non-contiguous tick " + std::to_string(r.tick) + ", expected " +
                       std::to_string(log.ticks.size()));
    log.ticks.push_back(std::move(r));
  }
  return log;
}

TrialLog read_trace_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw TraceError("cannot open " + path.string());
  return read_trace(is);
}

Recorder::Recorder(SessionConfig cfg) : session_(std::move(cfg)) {
  log_.header = make_header(session_.config());
}

TickOutput Recorder::step(const AxesRecord& axes) {
  TickOutput out = session_.tick(axes);
  log_.ticks.push_back(make_record(axes, out, session_.state_hash()));
  return out;
}

ReplayResult replay(const TrialLog& log, const std::optional<SessionConfig>& config) {
  if (config && config_digest(*config) != log.header.config_digest)
    throw TraceError("replay config is incompatible with the trace header");
  Session session(config ? *config : log.header.config);
  for (const auto& r : log.ticks) {
    session.tick(r.axes);
    const std::uint64_t h = session.state_hash();
    if (h != r.digest) throw ReplayDivergence(r.tick, r.digest, h);
  }
  return ReplayResult{session.result(true), session.state_hash(), session.current_tick()};
}

double completion_time(const TrialLog& log) {
  std::optional<std::uint64_t> start;
  std::optional<std::uint64_t> done;
  int cuts = 0;
  for (const auto& r : log.ticks) {
    if (r.endo_moving && !start) start = r.tick;
    for (const auto& e : r.events) {
      if (e.kind == EventKind::TargetCut && ++cuts == static_cast<int>(kTargetCount)) done = r.tick;
    }
    if (done) break;
  }
  if (!start) throw NotCompleted("no endoscope motion in log");
  if (!done) throw NotCompleted("final target was not cut");
  return static_cast<double>(*done - *start) / log.header.tick_hz;
}

}  // namespace trilimb
