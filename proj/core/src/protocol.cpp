/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "trilimb/protocol.hpp"

#include <algorithm>
#include <bit>
#include <limits>

namespace trilimb {

namespace {

class Writer {
 public:
  explicit Writer(MessageType type) {
    out_.insert(out_.end(), kWireMagic.begin(), kWireMagic.end());
    out_.push_back(kWireVersion);
    out_.push_back(static_cast<std::uint8_t>(type));
  }

  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void boolean(bool v) { u8(v ? 1 : 0); }
  void vec3(const Vec3& v) {
    f64(v.x());
    f64(v.y());
    f64(v.z());
  }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, std::size_t start) : in_(bytes), pos_(start) {}

  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }
  bool boolean() {
    const std::size_t at = pos_;
    const auto b = u8();
    if (b > 1) throw CodecError("boolean byte out of range", at);
    return b == 1;
  }
  Vec3 vec3() {
    const double x = f64();
    const double y = f64();
    const double z = f64();
    return {x, y, z};
  }
  template <class E>
  E enumeration(std::uint8_t lo, std::uint8_t hi, const char* what) {
    const std::size_t at = pos_;
    const auto b = u8();
    if (b < lo || b > hi) throw CodecError(std::string("invalid ") + what, at);
    return static_cast<E>(b);
  }

  std::size_t pos() const { return pos_; }
  void finish() const {
    if (pos_ != in_.size()) throw CodecError("trailing bytes", pos_);
  }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw CodecError("truncated message", in_.size());
  }
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_;
};

void put_tool(Writer& w, const ToolCommand& t) {
  w.f64(t.bend1_deg);
  w.f64(t.bend2_deg);
  w.f64(t.trans_mm);
  w.f64(t.roll_rate_dps);
  w.boolean(t.grip.has_value());
  w.f64(t.grip.value_or(0.0));
}

ToolCommand get_tool(Reader& r) {
  ToolCommand t;
  t.bend1_deg = r.f64();
  t.bend2_deg = r.f64();
  t.trans_mm = r.f64();
  t.roll_rate_dps = r.f64();
  const bool has_grip = r.boolean();
  const double grip = r.f64();
  if (has_grip) t.grip = grip;
  return t;
}

void put_backlash(Writer& w, const BacklashModel& b) {
  w.f64(b.half_width_deg);
  w.f64(b.play_state_deg);
}

BacklashModel get_backlash(Reader& r) {
  BacklashModel b;
  b.half_width_deg = r.f64();
  b.play_state_deg = r.f64();
  return b;
}

void put_arm(Writer& w, const InstrumentArmState& a) {
  w.u8(static_cast<std::uint8_t>(a.kind));
  w.f64(a.bend1_deg);
  w.f64(a.bend2_deg);
  w.f64(a.trans_mm);
  w.f64(a.roll_deg);
  w.boolean(a.grip.has_value());
  w.f64(a.grip.value_or(0.0));
}

InstrumentArmState get_arm(Reader& r) {
  InstrumentArmState a;
  a.kind = r.enumeration<ToolKind>(0, 1, "tool kind");
  a.bend1_deg = r.f64();
  a.bend2_deg = r.f64();
  a.trans_mm = r.f64();
  a.roll_deg = r.f64();
  const bool has_grip = r.boolean();
  const double grip = r.f64();
  if (has_grip) a.grip = grip;
  return a;
}

void put_pose(Writer& w, const TipPose& p) {
  w.vec3(p.position);
  w.f64(p.orientation.w());
  w.f64(p.orientation.x());
  w.f64(p.orientation.y());
  w.f64(p.orientation.z());
}

TipPose get_pose(Reader& r) {
  TipPose p;
  p.position = r.vec3();
  const double qw = r.f64();
  const double qx = r.f64();
  const double qy = r.f64();
  const double qz = r.f64();
  p.orientation = Quat(qw, qx, qy, qz);
  return p;
}

MasterCommand get_master_command(Reader& r) {
  MasterCommand m;
  m.tick = r.u64();
  m.seq = r.u64();
  m.mode = r.enumeration<ControlMode>(0, 1, "control mode");
  m.endo_source = r.enumeration<EndoSource>(0, 3, "endoscope source");
  m.endo_vel.theta_dps = r.f64();
  m.endo_vel.phi_dps = r.f64();
  m.endo_vel.y_mmps = r.f64();
  m.endo_vel.gamma_dps = r.f64();
  m.left = get_tool(r);
  m.right = get_tool(r);
  m.cautery = r.boolean();
  return m;
}

SlaveStateMsg get_slave_state(Reader& r) {
  SlaveStateMsg m;
  m.tick = r.u64();
  const bool has_seq = r.boolean();
  const auto seq = r.u64();
  if (has_seq) m.applied_seq = seq;
  auto& e = m.endoscope;
  e.ud_motor_deg = r.f64();
  e.lr_motor_deg = r.f64();
  e.theta_e_deg = r.f64();
  e.phi_e_deg = r.f64();
  e.y_e_mm = r.f64();
  e.gamma_e_deg = r.f64();
  e.backlash_ud = get_backlash(r);
  e.backlash_lr = get_backlash(r);
  for (auto& a : m.arms) a = get_arm(r);
  for (auto& p : m.tip_poses) p = get_pose(r);
  const auto n = r.u16();
  m.events.reserve(n);
  for (std::uint16_t i = 0; i < n; ++i) {
    TaskEvent ev;
    ev.kind = r.enumeration<EventKind>(1, 6, "event kind");
    ev.target = r.u8();
    m.events.push_back(ev);
  }
  return m;
}

AxesFrame get_axes_frame(Reader& r) {
  AxesFrame f;
  f.frame = r.u64();
  for (auto& v : f.axes.v) v = r.f64();
  return f;
}

SceneInfo get_scene_info(Reader& r) {
  SceneInfo s;
  s.mode = r.enumeration<ControlMode>(0, 1, "control mode");
  s.tick_hz = r.f64();
  s.plane.center = r.vec3();
  s.plane.u_axis = r.vec3();
  s.plane.v_axis = r.vec3();
  s.plane.normal = r.vec3();
  s.plane.width_mm = r.f64();
  s.plane.height_mm = r.f64();
  for (auto& t : s.targets) {
    t.center = r.vec3();
    t.kind = r.enumeration<TargetKind>(0, 1, "target kind");
    t.radius_mm = r.f64();
    t.incision_len_mm = r.f64();
    t.status = r.enumeration<TargetStatus>(0, 3, "target status");
  }
  return s;
}

}  // namespace

bool operator==(const SlaveStateMsg& a, const SlaveStateMsg& b) {
  auto same_pose = [](const TipPose& p, const TipPose& q) {
    return p.position == q.position && p.orientation.coeffs() == q.orientation.coeffs();
  };
  return a.tick == b.tick && a.applied_seq == b.applied_seq && a.endoscope == b.endoscope &&
         a.arms == b.arms && a.events == b.events &&
         std::equal(a.tip_poses.begin(), a.tip_poses.end(), b.tip_poses.begin(), same_pose);
}

std::vector<std::uint8_t> encode(const MasterCommand& m) {
  Writer w(MessageType::MasterCommand);
  w.u64(m.tick);
  w.u64(m.seq);
  w.u8(static_cast<std::uint8_t>(m.mode));
  w.u8(static_cast<std::uint8_t>(m.endo_source));
  w.f64(m.endo_vel.theta_dps);
  w.f64(m.endo_vel.phi_dps);
  w.f64(m.endo_vel.y_mmps);
  w.f64(m.endo_vel.gamma_dps);
  put_tool(w, m.left);
  put_tool(w, m.right);
  w.boolean(m.cautery);
  return w.take();
}

std::vector<std::uint8_t> encode(const SlaveStateMsg& m) {
  if (m.events.size() > std::numeric_limits<std::uint16_t>::max())
    throw CodecError("too many events", 0);
  Writer w(MessageType::SlaveState);
  w.u64(m.tick);
  w.boolean(m.applied_seq.has_value());
  w.u64(m.applied_seq.value_or(0));
  const auto& e = m.endoscope;
  w.f64(e.ud_motor_deg);
  w.f64(e.lr_motor_deg);
  w.f64(e.theta_e_deg);
  w.f64(e.phi_e_deg);
  w.f64(e.y_e_mm);
  w.f64(e.gamma_e_deg);
  put_backlash(w, e.backlash_ud);
  put_backlash(w, e.backlash_lr);
  for (const auto& a : m.arms) put_arm(w, a);
  for (const auto& p : m.tip_poses) put_pose(w, p);
  w.u16(static_cast<std::uint16_t>(m.events.size()));
  for (const auto& ev : m.events) {
    w.u8(static_cast<std::uint8_t>(ev.kind));
    w.u8(ev.target);
  }
  return w.take();
}

std::vector<std::uint8_t> encode(const AxesFrame& f) {
  Writer w(MessageType::AxesFrame);
  w.u64(f.frame);
  for (double v : f.axes.v) w.f64(v);
  return w.take();
}

std::vector<std::uint8_t> encode(const SceneInfo& s) {
  Writer w(MessageType::SceneInfo);
  w.u8(static_cast<std::uint8_t>(s.mode));
  w.f64(s.tick_hz);
  w.vec3(s.plane.center);
  w.vec3(s.plane.u_axis);
  w.vec3(s.plane.v_axis);
  w.vec3(s.plane.normal);
  w.f64(s.plane.width_mm);
  w.f64(s.plane.height_mm);
  for (const auto& t : s.targets) {
    w.vec3(t.center);
    w.u8(static_cast<std::uint8_t>(t.kind));
    w.f64(t.radius_mm);
    w.f64(t.incision_len_mm);
    w.u8(static_cast<std::uint8_t>(t.status));
  }
  return w.take();
}

std::vector<std::uint8_t> encode(const Message& msg) {
  return std::visit([](const auto& m) { return encode(m); }, msg);
}

Message decode(std::span<const std::uint8_t> bytes) {
  for (std::size_t i = 0; i < kWireMagic.size(); ++i) {
    if (i >= bytes.size()) throw CodecError("truncated header", bytes.size());
    if (bytes[i] != kWireMagic[i]) throw CodecError("bad magic", i);
  }
  if (bytes.size() < 5) throw CodecError("truncated header", bytes.size());
  if (bytes[4] != kWireVersion) throw CodecError("unsupported version", 4);
  if (bytes.size() < kWireHeaderSize) throw CodecError("truncated header", bytes.size());

  Reader r(bytes, kWireHeaderSize);
  auto run = [&](auto&& body) -> Message {
    Message m = body(r);
    r.finish();
    return m;
  };
  switch (bytes[5]) {
    case 0x01: return run([](Reader& rd) -> Message { return get_master_command(rd); });
    case 0x02: return run([](Reader& rd) -> Message { return get_slave_state(rd); });
    case 0x03: return run([](Reader& rd) -> Message { return get_axes_frame(rd); });
    case 0x04: return run([](Reader& rd) -> Message { return get_scene_info(rd); });
    default: throw CodecError("unknown message type", 5);
  }
}

std::vector<std::uint8_t> frame(std::span<const std::uint8_t> payload) {
  if (payload.size() > kMaxFrameBytes) throw CodecError("frame too large", 0);
  std::vector<std::uint8_t> out;
  out.reserve(payload.size() + 4);
  const auto n = static_cast<std::uint32_t>(payload.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

void FrameReader::feed(std::span<const std::uint8_t> bytes) {
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

std::optional<std::vector<std::uint8_t>> FrameReader::next() {
  if (buf_.size() < 4) return std::nullopt;
  std::uint32_t n = 0;
  for (int i = 0; i < 4; ++i) n |= static_cast<std::uint32_t>(buf_[i]) << (8 * i);
  if (n > kMaxFrameBytes) throw CodecError("frame length exceeds limit", 0);
  if (buf_.size() < 4 + static_cast<std::size_t>(n)) return std::nullopt;
  std::vector<std::uint8_t> payload(buf_.begin() + 4, buf_.begin() + 4 + n);
  buf_.erase(buf_.begin(), buf_.begin() + 4 + n);
  return payload;
}

}  // namespace trilimb
