/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include <gtest/gtest.h>

#include <cfloat>
#include <cstring>
#include <limits>
#include <random>

#include "trilimb/protocol.hpp"

namespace trilimb {
namespace {

using Bytes = std::vector<std::uint8_t>;

std::uint64_t read_le(const Bytes& b, std::size_t at, int n) {
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(b.at(at + i)) << (8 * i);
  return v;
}

double read_f64(const Bytes& b, std::size_t at) {
  const std::uint64_t bits = read_le(b, at, 8);
  double d;
  std::memcpy(&d, &bits, sizeof d);
  return d;
}

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double real() {
    switch (pick_(rng_)) {
      case 0: return 0.0;
      case 1: return -0.0;
      case 2: return DBL_MAX;
      case 3: return -DBL_MAX;
      case 4: return DBL_TRUE_MIN;
      case 5: return std::numeric_limits<double>::min();
      default: return wide_(rng_);
    }
  }
  std::uint64_t u64() { return rng_(); }
  bool coin() { return rng_() & 1; }
  std::uint8_t below(int n) { return static_cast<std::uint8_t>(rng_() % n); }

  ToolCommand tool(bool grip) {
    ToolCommand t{real(), real(), real(), real(), {}};
    if (grip) t.grip = real();
    return t;
  }
  TipPose pose() {
    TipPose p;
    p.position = Vec3(real(), real(), real());
    p.orientation = Quat(real(), real(), real(), real());
    return p;
  }
  InstrumentArmState arm() {
    InstrumentArmState a;
    a.kind = static_cast<ToolKind>(below(2));
    a.bend1_deg = real();
    a.bend2_deg = real();
    a.trans_mm = real();
    a.roll_deg = real();
    if (coin()) a.grip = real();
    return a;
  }

  MasterCommand master() {
    MasterCommand m;
    m.tick = u64();
    m.seq = u64();
    m.mode = static_cast<ControlMode>(below(2));
    m.endo_source = static_cast<EndoSource>(below(4));
    m.endo_vel = {real(), real(), real(), real()};
    m.left = tool(coin());
    m.right = tool(coin());
    m.cautery = coin();
    return m;
  }
  SlaveStateMsg slave() {
    SlaveStateMsg m;
    m.tick = u64();
    if (coin()) m.applied_seq = u64();
    auto& e = m.endoscope;
    e.ud_motor_deg = real();
    e.lr_motor_deg = real();
    e.theta_e_deg = real();
    e.phi_e_deg = real();
    e.y_e_mm = real();
    e.gamma_e_deg = real();
    e.backlash_ud = {real(), real()};
    e.backlash_lr = {real(), real()};
    m.arms = {arm(), arm()};
    m.tip_poses = {pose(), pose(), pose()};
    const int n = below(6);
    for (int i = 0; i < n; ++i)
      m.events.push_back({static_cast<EventKind>(1 + below(6)), below(5) == 4 ? kNoTarget : below(4)});
    return m;
  }
  AxesFrame axes() {
    AxesFrame f;
    f.frame = u64();
    for (auto& v : f.axes.v) v = real();
    return f;
  }
  SceneInfo scene() {
    SceneInfo s;
    s.mode = static_cast<ControlMode>(below(2));
    s.tick_hz = real();
    s.plane.center = Vec3(real(), real(), real());
    s.plane.u_axis = Vec3(real(), real(), real());
    s.plane.v_axis = Vec3(real(), real(), real());
    s.plane.normal = Vec3(real(), real(), real());
    s.plane.width_mm = real();
    s.plane.height_mm = real();
    for (auto& t : s.targets) {
      t.center = Vec3(real(), real(), real());
      t.kind = static_cast<TargetKind>(below(2));
      t.radius_mm = real();
      t.incision_len_mm = real();
      t.status = static_cast<TargetStatus>(below(4));
    }
    return s;
  }

 private:
  std::mt19937_64 rng_;
  std::uniform_int_distribution<int> pick_{0, 12};
  std::uniform_real_distribution<double> wide_{-1e6, 1e6};
};

template <class T>
void expect_bit_exact(const T& msg) {
  const Bytes bytes = encode(msg);
  const T back = decode_as<T>(bytes);
  ASSERT_EQ(encode(back), bytes);
}

bool same_scene(const SceneInfo& a, const SceneInfo& b) {
  if (a.mode != b.mode || a.tick_hz != b.tick_hz || a.plane.center != b.plane.center ||
      a.plane.u_axis != b.plane.u_axis || a.plane.v_axis != b.plane.v_axis ||
      a.plane.normal != b.plane.normal || a.plane.width_mm != b.plane.width_mm ||
      a.plane.height_mm != b.plane.height_mm)
    return false;
  for (std::size_t i = 0; i < kTargetCount; ++i) {
    const auto& s = a.targets[i];
    const auto& t = b.targets[i];
    if (s.center != t.center || s.kind != t.kind || s.radius_mm != t.radius_mm ||
        s.incision_len_mm != t.incision_len_mm || s.status != t.status)
      return false;
  }
  return true;
}

TEST(Codec, ZeroMasterCommandRoundTrips) {
  const MasterCommand m{};
  const Bytes b = encode(m);
  EXPECT_EQ(decode_as<MasterCommand>(b), m);
  expect_bit_exact(m);
}

TEST(Codec, HeaderLayout) {
  const Bytes b = encode(MasterCommand{});
  ASSERT_GE(b.size(), kWireHeaderSize);
  EXPECT_EQ(b[0], 'E');
  EXPECT_EQ(b[1], 'T');
  EXPECT_EQ(b[2], 'O');
  EXPECT_EQ(b[3], 'P');
  EXPECT_EQ(b[4], 0x01);
  EXPECT_EQ(b[5], 0x01);
  EXPECT_EQ(encode(SlaveStateMsg{})[5], 0x02);
  EXPECT_EQ(encode(AxesFrame{})[5], 0x03);
  EXPECT_EQ(encode(SceneInfo{})[5], 0x04);
}

TEST(Codec, FixedSizes) {
  EXPECT_EQ(encode(MasterCommand{}).size(), 139u);
  SlaveStateMsg s;
  EXPECT_EQ(encode(s).size(), 357u);
  s.events = {{EventKind::Grasped, 1}, {EventKind::MissCut, kNoTarget}};
  EXPECT_EQ(encode(s).size(), 361u);
  EXPECT_EQ(encode(AxesFrame{}).size(), 166u);
  EXPECT_EQ(encode(SceneInfo{}).size(), 295u);
}

TEST(Codec, MasterCommandFieldOffsets) {
  MasterCommand m;
  m.tick = 0x0102030405060708ULL;
  m.seq = 42;
  m.mode = ControlMode::HandClutch;
  m.endo_source = EndoSource::RightHand;
  m.endo_vel = {1.5, -2.5, 3.5, -4.5};
  m.left.bend1_deg = 83.0;
  m.left.grip = 0.25;
  m.right.trans_mm = -40.0;
  m.cautery = true;
  const Bytes b = encode(m);
  EXPECT_EQ(b[6], 0x08);
  EXPECT_EQ(b[13], 0x01);
  EXPECT_EQ(read_le(b, 6, 8), m.tick);
  EXPECT_EQ(read_le(b, 14, 8), 42u);
  EXPECT_EQ(b[22], 1);
  EXPECT_EQ(b[23], 3);
  EXPECT_EQ(read_f64(b, 24), 1.5);
  EXPECT_EQ(read_f64(b, 48), -4.5);
  // Left tool block starts at 56: bend1, bend2, trans, roll rate, has_grip, grip.
  EXPECT_EQ(read_f64(b, 56), 83.0);
  EXPECT_EQ(b[88], 1);
  EXPECT_EQ(read_f64(b, 89), 0.25);
  // Right tool block starts at 97.
  EXPECT_EQ(read_f64(b, 113), -40.0);
  EXPECT_EQ(b[129], 0);
  EXPECT_EQ(b[138], 1);
}

TEST(Codec, AxesFrameFieldOffsets) {
  AxesFrame f;
  f.frame = 7;
  f.axes[AxesRecord::kThetaF] = 0.5;
  f.axes[AxesRecord::kCautery] = 1.0;
  const Bytes b = encode(f);
  EXPECT_EQ(read_le(b, 6, 8), 7u);
  EXPECT_EQ(read_f64(b, 14), 0.5);
  EXPECT_EQ(read_f64(b, 14 + 8 * AxesRecord::kCautery), 1.0);
}

TEST(Codec, ExtremeSlaveStateRoundTrips) {
  SlaveStateMsg s;
  s.tick = std::numeric_limits<std::uint64_t>::max();
  s.applied_seq = 0;
  s.endoscope.theta_e_deg = DBL_MAX;
  s.endoscope.phi_e_deg = -DBL_MAX;
  s.endoscope.y_e_mm = DBL_TRUE_MIN;
  s.endoscope.gamma_e_deg = -0.0;
  s.arms[0].bend1_deg = 83.0;
  s.arms[0].grip = 1.0;
  s.arms[1].trans_mm = -40.0;
  s.events = {{EventKind::TargetCut, 3}, {EventKind::MissCut, kNoTarget}};
  EXPECT_EQ(decode_as<SlaveStateMsg>(encode(s)), s);
  expect_bit_exact(s);
}

TEST(Codec, RandomMessagesRoundTrip) {
  Gen g(20240601);
  for (int i = 0; i < 10000; ++i) {
    const auto m = g.master();
    ASSERT_EQ(decode_as<MasterCommand>(encode(m)), m);
    expect_bit_exact(m);
    const auto s = g.slave();
    ASSERT_EQ(decode_as<SlaveStateMsg>(encode(s)), s);
    expect_bit_exact(s);
    const auto a = g.axes();
    ASSERT_EQ(decode_as<AxesFrame>(encode(a)), a);
    const auto sc = g.scene();
    ASSERT_TRUE(same_scene(decode_as<SceneInfo>(encode(sc)), sc));
    expect_bit_exact(sc);
  }
}

TEST(Codec, VariantDispatch) {
  const Message m = AxesFrame{};
  EXPECT_TRUE(std::holds_alternative<AxesFrame>(decode(encode(m))));
  EXPECT_THROW(decode_as<MasterCommand>(encode(AxesFrame{})), CodecError);
}

std::size_t error_offset(const Bytes& b) {
  try {
    decode(b);
  } catch (const CodecError& e) {
    return e.offset();
  }
  ADD_FAILURE() << "decode accepted corrupt bytes";
  return SIZE_MAX;
}

TEST(CodecErrors, BadMagicAtOffsetZero) {
  Bytes b = encode(MasterCommand{});
  b[0] = 'X';
  EXPECT_EQ(error_offset(b), 0u);
  b = encode(MasterCommand{});
  b[2] = 0;
  EXPECT_EQ(error_offset(b), 2u);
}

TEST(CodecErrors, BadVersionAtOffsetFour) {
  Bytes b = encode(MasterCommand{});
  b[4] = 0x02;
  EXPECT_EQ(error_offset(b), 4u);
}

TEST(CodecErrors, UnknownTypeAtOffsetFive) {
  Bytes b = encode(MasterCommand{});
  b[5] = 0x09;
  EXPECT_EQ(error_offset(b), 5u);
}

TEST(CodecErrors, TruncationReportsLength) {
  const Bytes full = encode(SlaveStateMsg{});
  for (std::size_t n = 0; n < full.size(); ++n) {
    const Bytes cut(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(n));
    EXPECT_EQ(error_offset(cut), n) << n;
  }
}

TEST(CodecErrors, TrailingBytes) {
  Bytes b = encode(AxesFrame{});
  const auto n = b.size();
  b.push_back(0);
  EXPECT_EQ(error_offset(b), n);
}

TEST(CodecErrors, InvalidEnumAndBoolean) {
  Bytes b = encode(MasterCommand{});
  b[22] = 2;  // mode
  EXPECT_EQ(error_offset(b), 22u);
  b = encode(MasterCommand{});
  b[23] = 4;  // endo source
  EXPECT_EQ(error_offset(b), 23u);
  b = encode(MasterCommand{});
  b[138] = 2;  // cautery flag
  EXPECT_EQ(error_offset(b), 138u);
}

TEST(Framing, LengthPrefixIsLittleEndian) {
  const Bytes payload = encode(AxesFrame{});
  const Bytes f = frame(payload);
  ASSERT_EQ(f.size(), payload.size() + 4);
  EXPECT_EQ(read_le(f, 0, 4), payload.size());
  EXPECT_TRUE(std::equal(payload.begin(), payload.end(), f.begin() + 4));
}

TEST(Framing, ReaderReassemblesSplitStream) {
  std::vector<Bytes> payloads;
  Bytes stream;
  Gen g(5);
  for (int i = 0; i < 50; ++i) {
    payloads.push_back(encode(g.slave()));
    const Bytes f = frame(payloads.back());
    stream.insert(stream.end(), f.begin(), f.end());
  }
  std::mt19937_64 rng(6);
  FrameReader reader;
  std::vector<Bytes> got;
  std::size_t off = 0;
  while (off < stream.size()) {
    const std::size_t n = std::min<std::size_t>(1 + rng() % 97, stream.size() - off);
    reader.feed({stream.data() + off, n});
    off += n;
    while (auto p = reader.next()) got.push_back(*p);
  }
  EXPECT_EQ(got, payloads);
  EXPECT_EQ(reader.buffered(), 0u);
}

TEST(Framing, OversizeLengthRejected) {
  FrameReader reader;
  const std::uint32_t n = kMaxFrameBytes + 1;
  const Bytes hdr{static_cast<std::uint8_t>(n), static_cast<std::uint8_t>(n >> 8),
                  static_cast<std::uint8_t>(n >> 16), static_cast<std::uint8_t>(n >> 24)};
  reader.feed(hdr);
  EXPECT_THROW(reader.next(), CodecError);
  const Bytes big(kMaxFrameBytes + 1, 0);
  EXPECT_THROW(frame(big), CodecError);
}

}  // namespace
}  // namespace trilimb
