/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include <gtest/gtest.h>

#include <bit>
#include <nlohmann/json.hpp>
#include <random>

#include "trilimb/session.hpp"

namespace trilimb {
namespace {

AxesRecord random_axes(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::bernoulli_distribution press(0.05);
  AxesRecord a;
  for (auto& v : a.v) v = u(rng);
  for (auto b : {AxesRecord::kLBtnUpper, AxesRecord::kLBtnLower, AxesRecord::kRBtnUpper,
                 AxesRecord::kRBtnLower, AxesRecord::kCautery})
    a[b] = press(rng) ? 1.0 : 0.0;
  return a;
}

std::vector<std::uint64_t> run_hashes(const SessionConfig& cfg, std::uint64_t input_seed, int n) {
  Session s(cfg);
  std::mt19937_64 rng(input_seed);
  std::vector<std::uint64_t> out;
  for (int i = 0; i < n; ++i) {
    s.tick(random_axes(rng));
    out.push_back(s.state_hash());
  }
  return out;
}

TEST(Session, ZeroAxesKeepSlaveAndWorldConstant) {
  Session s(SessionConfig{});
  const auto endo = s.endoscope();
  const auto left = s.arm(Hand::Left);
  const auto right = s.arm(Hand::Right);
  for (int i = 0; i < 500; ++i) {
    const auto out = s.tick(AxesRecord{});
    EXPECT_TRUE(out.events.empty());
    EXPECT_FALSE(out.endo_moving);
  }
  EXPECT_EQ(s.endoscope(), endo);
  EXPECT_EQ(s.arm(Hand::Left), left);
  EXPECT_EQ(s.arm(Hand::Right), right);
  const auto r = s.result();
  EXPECT_EQ(r.failures, 0u);
  for (const auto& t : r.targets) EXPECT_EQ(t.status, TargetStatus::Pending);
  EXPECT_FALSE(s.world().motion_start_tick.has_value());
}

TEST(Session, FreshSessionsHashEqual) {
  EXPECT_EQ(Session(SessionConfig{}).state_hash(), Session(SessionConfig{}).state_hash());
  EXPECT_EQ(state_hash(Session(SessionConfig{})), Session(SessionConfig{}).state_hash());
}

TEST(Session, SingleBitFlipOfInsertionChangesHash) {
  Session a(SessionConfig{});
  Session b(SessionConfig{});
  EndoscopeState e = b.endoscope();
  e.y_e_mm = std::bit_cast<double>(std::bit_cast<std::uint64_t>(e.y_e_mm) ^ 1u);
  b.set_endoscope_state(e);
  EXPECT_NE(a.state_hash(), b.state_hash());
}

TEST(Session, DeterministicPerTickHashes) {
  SessionConfig cfg;
  cfg.latency_ticks = 2;
  cfg.jitter_ticks = 3;
  cfg.drop_rate = 0.1;
  cfg.seed = 99;
  EXPECT_EQ(run_hashes(cfg, 1, 2000), run_hashes(cfg, 1, 2000));
  cfg.mode = ControlMode::HandClutch;
  EXPECT_EQ(run_hashes(cfg, 2, 2000), run_hashes(cfg, 2, 2000));
}

TEST(Session, SeedChangesHashFromFirstTick) {
  SessionConfig a;
  a.drop_rate = 0.1;
  SessionConfig b = a;
  b.seed = 1;
  EXPECT_NE(run_hashes(a, 3, 1)[0], run_hashes(b, 3, 1)[0]);
}

TEST(Session, NonFiniteAxesRejectedWithoutStateChange) {
  Session s(SessionConfig{});
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) s.tick(random_axes(rng));
  const auto before = s.state_hash();
  const auto tick = s.current_tick();
  AxesRecord bad = random_axes(rng);
  bad[AxesRecord::kRz] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(s.tick(bad), InvalidInput);
  bad[AxesRecord::kRz] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(s.tick(bad), InvalidInput);
  EXPECT_EQ(s.state_hash(), before);
  EXPECT_EQ(s.current_tick(), tick);
}

TEST(Session, SequenceNumbersStrictlyIncrease) {
  SessionConfig cfg;
  cfg.latency_ticks = 1;
  cfg.jitter_ticks = 4;
  cfg.drop_rate = 0.2;
  cfg.seed = 8;
  Session s(cfg);
  std::mt19937_64 rng(8);
  std::uint64_t prev_sent = 0;
  std::optional<std::uint64_t> prev_applied;
  for (int i = 0; i < 3000; ++i) {
    const auto out = s.tick(random_axes(rng));
    EXPECT_GT(out.sent.seq, prev_sent);
    prev_sent = out.sent.seq;
    if (prev_applied) ASSERT_GE(out.applied_seq.value(), *prev_applied);
    if (out.applied_seq) prev_applied = out.applied_seq;
  }
}

TEST(Session, FootDrivesEndoscopeInThreeLimb) {
  Session s(SessionConfig{});
  AxesRecord a;
  a[AxesRecord::kYF] = 1.0;
  const auto out = s.tick(a);
  EXPECT_TRUE(out.endo_moving);
  EXPECT_DOUBLE_EQ(s.endoscope().y_e_mm, 0.2);
  EXPECT_EQ(s.world().motion_start_tick, 0u);
}

TEST(Session, ClutchIgnoresFoot) {
  SessionConfig cfg;
  cfg.mode = ControlMode::HandClutch;
  Session s(cfg);
  AxesRecord a;
  a[AxesRecord::kYF] = 1.0;
  s.tick(a);
  EXPECT_EQ(s.endoscope().y_e_mm, 0.0);
  a[AxesRecord::kRx] = 1.0;
  s.tick(a);
  EXPECT_DOUBLE_EQ(s.endoscope().y_e_mm, 0.2);
}

TEST(Session, LatencyDelaysApplication) {
  SessionConfig cfg;
  cfg.latency_ticks = 3;
  Session s(cfg);
  AxesRecord a;
  a[AxesRecord::kYF] = 1.0;
  for (int i = 0; i < 3; ++i) {
    const auto out = s.tick(a);
    EXPECT_FALSE(out.applied_seq.has_value());
    EXPECT_FALSE(out.feedback.has_value());
  }
  const auto out = s.tick(a);
  EXPECT_EQ(out.applied_seq, 1u);
  ASSERT_TRUE(out.feedback.has_value());
  EXPECT_EQ(out.feedback->tick, 0u);
}

TEST(Session, ToolBasesStraddleScopeTip) {
  Session s(SessionConfig{});
  const auto tip = endoscope_fk(s.endoscope(), 100.0);
  EXPECT_NEAR((s.tool_base(Hand::Left).position - tip.position).norm(), 3.5, 1e-12);
  EXPECT_NEAR((s.tool_base(Hand::Left).position + s.tool_base(Hand::Right).position -
               2.0 * tip.position).norm(),
              0.0, 1e-12);
}

TEST(Config, JsonRoundTripPreservesDigest) {
  SessionConfig cfg;
  cfg.mode = ControlMode::HandClutch;
  cfg.clutch_hand = Hand::Left;
  cfg.latency_ticks = 4;
  cfg.drop_rate = 0.05;
  cfg.rates.max_bend_rate = 45.0;
  cfg.seed = 123;
  const auto back = config_from_json(config_to_json(cfg));
  EXPECT_EQ(config_digest(back), config_digest(cfg));
  EXPECT_EQ(back.seed, 123u);
  EXPECT_EQ(back.mode, ControlMode::HandClutch);
  EXPECT_EQ(back.clutch_hand, Hand::Left);
}

TEST(Config, DigestIgnoresSeedOnly) {
  SessionConfig a;
  SessionConfig b;
  b.seed = 77;
  EXPECT_EQ(config_digest(a), config_digest(b));
  b.latency_ticks = 1;
  EXPECT_NE(config_digest(a), config_digest(b));
}

TEST(Config, PartialJsonUsesDefaults) {
  const auto cfg = config_from_json(nlohmann::json{{"link", {{"latency_ticks", 2}}}});
  EXPECT_EQ(cfg.latency_ticks, 2u);
  EXPECT_EQ(cfg.tick_hz, 100.0);
}

TEST(Config, InvalidValuesRejected) {
  EXPECT_THROW(config_from_json(nlohmann::json{{"tick_hz", -1}}), InvalidInput);
  EXPECT_THROW(config_from_json(nlohmann::json{{"link", {{"drop_rate", 1.5}}}}), InvalidInput);
  EXPECT_THROW(config_from_json(nlohmann::json{{"mode", "both"}}), InvalidInput);
  EXPECT_THROW(config_from_json(nlohmann::json{{"tick_hz", "fast"}}), InvalidInput);
}

TEST(Config, ModeNames) {
  EXPECT_STREQ(to_string(ControlMode::ThreeLimb), "three-limb");
  EXPECT_STREQ(to_string(ControlMode::HandClutch), "clutch");
  EXPECT_EQ(control_mode_from("clutch"), ControlMode::HandClutch);
  EXPECT_THROW(control_mode_from("x"), InvalidInput);
}

}  // namespace
}  // namespace trilimb
