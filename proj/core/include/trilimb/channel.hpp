/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <random>
#include <vector>

#include "trilimb/common.hpp"

namespace trilimb {

struct ChannelConfig {
  std::uint32_t latency_ticks = 0;
  std::uint32_t jitter_ticks = 0;
  double drop_rate = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(drop_rate >= 0.0 && drop_rate < 1.0))
      throw InvalidInput("drop_rate must be in [0, 1)");
  }

  friend bool operator==(const ChannelConfig&, const ChannelConfig&) = default;
};

/// Tick-clocked lossy link. Each send draws exactly two numbers from the
/// seeded generator (drop, then jitter), so the schedule depends only on the
/// seed and the number of sends. Deliveries are FIFO: a message's due tick
/// is never earlier than that of the message sent before it.
template <class T>
class Channel {
 public:
  struct InFlight {
    std::uint64_t due_tick;
    T msg;
  };

  explicit Channel(ChannelConfig cfg) : cfg_(cfg), rng_(cfg.seed) { cfg_.validate(); }

  /// Returns false when the message was dropped.
  bool send(T msg, std::uint64_t now_tick) {
    const double u = static_cast<double>(draw() >> 11) * 0x1.0p-53;
    const std::uint64_t jitter = draw() % (static_cast<std::uint64_t>(cfg_.jitter_ticks) + 1);
    ++sent_;
    if (u < cfg_.drop_rate) {
      ++dropped_;
      return false;
    }
    const std::uint64_t due = std::max(now_tick + cfg_.latency_ticks + jitter, last_due_);
    last_due_ = due;
    queue_.push_back({due, std::move(msg)});
    return true;
  }

  /// Removes and returns every message due at or before `now_tick`, in send order.
  std::vector<T> poll(std::uint64_t now_tick) {
    std::vector<T> out;
    while (!queue_.empty() && queue_.front().due_tick <= now_tick) {
      out.push_back(std::move(queue_.front().msg));
      queue_.pop_front();
    }
    delivered_ += out.size();
    return out;
  }

  const ChannelConfig& config() const { return cfg_; }
  const std::deque<InFlight>& in_flight() const { return queue_; }
  std::uint64_t draws() const { return draws_; }
  std::uint64_t last_due_tick() const { return last_due_; }
  std::uint64_t sent() const { return sent_; }
  std::uint64_t dropped() const { return dropped_; }
  std::uint64_t delivered() const { return delivered_; }

 private:
  std::uint64_t draw() {
    ++draws_;
    return rng_();
  }

  ChannelConfig cfg_;
  std::mt19937_64 rng_;
  std::uint64_t draws_ = 0;
  std::uint64_t last_due_ = 0;
  std::uint64_t sent_ = 0;
  std::uint64_t dropped_ = 0;
  std::uint64_t delivered_ = 0;
  std::deque<InFlight> queue_;
};

}  // namespace trilimb
