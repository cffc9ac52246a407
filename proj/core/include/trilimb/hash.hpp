/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string_view>

namespace trilimb {

/// 64-bit FNV-1a over a canonical little-endian byte stream.
///
/// Every multi-byte value is fed least-significant byte first and doubles are
/// fed by bit pattern, so the digest does not depend on host endianness.
class StateHasher {
 public:
  static constexpr std::uint64_t kOffsetBasis = 0xcbf29ce484222325ULL;
  static constexpr std::uint64_t kPrime = 0x100000001b3ULL;

  void byte(std::uint8_t b) {
    h_ ^= b;
    h_ *= kPrime;
  }

  void bytes(std::span<const std::uint8_t> data) {
    for (auto b : data) byte(b);
  }

  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) byte(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) byte(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void boolean(bool v) { byte(v ? 1 : 0); }

  void str(std::string_view s) {
    u64(s.size());
    for (char c : s) byte(static_cast<std::uint8_t>(c));
  }

  std::uint64_t digest() const { return h_; }

 private:
  std::uint64_t h_ = kOffsetBasis;
};

}  // namespace trilimb
