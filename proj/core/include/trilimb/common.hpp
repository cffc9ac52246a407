/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace trilimb {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A slave-side command that cannot be applied (non-finite value, wrong layout).
class InvalidCommand : public Error {
 public:
  using Error::Error;
};

/// Master-side input rejected before a session tick mutates anything.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class DegenerateMarkers : public Error {
 public:
  using Error::Error;
};

class SceneError : public Error {
 public:
  using Error::Error;
};

class NotCompleted : public Error {
 public:
  using Error::Error;
};

class InvalidSweep : public Error {
 public:
  using Error::Error;
};

class InvalidSample : public Error {
 public:
  using Error::Error;
};

/// Malformed trace file or header/config mismatch.
class TraceError : public Error {
 public:
  using Error::Error;
};

class CodecError : public Error {
 public:
  CodecError(const std::string& what, std::size_t offset)
      : Error(what + " at byte " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class ReplayDivergence : public Error {
 public:
  ReplayDivergence(std::uint64_t tick, std::uint64_t expected, std::uint64_t actual);

  std::uint64_t tick() const noexcept { return tick_; }
  std::uint64_t expected() const noexcept { return expected_; }
  std::uint64_t actual() const noexcept { return actual_; }

 private:
  std::uint64_t tick_;
  std::uint64_t expected_;
  std::uint64_t actual_;
};

}  // namespace trilimb
