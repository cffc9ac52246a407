/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "trilimb/common.hpp"

namespace trilimb {

ReplayDivergence::ReplayDivergence(std::uint64_t tick, std::uint64_t expected,
                                   std::uint64_t actual)
    : Error("replay diverged at tick " + std::to_string(tick)),
      tick_(tick),
      expected_(expected),
      actual_(actual) {}

}  // namespace trilimb
