/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <iosfwd>
#include <vector>

#include "trilimb/common.hpp"

namespace trilimb {

struct HysteresisSample {
  double proximal_deg = 0.0;
  double distal_deg = 0.0;
};

struct HysteresisProfile {
  std::vector<HysteresisSample> samples;
  double half_width_deg = 0.0;
  double amplitude_deg = 0.0;
  int cycles = 0;
  double step_deg = 0.0;
};

/// Triangular proximal sweep 0 -> +A -> -A -> 0 per cycle in increments of
/// `step_deg`, passed through the play operator (unit gain). Throws
/// InvalidSweep on A <= 0, step <= 0, cycles < 1 or w < 0.
HysteresisProfile hysteresis_sweep(double half_width_deg, double amplitude_deg, int cycles,
                                   double step_deg = 1.0);

/// Mean proximal span, over all direction reversals, from the reversal point
/// to the last sample at which the distal output is still stationary. 2w for
/// the play operator, up to the step resolution.
double dead_zone_width(const HysteresisProfile& profile);

/// Tab-separated `proximal_deg<TAB>distal_deg` with a header row.
void write_profile_tsv(std::ostream& os, const HysteresisProfile& profile);

}  // namespace trilimb
