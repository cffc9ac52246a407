/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "trilimb/hysteresis.hpp"

namespace trilimb {
namespace {

TEST(Hysteresis, NoPlayNoDeadZone) {
  EXPECT_EQ(dead_zone_width(hysteresis_sweep(0.0, 60.0, 2)), 0.0);
}

TEST(Hysteresis, DeadZoneIsTwiceHalfWidth) {
  const auto prof = hysteresis_sweep(22.5, 60.0, 2);
  EXPECT_NEAR(dead_zone_width(prof), 45.0, 0.5);
}

TEST(Hysteresis, HalfWidthInsideObservedBand) {
  const auto prof = hysteresis_sweep(22.5, 60.0, 2);
  const double half = dead_zone_width(prof) / 2.0;
  EXPECT_GE(half, 20.0);
  EXPECT_LE(half, 25.0);
}

TEST(Hysteresis, SweepShape) {
  const auto prof = hysteresis_sweep(22.5, 60.0, 2, 1.0);
  // 0 -> 60 -> -60 -> 0 per cycle in 1 degree steps, plus the start sample.
  EXPECT_EQ(prof.samples.size(), 1u + 2u * 240u);
  EXPECT_EQ(prof.samples.front().proximal_deg, 0.0);
  EXPECT_EQ(prof.samples.back().proximal_deg, 0.0);
  for (const auto& s : prof.samples) EXPECT_LE(std::abs(s.distal_deg - s.proximal_deg), 22.5);
}

TEST(Hysteresis, RateIndependentUnderStepRefinement) {
  for (double w : {5.0, 12.5, 22.5, 30.0}) {
    for (double step : {2.0, 1.0, 0.5, 0.3}) {
      const double coarse = dead_zone_width(hysteresis_sweep(w, 60.0, 2, step));
      const double fine = dead_zone_width(hysteresis_sweep(w, 60.0, 2, step / 2.0));
      EXPECT_LT(std::abs(coarse - fine), step) << w << ' ' << step;
      EXPECT_NEAR(fine, 2.0 * w, step);
    }
  }
}

TEST(Hysteresis, InvalidArguments) {
  EXPECT_THROW(hysteresis_sweep(22.5, 0.0, 2), InvalidSweep);
  EXPECT_THROW(hysteresis_sweep(22.5, -5.0, 2), InvalidSweep);
  EXPECT_THROW(hysteresis_sweep(22.5, 60.0, 0), InvalidSweep);
  EXPECT_THROW(hysteresis_sweep(22.5, 60.0, 2, 0.0), InvalidSweep);
  EXPECT_THROW(hysteresis_sweep(-1.0, 60.0, 2), InvalidSweep);
}

TEST(Hysteresis, ProfileTsv) {
  const auto prof = hysteresis_sweep(22.5, 2.0, 1, 1.0);
  std::ostringstream os;
  write_profile_tsv(os, prof);
  const std::string text = os.str();
  EXPECT_EQ(text.substr(0, 24), "proximal_deg\tdistal_deg\n");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'),
            static_cast<long>(prof.samples.size()) + 1);
}

}  // namespace
}  // namespace trilimb
