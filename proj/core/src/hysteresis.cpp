/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "trilimb/hysteresis.hpp"

#include <cmath>
#include <ostream>

#include "trilimb/slave_model.hpp"

namespace trilimb {

HysteresisProfile hysteresis_sweep(double w, double amplitude, int cycles, double step) {
  if (!std::isfinite(amplitude) || amplitude <= 0.0) throw InvalidSweep("amplitude must be > 0");
  if (!std::isfinite(step) || step <= 0.0) throw InvalidSweep("step must be > 0");
  if (cycles < 1) throw InvalidSweep("cycles must be >= 1");
  if (!std::isfinite(w) || w < 0.0) throw InvalidSweep("half-width must be >= 0");

  HysteresisProfile prof;
  prof.half_width_deg = w;
  prof.amplitude_deg = amplitude;
  prof.cycles = cycles;
  prof.step_deg = step;
  BacklashModel model{w, 0.0};
  double p = 0.0;
  auto push = [&](double input) {
    const auto s = apply_backlash(model, input);
    model = s.model;
    prof.samples.push_back({input, s.output_deg});
  };
  push(p);

  const double legs[] = {amplitude, -amplitude, 0.0};
  for (int c = 0; c < cycles; ++c) {
    for (double goal : legs) {
      const double dir = goal > p ? 1.0 : -1.0;
      // Integer step count so long sweeps do not accumulate rounding.
      const double from = p;
      const auto n = static_cast<long>(std::ceil(std::abs(goal - from) / step - 1e-9));
      for (long k = 1; k <= n; ++k) {
        p = k == n ? goal : from + dir * step * static_cast<double>(k);
        push(p);
      }
    }
  }
  return prof;
}

double dead_zone_width(const HysteresisProfile& prof) {
  const auto& s = prof.samples;
  double total = 0.0;
  int reversals = 0;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double before = s[i].proximal_deg - s[i - 1].proximal_deg;
    const double after = s[i + 1].proximal_deg - s[i].proximal_deg;
    if (before * after >= 0.0) continue;
    std::size_t j = i;
    while (j + 1 < s.size() && s[j + 1].distal_deg == s[i].distal_deg &&
           (s[j + 1].proximal_deg - s[j].proximal_deg) * after > 0.0)
      ++j;
    total += std::abs(s[j].proximal_deg - s[i].proximal_deg);
    ++reversals;
  }
  return reversals == 0 ? 0.0 : total / reversals;
}

void write_profile_tsv(std::ostream& os, const HysteresisProfile& prof) {
  os << "proximal_deg\tdistal_deg\n";
  for (const auto& x : prof.samples) os << x.proximal_deg << '\t' << x.distal_deg << '\n';
}

}  // namespace trilimb
