/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trilimb/common.hpp"

namespace trilimb {

inline constexpr std::size_t kExactMaxTotal = 14;

struct StatsResult {
  /// U of the first sample: pairs with a > b, ties counted one half.
  double U = 0.0;
  double p_two_sided = 1.0;
  std::size_t n = 0;
  std::size_t m = 0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double sd_a = 0.0;
  double sd_b = 0.0;
  /// True when p came from full enumeration rather than the normal approximation.
  bool exact = false;
};

/// Two-sided Mann-Whitney U test with midranks. Exact when n + m <= 14,
/// otherwise normal approximation with tie and continuity correction.
/// Throws InvalidSample on an empty or non-finite sample.
StatsResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

double sample_mean(std::span<const double> x);
/// n - 1 denominator; 0 for a single value.
double sample_sd(std::span<const double> x);

/// One completion time, optionally tagged with a subject id.
struct TimeEntry {
  std::optional<std::string> subject;
  double time_s = 0.0;
};

/// Lines hold `time` or `subject time`; `#` starts a comment. Throws
/// InvalidSample on a malformed line or an empty file.
std::vector<TimeEntry> parse_times(std::istream& is);
std::vector<TimeEntry> read_times_file(const std::filesystem::path& path);

struct GroupSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
};

struct SubjectReduction {
  std::string subject;
  double three_limb_mean = 0.0;
  double clutch_mean = 0.0;
  /// (clutch - three_limb) / clutch, percent.
  double reduction_pct = 0.0;
  /// (clutch - three_limb) / three_limb, percent.
  double speedup_pct = 0.0;
};

/// Both percentage conventions, aggregated three ways.
struct Summary {
  GroupSummary three_limb;
  GroupSummary clutch;
  double pooled_reduction_pct = 0.0;
  double pooled_speedup_pct = 0.0;
  std::vector<SubjectReduction> subjects;
  std::optional<double> mean_subject_reduction_pct;
  std::optional<double> mean_subject_speedup_pct;
};

/// Per-subject figures cover the subjects present in both groups.
Summary summarize(const std::vector<TimeEntry>& three_limb, const std::vector<TimeEntry>& clutch);

/// Tab-separated report of a summary and its U test.
void write_summary_tsv(std::ostream& os, const Summary& s, const StatsResult& u);

}  // namespace trilimb
