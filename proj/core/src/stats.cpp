/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "trilimb/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "trilimb/common.hpp"

namespace trilimb {

double sample_mean(std::span<const double> x) {
  if (x.empty()) throw InvalidSample("empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double mu = sample_mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

namespace {

/// Midranks (1-based) of `pooled`, plus the tie term sum(t^3 - t).
std::vector<double> midranks(const std::vector<double>& pooled, double& tie_term) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return pooled[i] < pooled[j]; });
  std::vector<double> rank(n);
  tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[idx[j + 1]] == pooled[idx[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  return rank;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

StatsResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InvalidSample("Mann-Whitney U needs two non-empty samples");
  for (auto s : {a, b})
    for (double v : s)
      if (!std::isfinite(v)) throw InvalidSample("sample contains a non-finite value");

  StatsResult r;
  r.n = a.size();
  r.m = b.size();
  r.mean_a = sample_mean(a);
  r.mean_b = sample_mean(b);
  r.sd_a = sample_sd(a);
  r.sd_b = sample_sd(b);

  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  double tie_term = 0.0;
  const auto rank = midranks(pooled, tie_term);
  const double n = static_cast<double>(r.n);
  const double m = static_cast<double>(r.m);
  const double offset = n * (n + 1.0) / 2.0;
  r.U = std::accumulate(rank.begin(), rank.begin() + static_cast<long>(r.n), 0.0) - offset;

  const std::size_t total = r.n + r.m;
  if (total <= kExactMaxTotal) {
    // Every assignment of n pooled ranks to the first group.
    std::vector<bool> pick(total, false);
    std::fill(pick.begin(), pick.begin() + static_cast<long>(r.n), true);
    std::size_t count = 0, low = 0, high = 0;
    constexpr double eps = 1e-9;
    do {
      double sum = 0.0;
      for (std::size_t i = 0; i < total; ++i)
        if (pick[i]) sum += rank[i];
      const double u = sum - offset;
      ++count;
      if (u <= r.U + eps) ++low;
      if (u >= r.U - eps) ++high;
    } while (std::prev_permutation(pick.begin(), pick.end()));
    const double tail = static_cast<double>(std::min(low, high)) / static_cast<double>(count);
    r.p_two_sided = std::min(1.0, 2.0 * tail);
    r.exact = true;
    return r;
  }

  const double N = n + m;
  const double mu = n * m / 2.0;
  const double var = n * m / 12.0 * ((N + 1.0) - tie_term / (N * (N - 1.0)));
  if (var <= 0.0) {
    r.p_two_sided = 1.0;
    return r;
  }
  const double u_big = std::max(r.U, n * m - r.U);
  const double z = (u_big - mu - 0.5) / std::sqrt(var);
  r.p_two_sided = std::clamp(2.0 * normal_sf(z), std::numeric_limits<double>::min(), 1.0);
  return r;
}

std::vector<TimeEntry> parse_times(std::istream& is) {
  std::vector<TimeEntry> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto c = line.find('#'); c != std::string::npos) line.erase(c);
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() > 2)
      throw InvalidSample("line " + std::to_string(lineno) + ": expected 'time' or 'subject time'");
    TimeEntry e;
    if (tok.size() == 2) e.subject = tok[0];
    std::size_t used = 0;
    try {
      e.time_s = std::stod(tok.back(), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.back().size() || !std::isfinite(e.time_s))
      throw InvalidSample("line " + std::to_string(lineno) + ": bad time '" + tok.back() + "'");
    out.push_back(std::move(e));
  }
  if (out.empty()) throw InvalidSample("no times found");
  return out;
}

std::vector<TimeEntry> read_times_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InvalidSample("cannot open " + path.string());
  return parse_times(is);
}

namespace {

std::vector<double> times_of(const std::vector<TimeEntry>& v) {
  std::vector<double> t;
  for (const auto& e : v) t.push_back(e.time_s);
  return t;
}

GroupSummary group(const std::vector<double>& t) {
  return {t.size(), sample_mean(t), sample_sd(t)};
}

std::map<std::string, std::vector<double>> by_subject(const std::vector<TimeEntry>& v) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& e : v)
    if (e.subject) out[*e.subject].push_back(e.time_s);
  return out;
}

}  // namespace

Summary summarize(const std::vector<TimeEntry>& three_limb, const std::vector<TimeEntry>& clutch) {
  Summary s;
  s.three_limb = group(times_of(three_limb));
  s.clutch = group(times_of(clutch));
  s.pooled_reduction_pct = 100.0 * (s.clutch.mean - s.three_limb.mean) / s.clutch.mean;
  s.pooled_speedup_pct = 100.0 * (s.clutch.mean - s.three_limb.mean) / s.three_limb.mean;

  const auto a = by_subject(three_limb);
  const auto b = by_subject(clutch);
  double red = 0.0, spd = 0.0;
  for (const auto& [id, ta] : a) {
    auto it = b.find(id);
    if (it == b.end()) continue;
    SubjectReduction r;
    r.subject = id;
    r.three_limb_mean = sample_mean(ta);
    r.clutch_mean = sample_mean(it->second);
    r.reduction_pct = 100.0 * (r.clutch_mean - r.three_limb_mean) / r.clutch_mean;
    r.speedup_pct = 100.0 * (r.clutch_mean - r.three_limb_mean) / r.three_limb_mean;
    red += r.reduction_pct;
    spd += r.speedup_pct;
    s.subjects.push_back(std::move(r));
  }
  if (!s.subjects.empty()) {
    const auto k = static_cast<double>(s.subjects.size());
    s.mean_subject_reduction_pct = red / k;
    s.mean_subject_speedup_pct = spd / k;
  }
  return s;
}

void write_summary_tsv(std::ostream& os, const Summary& s, const StatsResult& u) {
  os << "group\tn\tmean\tsd\n";
  os << "three-limb\t" << s.three_limb.n << '\t' << s.three_limb.mean << '\t' << s.three_limb.sd
     << '\n';
  os << "clutch\t" << s.clutch.n << '\t' << s.clutch.mean << '\t' << s.clutch.sd << '\n';
  os << "\nU\tp_two_sided\tmethod\n";
  os << u.U << '\t' << u.p_two_sided << '\t' << (u.exact ? "exact" : "normal") << '\n';
  os << "\naggregation\treduction_pct\tspeedup_pct\n";
  os << "pooled_means\t" << s.pooled_reduction_pct << '\t' << s.pooled_speedup_pct << '\n';
  if (s.mean_subject_reduction_pct)
    os << "mean_of_subjects\t" << *s.mean_subject_reduction_pct << '\t'
       << *s.mean_subject_speedup_pct << '\n';
  if (!s.subjects.empty()) {
    os << "\nsubject\tthree_limb_mean\tclutch_mean\treduction_pct\tspeedup_pct\n";
    for (const auto& r : s.subjects)
      os << r.subject << '\t' << r.three_limb_mean << '\t' << r.clutch_mean << '\t'
         << r.reduction_pct << '\t' << r.speedup_pct << '\n';
  }
}

}  // namespace trilimb
