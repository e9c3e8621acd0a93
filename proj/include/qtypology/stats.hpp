#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "qtypology/error.hpp"

namespace qtypology {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool exact = false;
  std::size_t n = 0;  // effective sample size
};

// Midranks (1-based) of `v`; `tie_sizes` receives the size of every tie group.
inline std::vector<double> average_ranks(const std::vector<double>& v, std::vector<std::size_t>* tie_sizes = nullptr) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) r[idx[t]] = mid;
    if (tie_sizes) tie_sizes->push_back(j - i + 1);
    i = j + 1;
  }
  return r;
}

inline double normal_two_sided(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

inline double median(std::vector<double> v) {
  if (v.empty()) throw Error(ErrorKind::kDegenerate, "median of an empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : (v[h - 1] + v[h]) / 2.0;
}

enum class ZeroMethod { kWilcoxon, kPratt };

inline constexpr std::size_t kWilcoxonExactMax = 25;

// Two-sided Wilcoxon signed-rank test on after - before. The statistic is
// min(W+, W-). Zero differences are dropped (kWilcoxon) or ranked and then
// discarded (kPratt). Exact null distribution for n <= 25 nonzero pairs,
// else normal approximation with tie correction.
inline TestResult wilcoxon_signed_rank(const std::vector<double>& before, const std::vector<double>& after,
                                       ZeroMethod zeros = ZeroMethod::kWilcoxon) {
  if (before.size() != after.size()) throw Error(ErrorKind::kValidation, "paired samples differ in length");
  std::vector<double> d;
  for (std::size_t i = 0; i < before.size(); ++i) {
    const double x = after[i] - before[i];
    if (x != 0.0 || zeros == ZeroMethod::kPratt) d.push_back(x);
  }
  const auto nonzero = static_cast<std::size_t>(std::count_if(d.begin(), d.end(), [](double x) { return x != 0.0; }));
  if (nonzero == 0) throw Error(ErrorKind::kDegenerate, "all paired differences are zero");

  std::vector<double> absd(d.size());
  std::transform(d.begin(), d.end(), absd.begin(), [](double x) { return std::abs(x); });
  std::vector<std::size_t> ties;
  const auto ranks = average_ranks(absd, &ties);

  // Doubled ranks are integers, which keeps the exact distribution exact.
  std::vector<long> r2;
  long w_plus2 = 0, total2 = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] == 0.0) continue;
    const long r = std::lround(2.0 * ranks[i]);
    r2.push_back(r);
    total2 += r;
    if (d[i] > 0) w_plus2 += r;
  }
  TestResult res;
  res.n = nonzero;
  res.statistic = std::min(w_plus2, total2 - w_plus2) / 2.0;

  if (nonzero <= kWilcoxonExactMax) {
    std::vector<std::uint64_t> ways(static_cast<std::size_t>(total2) + 1, 0);
    ways[0] = 1;
    long reach = 0;
    for (long r : r2) {
      for (long s = reach; s >= 0; --s)
        if (ways[static_cast<std::size_t>(s)]) ways[static_cast<std::size_t>(s + r)] += ways[static_cast<std::size_t>(s)];
      reach += r;
    }
    const long dev = std::abs(2 * w_plus2 - total2);
    std::uint64_t hit = 0;
    for (long s = 0; s <= total2; ++s)
      if (std::abs(2 * s - total2) >= dev) hit += ways[static_cast<std::size_t>(s)];
    res.p_value = static_cast<double>(hit) / std::ldexp(1.0, static_cast<int>(nonzero));
    res.exact = true;
    return res;
  }

  const double n = static_cast<double>(d.size());
  const double nz = static_cast<double>(d.size() - nonzero);
  double mean = (n * (n + 1) - nz * (nz + 1)) / 4.0;
  double var = (n * (n + 1) * (2 * n + 1) - nz * (nz + 1) * (2 * nz + 1)) / 24.0;
  for (std::size_t t : ties) {
    const double tt = static_cast<double>(t);
    var -= (tt * tt * tt - tt) / 48.0;
  }
  // Zeros form one tie group among the absolute values; it carries no sign.
  if (nz > 0) var += (nz * nz * nz - nz) / 48.0;
  res.p_value = var > 0 ? std::min(1.0, normal_two_sided((w_plus2 / 2.0 - mean) / std::sqrt(var))) : 1.0;
  return res;
}

inline constexpr std::size_t kMannWhitneyExactMax = 12;

// Two-sided Mann-Whitney U test; the statistic is U for x. For
// |x| + |y| <= 12 the p-value comes from the exact permutation distribution
// of the observed (possibly tied) ranks, otherwise from the normal
// approximation with tie and continuity corrections.
inline TestResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty() || y.empty()) throw Error(ErrorKind::kValidation, "Mann-Whitney samples must be nonempty");
  std::vector<double> all(x);
  all.insert(all.end(), y.begin(), y.end());
  std::vector<std::size_t> ties;
  const auto ranks = average_ranks(all, &ties);
  const std::size_t n1 = x.size(), n2 = y.size(), N = n1 + n2;

  long rx2 = 0;
  std::vector<long> r2(N);
  for (std::size_t i = 0; i < N; ++i) {
    r2[i] = std::lround(2.0 * ranks[i]);
    if (i < n1) rx2 += r2[i];
  }
  const long base2 = static_cast<long>(n1 * (n1 + 1));  // 2 * n1(n1+1)/2
  const long u2 = rx2 - base2;
  const long mu2 = static_cast<long>(n1 * n2);  // 2 * n1 n2 / 2
  TestResult res;
  res.n = N;
  res.statistic = u2 / 2.0;

  if (N <= kMannWhitneyExactMax) {
    // ways[j][s]: subsets of size j with doubled rank sum s.
    const long total2 = std::accumulate(r2.begin(), r2.end(), 0L);
    std::vector<std::vector<std::uint64_t>> ways(n1 + 1, std::vector<std::uint64_t>(static_cast<std::size_t>(total2) + 1, 0));
    ways[0][0] = 1;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = std::min(i + 1, n1); j >= 1; --j)
        for (long s = total2 - r2[i]; s >= 0; --s)
          ways[j][static_cast<std::size_t>(s + r2[i])] += ways[j - 1][static_cast<std::size_t>(s)];
    const long dev = std::abs(u2 - mu2);
    std::uint64_t hit = 0, all_ways = 0;
    for (long s = 0; s <= total2; ++s) {
      const auto w = ways[n1][static_cast<std::size_t>(s)];
      all_ways += w;
      if (std::abs(s - base2 - mu2) >= dev) hit += w;
    }
    res.p_value = static_cast<double>(hit) / static_cast<double>(all_ways);
    res.exact = true;
    return res;
  }

  const double a = static_cast<double>(n1), b = static_cast<double>(n2), n = static_cast<double>(N);
  double tie_term = 0.0;
  for (std::size_t t : ties) {
    const double tt = static_cast<double>(t);
    tie_term += tt * tt * tt - tt;
  }
  const double var = a * b / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var <= 0) {
    res.p_value = 1.0;
    return res;
  }
  const double num = std::max(0.0, std::abs(u2 - mu2) / 2.0 - 0.5);
  res.p_value = std::min(1.0, normal_two_sided(num / std::sqrt(var)));
  return res;
}

namespace detail {

inline double binomial_pmf(std::size_t k, std::size_t n, double p) {
  const double kd = static_cast<double>(k), rest = static_cast<double>(n - k);
  if (n <= 60) {
    // C(60, 30) still fits in 64 bits.
    std::uint64_t c = 1;
    const std::size_t kk = std::min(k, n - k);
    for (std::size_t i = 1; i <= kk; ++i) c = c * (n - kk + i) / i;
    return static_cast<double>(c) * std::pow(p, kd) * std::pow(1.0 - p, rest);
  }
  const double log_c = std::lgamma(n + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(rest + 1.0);
  const double lp = (kd > 0 ? kd * std::log(p) : 0.0) + (rest > 0 ? rest * std::log1p(-p) : 0.0);
  return std::exp(log_c + lp);
}

}  // namespace detail

// Exact two-sided binomial test: sum of P(i) over outcomes no more likely
// than the observed one (relative slack 1e-7 absorbs rounding).
inline double binomial_test(std::size_t k, std::size_t n, double p0) {
  if (k > n) throw Error(ErrorKind::kValidation, "successes exceed trials");
  if (!(p0 > 0.0 && p0 < 1.0)) throw Error(ErrorKind::kValidation, "baseline probability must lie in (0, 1)");
  const double pk = detail::binomial_pmf(k, n, p0);
  const double cut = pk * (1.0 + 1e-7);
  double total = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double pi = detail::binomial_pmf(i, n, p0);
    if (pi <= cut) total += pi;
  }
  return std::min(1.0, total);
}

struct LogOddsResult {
  double log_odds = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool haldane = false;  // 0.5 added to every cell
};

// Log-odds ratio of the 2x2 table
//          type t   other
//   in       a        b
//   out      c        d
// with a Wald 95% interval. Any zero cell triggers the Haldane-Anscombe
// correction.
inline LogOddsResult log_odds_ratio(double a, double b, double c, double d, double z = 1.96) {
  if (a < 0 || b < 0 || c < 0 || d < 0) throw Error(ErrorKind::kValidation, "negative contingency count");
  if (a + b == 0 || c + d == 0) throw Error(ErrorKind::kDegenerate, "log-odds undefined for an empty group");
  LogOddsResult r;
  if (a == 0 || b == 0 || c == 0 || d == 0) {
    a += 0.5;
    b += 0.5;
    c += 0.5;
    d += 0.5;
    r.haldane = true;
  }
  r.log_odds = std::log(a / b) - std::log(c / d);
  r.se = std::sqrt(1 / a + 1 / b + 1 / c + 1 / d);
  r.ci_low = r.log_odds - z * r.se;
  r.ci_high = r.log_odds + z * r.se;
  return r;
}

inline std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

}  // namespace qtypology
