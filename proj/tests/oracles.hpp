#pragma once

// Reference implementations used only by tests. Each takes the slow,
// obvious route so it shares no code path with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Itemsets = std::map<std::vector<std::string>, std::size_t>;

// Every subset of the item universe up to max_size, support by full scan.
inline Itemsets brute_force_itemsets(const std::vector<std::vector<std::string>>& tx, std::size_t min_support,
                                     std::size_t max_size) {
  std::set<std::string> u;
  for (const auto& t : tx) u.insert(t.begin(), t.end());
  std::vector<std::string> items(u.begin(), u.end());
  std::vector<std::set<std::string>> sets;
  for (const auto& t : tx) sets.emplace_back(t.begin(), t.end());
  Itemsets out;
  const std::uint64_t n = items.size();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) > max_size) continue;
    std::vector<std::string> cand;
    for (std::uint64_t i = 0; i < n; ++i)
      if (mask >> i & 1) cand.push_back(items[i]);
    std::size_t support = 0;
    for (const auto& s : sets) {
      bool all = true;
      for (const auto& c : cand) all = all && s.count(c);
      support += all;
    }
    if (support >= min_support) out.emplace(cand, support);
  }
  return out;
}

// Equivalence classes by direct pairwise test and depth-first closure.
// `occ[i]` lists the transactions containing itemset i.
inline std::vector<int> equivalence_classes(const std::vector<std::set<std::size_t>>& occ, double p) {
  const std::size_t m = occ.size();
  std::vector<std::vector<std::size_t>> adj(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      std::size_t both = 0;
      for (auto t : occ[i]) both += occ[j].count(t);
      const double pij = static_cast<double>(both) / static_cast<double>(occ[j].size());
      const double pji = static_cast<double>(both) / static_cast<double>(occ[i].size());
      if (pij > p && pji > p) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
    }
  std::vector<int> cls(m, -1);
  for (std::size_t s = 0; s < m; ++s) {
    if (cls[s] >= 0) continue;
    std::vector<std::size_t> stack{s};
    cls[s] = static_cast<int>(s);
    while (!stack.empty()) {
      auto x = stack.back();
      stack.pop_back();
      for (auto y : adj[x])
        if (cls[y] < 0) {
          cls[y] = static_cast<int>(s);
          stack.push_back(y);
        }
    }
  }
  return cls;  // smallest index of each class labels the class
}

// Midranks by counting, doubled so they stay integral.
inline std::vector<long> doubled_midranks(const std::vector<double>& v) {
  std::vector<long> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    long less = 0, equal = 0;
    for (double w : v) {
      less += w < v[i];
      equal += w == v[i];
    }
    r[i] = 2 * less + equal + 1;
  }
  return r;
}

// Wilcoxon signed-rank by enumerating all 2^n sign flips of the nonzero
// differences. Returns {min(W+, W-), two-sided p}.
inline std::pair<double, double> wilcoxon(const std::vector<double>& before, const std::vector<double>& after) {
  std::vector<double> d, a;
  for (std::size_t i = 0; i < before.size(); ++i)
    if (after[i] != before[i]) d.push_back(after[i] - before[i]);
  for (double x : d) a.push_back(std::abs(x));
  const auto r = doubled_midranks(a);
  long obs = 0, total = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    total += r[i];
    if (d[i] > 0) obs += r[i];
  }
  const std::size_t n = d.size();
  std::uint64_t hit = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    long t = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) t += r[i];
    hit += std::abs(2 * t - total) >= std::abs(2 * obs - total);
  }
  return {std::min(obs, total - obs) / 2.0, static_cast<double>(hit) / std::ldexp(1.0, static_cast<int>(n))};
}

// Mann-Whitney U by pairwise comparison, p by enumerating every way to
// split the pooled sample into groups of the original sizes.
inline std::pair<double, double> mann_whitney(const std::vector<double>& x, const std::vector<double>& y) {
  auto u2 = [](const std::vector<double>& a, const std::vector<double>& b) {
    long s = 0;
    for (double p : a)
      for (double q : b) s += p > q ? 2 : p == q ? 1 : 0;
    return s;
  };
  const long obs = u2(x, y);
  const long mu2 = static_cast<long>(x.size() * y.size());
  std::vector<double> all(x);
  all.insert(all.end(), y.begin(), y.end());
  const std::size_t N = all.size();
  std::uint64_t hit = 0, total = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << N); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) != x.size()) continue;
    std::vector<double> a, b;
    for (std::size_t i = 0; i < N; ++i) (mask >> i & 1 ? a : b).push_back(all[i]);
    ++total;
    hit += std::abs(u2(a, b) - mu2) >= std::abs(obs - mu2);
  }
  return {obs / 2.0, static_cast<double>(hit) / static_cast<double>(total)};
}

// Two-sided binomial p from Pascal-triangle coefficients.
inline double binomial(std::size_t k, std::size_t n, double p0) {
  std::vector<double> row{1.0};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> next(row.size() + 1, 0.0);
    for (std::size_t j = 0; j < row.size(); ++j) {
      next[j] += row[j];
      next[j + 1] += row[j];
    }
    row = std::move(next);
  }
  std::vector<double> pmf(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    pmf[i] = row[i] * std::pow(p0, static_cast<double>(i)) * std::pow(1.0 - p0, static_cast<double>(n - i));
  double s = 0.0;
  for (double q : pmf)
    if (q <= pmf[k] * (1.0 + 1e-7)) s += q;
  return std::min(1.0, s);
}

// Optimal 2-clustering by trying every bipartition.
inline std::pair<double, std::vector<int>> best_bipartition(const Eigen::MatrixXd& X) {
  const auto n = static_cast<std::size_t>(X.rows());
  double best = INFINITY;
  std::vector<int> labels(n);
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
    Eigen::RowVectorXd c0 = Eigen::RowVectorXd::Zero(X.cols()), c1 = c0;
    int n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) {
        c1 += X.row(static_cast<Eigen::Index>(i));
        ++n1;
      } else {
        c0 += X.row(static_cast<Eigen::Index>(i));
        ++n0;
      }
    }
    c0 /= n0;
    c1 /= n1;
    double sse = 0;
    for (std::size_t i = 0; i < n; ++i)
      sse += (X.row(static_cast<Eigen::Index>(i)) - (mask >> i & 1 ? c1 : c0)).squaredNorm();
    if (sse < best) {
      best = sse;
      for (std::size_t i = 0; i < n; ++i) labels[i] = mask >> i & 1;
    }
  }
  return {best, labels};
}

// Same partition up to relabeling.
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [x, fx] = ab.emplace(a[i], b[i]);
    auto [y, fy] = ba.emplace(b[i], a[i]);
    if (x->second != b[i] || y->second != a[i]) return false;
  }
  return true;
}

// Purity of a clustering against planted labels.
inline double purity(const std::vector<int>& cluster, const std::vector<int>& truth) {
  std::map<int, std::map<int, int>> counts;
  for (std::size_t i = 0; i < cluster.size(); ++i) ++counts[cluster[i]][truth[i]];
  int hit = 0;
  for (const auto& [c, m] : counts) {
    int best = 0;
    for (const auto& [t, n] : m) best = std::max(best, n);
    hit += best;
  }
  return cluster.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(cluster.size());
}

}  // namespace oracle
