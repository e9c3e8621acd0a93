#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "qtypology/error.hpp"
#include "qtypology/rng.hpp"

namespace qtypology {

struct KMeansOptions {
  int restarts = 10;
  int max_iterations = 300;
  double tolerance = 1e-6;  // relative inertia change
};

struct KMeansResult {
  Eigen::MatrixXd centroids;  // k x d
  std::vector<int> labels;
  double inertia = 0.0;
  int iterations = 0;
  std::vector<double> inertia_history;  // after each assignment step of the winning run
};

// Index of the nearest centroid (squared Euclidean); ties go to the lowest index.
inline std::pair<int, double> nearest_centroid(const Eigen::Ref<const Eigen::RowVectorXd>& x,
                                               const Eigen::MatrixXd& centroids) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double dist = (centroids.row(c) - x).squaredNorm();
    if (dist < best_d) {
      best_d = dist;
      best = static_cast<int>(c);
    }
  }
  return {best, best_d};
}

namespace detail {

inline Eigen::MatrixXd kmeanspp_seeds(const Eigen::MatrixXd& X, int k, Rng& rng) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd C(k, X.cols());
  C.row(0) = X.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
  Eigen::VectorXd d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2(i) = (X.row(i) - C.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total <= 0.0) {
      pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    } else {
      double r = rng.uniform() * total;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        r -= d2(i);
        if (r < 0.0 && d2(i) > 0.0) {
          pick = i;
          break;
        }
      }
    }
    C.row(c) = X.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) d2(i) = std::min(d2(i), (X.row(i) - C.row(c)).squaredNorm());
  }
  return C;
}

inline KMeansResult lloyd(const Eigen::MatrixXd& X, Eigen::MatrixXd C, const KMeansOptions& opt) {
  const Eigen::Index n = X.rows();
  const int k = static_cast<int>(C.rows());
  KMeansResult r;
  r.labels.assign(static_cast<std::size_t>(n), -1);
  std::vector<double> dist(static_cast<std::size_t>(n));
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= opt.max_iterations; ++it) {
    bool changed = false;
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      auto [c, d] = nearest_centroid(X.row(i), C);
      if (r.labels[static_cast<std::size_t>(i)] != c) changed = true;
      r.labels[static_cast<std::size_t>(i)] = c;
      dist[static_cast<std::size_t>(i)] = d;
      inertia += d;
    }
    // Empty clusters take the point currently farthest from its centroid.
    std::vector<int> count(static_cast<std::size_t>(k), 0);
    for (int l : r.labels) ++count[static_cast<std::size_t>(l)];
    for (int c = 0; c < k; ++c) {
      if (count[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (count[static_cast<std::size_t>(r.labels[static_cast<std::size_t>(i)])] < 2) continue;
        if (far < 0 || dist[static_cast<std::size_t>(i)] > dist[static_cast<std::size_t>(far)]) far = i;
      }
      if (far < 0) break;
      --count[static_cast<std::size_t>(r.labels[static_cast<std::size_t>(far)])];
      inertia -= dist[static_cast<std::size_t>(far)];
      r.labels[static_cast<std::size_t>(far)] = c;
      dist[static_cast<std::size_t>(far)] = 0.0;
      count[static_cast<std::size_t>(c)] = 1;
      C.row(c) = X.row(far);
      changed = true;
    }
    r.inertia_history.push_back(inertia);
    r.inertia = inertia;
    r.iterations = it;

    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(k, X.cols());
    for (Eigen::Index i = 0; i < n; ++i) sum.row(r.labels[static_cast<std::size_t>(i)]) += X.row(i);
    for (int c = 0; c < k; ++c)
      if (count[static_cast<std::size_t>(c)] > 0) C.row(c) = sum.row(c) / count[static_cast<std::size_t>(c)];

    const bool converged = !changed || (std::isfinite(prev) && prev - inertia <= opt.tolerance * prev);
    prev = inertia;
    if (converged) break;
  }
  // Final inertia against the updated centroids (never larger than the last assignment step).
  double final_inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    final_inertia += (X.row(i) - C.row(r.labels[static_cast<std::size_t>(i)])).squaredNorm();
  r.inertia = final_inertia;
  r.centroids = std::move(C);
  return r;
}

}  // namespace detail

// Lloyd's algorithm with k-means++ seeding; the best of `restarts` runs by
// inertia wins (first run on ties). Deterministic for a given seed.
inline KMeansResult kmeans(const Eigen::MatrixXd& X, int k, std::uint64_t seed, const KMeansOptions& opt = {}) {
  if (k < 1) throw Error(ErrorKind::kValidation, "k must be >= 1");
  if (opt.restarts < 1) throw Error(ErrorKind::kValidation, "restarts must be >= 1");
  if (X.rows() < k)
    throw Error(ErrorKind::kInfeasible, "cannot form " + std::to_string(k) + " clusters from " +
                                            std::to_string(X.rows()) + " points");
  Rng rng(seed);
  KMeansResult best;
  bool have = false;
  for (int run = 0; run < opt.restarts; ++run) {
    Rng run_rng(rng.next());
    auto r = detail::lloyd(X, detail::kmeanspp_seeds(X, k, run_rng), opt);
    if (!have || r.inertia < best.inertia) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

}  // namespace qtypology
