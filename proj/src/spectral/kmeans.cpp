#include "s2cn/spectral/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "s2cn/numkit/errors.hpp"

namespace s2cn {

namespace {

double squared_distance(const Tensor& points, std::size_t row, const Tensor& centroids, std::size_t c) {
  const std::size_t d = points.cols();
  double s = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double diff = points(row, j) - centroids(c, j);
    s += diff * diff;
  }
  return s;
}

Tensor seed_centroids(const Tensor& points, std::size_t k, std::size_t first) {
  const std::size_t n = points.rows(), d = points.cols();
  Tensor centroids = Tensor::matrix(k, d);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::size_t pick = first;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t j = 0; j < d; ++j) centroids(c, j) = points(pick, j);
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(points, i, centroids, c));
      if (nearest[i] > best) {
        best = nearest[i];
        pick = i;
      }
    }
  }
  return centroids;
}

void recompute_centroids(const Tensor& points, const std::vector<std::size_t>& assignment, Tensor& centroids,
                         std::vector<std::size_t>& counts) {
  const std::size_t k = centroids.rows(), d = points.cols();
  Tensor sums = Tensor::matrix(k, d);
  counts.assign(k, 0);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    ++counts[assignment[i]];
    for (std::size_t j = 0; j < d; ++j) sums(assignment[i], j) += points(i, j);
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    for (std::size_t j = 0; j < d; ++j) centroids(c, j) = sums(c, j) / static_cast<double>(counts[c]);
  }
}

// Returns true when any point was moved.
bool repair_empty(const Tensor& points, std::vector<std::size_t>& assignment, Tensor& centroids,
                  std::vector<std::size_t>& counts) {
  bool moved = false;
  for (std::size_t empty = 0; empty < counts.size(); ++empty) {
    if (counts[empty] != 0) continue;
    std::size_t far = points.rows();
    double far_dist = -1.0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
      if (counts[assignment[i]] < 2) continue;
      const double dist = squared_distance(points, i, centroids, assignment[i]);
      if (dist > far_dist) {
        far_dist = dist;
        far = i;
      }
    }
    if (far == points.rows()) throw NumericError("kmeans: cannot fill an empty cluster");
    --counts[assignment[far]];
    assignment[far] = empty;
    counts[empty] = 1;
    for (std::size_t j = 0; j < points.cols(); ++j) centroids(empty, j) = points(far, j);
    moved = true;
  }
  if (moved) recompute_centroids(points, assignment, centroids, counts);
  return moved;
}

}  // namespace

KMeansResult kmeans(const Tensor& points, std::size_t k, RngStream& rng, const KMeansOptions& options) {
  require_rank(points, 2, "kmeans points");
  const std::size_t n = points.rows();
  if (k == 0 || k > n) {
    throw std::invalid_argument("kmeans: cannot form " + std::to_string(k) + " clusters from " + std::to_string(n) +
                                " points");
  }
  const std::size_t restarts = options.restarts == 0 ? 1 : options.restarts;

  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < restarts; ++r) {
    Tensor centroids = seed_centroids(points, k, rng.below(n));
    std::vector<std::size_t> assignment(n, k);
    std::vector<std::size_t> counts;
    for (std::size_t it = 0; it < options.max_iterations; ++it) {
      bool changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t arg = 0;
        double dmin = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
          const double dist = squared_distance(points, i, centroids, c);
          if (dist < dmin) {
            dmin = dist;
            arg = c;
          }
        }
        if (assignment[i] != arg) {
          assignment[i] = arg;
          changed = true;
        }
      }
      recompute_centroids(points, assignment, centroids, counts);
      changed = repair_empty(points, assignment, centroids, counts) || changed;
      if (!changed) break;
    }
    recompute_centroids(points, assignment, centroids, counts);
    repair_empty(points, assignment, centroids, counts);

    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) inertia += squared_distance(points, i, centroids, assignment[i]);
    if (inertia < best.inertia) {
      best.inertia = inertia;
      best.assignment = std::move(assignment);
      best.centroids = std::move(centroids);
    }
  }
  return best;
}

}  // namespace s2cn
