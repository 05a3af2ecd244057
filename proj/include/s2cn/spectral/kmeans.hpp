#pragma once

#include <cstddef>
#include <vector>

#include "s2cn/numkit/rng.hpp"
#include "s2cn/numkit/tensor.hpp"

namespace s2cn {

struct KMeansOptions {
  std::size_t restarts = 20;
  std::size_t max_iterations = 300;
};

struct KMeansResult {
  std::vector<std::size_t> assignment;  // 0-based cluster per row
  Tensor centroids;                     // k x d
  double inertia = 0.0;                 // within-cluster sum of squares
};

/// Lloyd iterations on the rows of `points`. Each restart seeds its first
/// centroid from `rng` and the rest by farthest-point selection; the restart
/// with the lowest inertia wins, earliest restart on ties. Every cluster is
/// kept non-empty by moving the point farthest from its centroid into an
/// empty cluster.
KMeansResult kmeans(const Tensor& points, std::size_t k, RngStream& rng, const KMeansOptions& options = {});

}  // namespace s2cn
