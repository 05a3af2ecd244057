#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "s2cn/numkit/rng.hpp"
#include "s2cn/numkit/tensor.hpp"
#include "s2cn/spectral/kmeans.hpp"

namespace s2cn {

using Label = int;

/// Hard cluster assignment with labels in 1..clusters.
struct PseudoLabelState {
  std::vector<Label> labels;
  std::size_t clusters = 0;
  std::size_t epoch = 0;

  std::size_t size() const noexcept { return labels.size(); }
};

struct Segmentation {
  Tensor q;                   // clusters x N, one-hot columns
  std::size_t occupied = 0;   // rank of q
  bool full_rank() const noexcept { return occupied == q.rows(); }
};

/// Throws std::invalid_argument for labels outside 1..clusters.
Segmentation labels_to_q(std::span<const Label> labels, std::size_t clusters);

/// Label of each one-hot column; 0 for an all-zero column.
std::vector<Label> q_to_labels(const Tensor& q);

struct SpectralOptions {
  KMeansOptions kmeans;
  double degree_floor = 1e-12;
};

/// Normalized symmetric Laplacian I - D^-1/2 A D^-1/2, eigenvectors of its
/// `clusters` smallest eigenvalues, unit-length rows, then k-means.
PseudoLabelState spectral_cluster(const Tensor& affinity, std::size_t clusters, RngStream& rng,
                                  const SpectralOptions& options = {});

struct WeightedNorm {
  double value = 0.0;
  Tensor grad;
};

/// ||C||_Q = sum_ij |c_ij| * ||q_i - q_j||^2 / 2, with subgradient
/// sign(c_ij) * ||q_i - q_j||^2 / 2 (diagonal zeroed). Q is a constant.
WeightedNorm q_weighted_norm(const Tensor& c, const Tensor& q);

}  // namespace s2cn
