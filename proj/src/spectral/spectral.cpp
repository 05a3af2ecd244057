#include "s2cn/spectral/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "s2cn/numkit/errors.hpp"
#include "s2cn/numkit/linalg.hpp"
#include "s2cn/numkit/symmetric_eig.hpp"

namespace s2cn {

Segmentation labels_to_q(std::span<const Label> labels, std::size_t clusters) {
  Segmentation seg{Tensor::matrix(clusters, labels.size()), 0};
  std::vector<bool> seen(clusters, false);
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const Label l = labels[j];
    if (l < 1 || static_cast<std::size_t>(l) > clusters) {
      throw std::invalid_argument("labels_to_q: label " + std::to_string(l) + " at index " + std::to_string(j) +
                                  " is outside 1.." + std::to_string(clusters));
    }
    seg.q(static_cast<std::size_t>(l - 1), j) = 1.0;
    seen[static_cast<std::size_t>(l - 1)] = true;
  }
  for (bool s : seen) seg.occupied += s ? 1 : 0;
  return seg;
}

std::vector<Label> q_to_labels(const Tensor& q) {
  require_rank(q, 2, "q_to_labels");
  std::vector<Label> labels(q.cols(), 0);
  for (std::size_t j = 0; j < q.cols(); ++j) {
    for (std::size_t k = 0; k < q.rows(); ++k) {
      if (q(k, j) != 0.0) {
        labels[j] = static_cast<Label>(k + 1);
        break;
      }
    }
  }
  return labels;
}

PseudoLabelState spectral_cluster(const Tensor& affinity, std::size_t clusters, RngStream& rng,
                                  const SpectralOptions& options) {
  require_square(affinity, "spectral_cluster");
  const std::size_t n = affinity.rows();
  if (clusters < 2) throw std::invalid_argument("spectral_cluster: need at least 2 clusters");
  if (clusters > n) {
    throw std::invalid_argument("spectral_cluster: " + std::to_string(clusters) + " clusters requested for " +
                                std::to_string(n) + " points");
  }
  if (!affinity.all_finite()) throw NumericError("spectral_cluster: affinity has non-finite entries");

  std::vector<double> inv_sqrt_degree(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < n; ++j) d += affinity(i, j);
    inv_sqrt_degree[i] = 1.0 / std::sqrt(std::max(d, options.degree_floor));
  }
  Tensor laplacian = Tensor::matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      laplacian(i, j) = (i == j ? 1.0 : 0.0) - inv_sqrt_degree[i] * affinity(i, j) * inv_sqrt_degree[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) laplacian(j, i) = laplacian(i, j);

  const SymmetricEigen eig = symmetric_eig(laplacian);
  Tensor embedding = Tensor::matrix(n, clusters);
  for (std::size_t i = 0; i < n; ++i) {
    double norm = 0.0;
    for (std::size_t k = 0; k < clusters; ++k) {
      embedding(i, k) = eig.vectors(i, k);
      norm += embedding(i, k) * embedding(i, k);
    }
    if (norm > 0.0) {
      const double inv = 1.0 / std::sqrt(norm);
      for (std::size_t k = 0; k < clusters; ++k) embedding(i, k) *= inv;
    }
  }

  const KMeansResult km = kmeans(embedding, clusters, rng, options.kmeans);
  PseudoLabelState state;
  state.clusters = clusters;
  state.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) state.labels[i] = static_cast<Label>(km.assignment[i] + 1);
  return state;
}

WeightedNorm q_weighted_norm(const Tensor& c, const Tensor& q) {
  require_square(c, "q_weighted_norm coefficients");
  require_rank(q, 2, "q_weighted_norm segmentation");
  if (q.cols() != c.rows()) {
    throw ShapeError("q_weighted_norm: C is " + shape_to_string(c.shape()) + " but Q is " + shape_to_string(q.shape()));
  }
  const std::size_t n = c.rows();
  // ||q_i - q_j||^2 = |q_i|^2 + |q_j|^2 - 2 q_i.q_j
  const Tensor gram = matmul_tn(q, q);
  WeightedNorm out{0.0, Tensor::matrix(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double w = 0.5 * (gram(i, i) + gram(j, j) - 2.0 * gram(i, j));
      if (w == 0.0) continue;
      const double v = c(i, j);
      out.value += std::abs(v) * w;
      out.grad(i, j) = (v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0)) * w;
    }
  }
  return out;
}

}  // namespace s2cn
