#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "s2cn/data/dataset.hpp"
#include "s2cn/numkit/tensor.hpp"

namespace s2cn {

struct SyntheticSpec {
  std::size_t subspaces = 5;
  std::size_t dim = 3;          // d
  std::size_t ambient = 30;     // D
  std::size_t per_subspace = 40;
  double noise = 0.0;           // sigma of additive Gaussian noise
  std::uint64_t seed = 0;
};

struct SyntheticSet {
  Tensor points;               // D x N, grouped by subspace
  std::vector<Label> labels;   // 1..subspaces
  std::vector<Tensor> bases;   // D x d orthonormal, one per subspace
};

/// Points basis * c + noise * g with c a unit-norm Gaussian coefficient
/// vector; bases come from Gram-Schmidt on seeded Gaussian matrices.
SyntheticSet gen_synthetic(const SyntheticSpec& spec);

/// Zero-pads each point to the smallest square side >= sqrt(D), reshapes it
/// to an image, and maps all values affinely onto [0, 1] with one global
/// min/max. The raw points are kept as the dataset's features.
ImageDataset to_pseudo_images(const SyntheticSet& set, const std::string& name = "synthetic");

}  // namespace s2cn
