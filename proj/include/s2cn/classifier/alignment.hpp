#pragma once

#include <cstddef>
#include <vector>

#include "s2cn/numkit/tensor.hpp"
#include "s2cn/spectral/spectral.hpp"

namespace s2cn {

struct AlignmentRecord {
  std::vector<Label> permutation;  // new label k maps to permutation[k - 1]
  Tensor overlap;                  // overlap(a, b) = #{j : new_j = a + 1, prev_j = b + 1}
  std::size_t agreement = 0;       // points whose relabeled id equals prev
  bool is_identity() const;
};

struct AlignedLabels {
  PseudoLabelState state;
  AlignmentRecord record;
};

/// Relabels `next` to agree with `prev` on as many points as possible. When
/// the identity is among the optimal permutations it is returned.
AlignedLabels align_labels(const PseudoLabelState& prev, const PseudoLabelState& next);

/// Confusion counts between two labelings in 1..clusters.
Tensor overlap_counts(const std::vector<Label>& rows, const std::vector<Label>& cols, std::size_t clusters);

}  // namespace s2cn
