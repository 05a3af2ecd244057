#include "s2cn/classifier/alignment.hpp"

#include <string>

#include "s2cn/classifier/hungarian.hpp"
#include "s2cn/numkit/errors.hpp"

namespace s2cn {

bool AlignmentRecord::is_identity() const {
  for (std::size_t k = 0; k < permutation.size(); ++k)
    if (permutation[k] != static_cast<Label>(k + 1)) return false;
  return true;
}

Tensor overlap_counts(const std::vector<Label>& rows, const std::vector<Label>& cols, std::size_t clusters) {
  if (rows.size() != cols.size()) {
    throw ShapeError("overlap_counts: labelings have " + std::to_string(rows.size()) + " and " +
                     std::to_string(cols.size()) + " points");
  }
  Tensor counts = Tensor::matrix(clusters, clusters);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const Label a = rows[j], b = cols[j];
    if (a < 1 || b < 1 || static_cast<std::size_t>(a) > clusters || static_cast<std::size_t>(b) > clusters) {
      throw std::invalid_argument("overlap_counts: label outside 1.." + std::to_string(clusters) + " at index " +
                                  std::to_string(j));
    }
    counts(static_cast<std::size_t>(a - 1), static_cast<std::size_t>(b - 1)) += 1.0;
  }
  return counts;
}

AlignedLabels align_labels(const PseudoLabelState& prev, const PseudoLabelState& next) {
  if (prev.size() != next.size()) {
    throw ShapeError("align_labels: previous labeling has " + std::to_string(prev.size()) + " points, new has " +
                     std::to_string(next.size()));
  }
  if (prev.clusters != next.clusters) throw ShapeError("align_labels: cluster counts differ");
  const std::size_t n = next.clusters;

  AlignedLabels out;
  out.record.overlap = overlap_counts(next.labels, prev.labels, n);
  Tensor cost = out.record.overlap;
  for (double& v : cost.values()) v = -v;
  Assignment best = hungarian(cost);

  double identity_cost = 0.0;
  for (std::size_t k = 0; k < n; ++k) identity_cost += cost(k, k);
  out.record.permutation.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t target = identity_cost <= best.cost ? k : best.column_of_row[k];
    out.record.permutation[k] = static_cast<Label>(target + 1);
  }

  out.state = next;
  for (Label& l : out.state.labels) l = out.record.permutation[static_cast<std::size_t>(l - 1)];
  for (std::size_t j = 0; j < prev.size(); ++j)
    if (out.state.labels[j] == prev.labels[j]) ++out.record.agreement;
  return out;
}

}  // namespace s2cn
