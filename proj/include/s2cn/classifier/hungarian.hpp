#pragma once

#include <cstddef>
#include <vector>

#include "s2cn/numkit/tensor.hpp"

namespace s2cn {

struct Assignment {
  std::vector<std::size_t> column_of_row;
  double cost = 0.0;  // sum of cost(r, column_of_row[r]) over the input matrix
};

/// Minimum-cost perfect matching on a square cost matrix (Kuhn-Munkres with
/// row/column potentials, O(n^3)).
Assignment hungarian(const Tensor& cost);

}  // namespace s2cn
