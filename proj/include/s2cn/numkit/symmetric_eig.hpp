#pragma once

#include <vector>

#include "s2cn/numkit/tensor.hpp"

namespace s2cn {

struct SymmetricEigen {
  std::vector<double> values;  // ascending
  Tensor vectors;              // column k pairs with values[k]
  int sweeps = 0;
};

/// Cyclic Jacobi eigensolver. Sweeps until the off-diagonal Frobenius norm is
/// at most 1e-10 or 100 sweeps have run.
SymmetricEigen symmetric_eig(const Tensor& m);

}  // namespace s2cn
