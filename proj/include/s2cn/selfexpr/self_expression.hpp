#pragma once

#include <cstddef>

#include "s2cn/numkit/rng.hpp"
#include "s2cn/numkit/tensor.hpp"

namespace s2cn {

enum class Regularizer { l1, l2 };

struct SelfExpressionLosses {
  double reg = 0.0;  // L1: sum |c_ij| (l1) or 0.5 * sum c_ij^2 (l2)
  double fit = 0.0;  // L2: 0.5 * ||Z - ZC||_F^2
  Tensor grad_c_reg;
  Tensor grad_c_fit;
  Tensor grad_z;     // of the fit term
};

/// z: p x N features, c: N x N with zero diagonal. The l1 subgradient is
/// sign(c) with value 0 at 0; both C gradients have their diagonal zeroed.
SelfExpressionLosses selfexpr_losses(const Tensor& z, const Tensor& c, Regularizer kind);

void project_diag_zero(Tensor& c);

/// A = (|C| + |C^T|) / 2.
Tensor affinity(const Tensor& c);

/// Uniform in [-1e-4, 1e-4] off the diagonal, zero on it.
Tensor init_coefficients(std::size_t n, RngStream& rng);

}  // namespace s2cn
