#include "s2cn/selfexpr/self_expression.hpp"

#include <cmath>
#include <string>

#include "s2cn/numkit/errors.hpp"
#include "s2cn/numkit/linalg.hpp"

namespace s2cn {

namespace {

constexpr double kInitScale = 1e-4;

void zero_diagonal(Tensor& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) = 0.0;
}

}  // namespace

SelfExpressionLosses selfexpr_losses(const Tensor& z, const Tensor& c, Regularizer kind) {
  require_rank(z, 2, "selfexpr_losses features");
  require_square(c, "selfexpr_losses coefficients");
  if (c.rows() != z.cols()) {
    throw ShapeError("selfexpr_losses: C is " + shape_to_string(c.shape()) + " but Z has " +
                     std::to_string(z.cols()) + " columns");
  }
  for (std::size_t i = 0; i < c.rows(); ++i) {
    if (c(i, i) != 0.0) throw std::invalid_argument("selfexpr_losses: diag(C) must be zero");
  }

  SelfExpressionLosses out;
  out.grad_c_reg = Tensor(c.shape());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double v = c[i];
    if (kind == Regularizer::l1) {
      out.reg += std::abs(v);
      out.grad_c_reg[i] = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    } else {
      out.reg += 0.5 * v * v;
      out.grad_c_reg[i] = v;
    }
  }
  zero_diagonal(out.grad_c_reg);

  Tensor residual = subtract(z, matmul(z, c));  // R = Z - ZC
  out.fit = 0.5 * squared_norm(residual);
  out.grad_c_fit = matmul_tn(z, residual);
  scale(out.grad_c_fit, -1.0);
  zero_diagonal(out.grad_c_fit);
  out.grad_z = subtract(residual, matmul_nt(residual, c));  // R (I - C)^T
  return out;
}

void project_diag_zero(Tensor& c) {
  require_square(c, "project_diag_zero");
  zero_diagonal(c);
}

Tensor affinity(const Tensor& c) {
  require_square(c, "affinity");
  const std::size_t n = c.rows();
  Tensor a = Tensor::matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (std::abs(c(i, j)) + std::abs(c(j, i)));
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  return a;
}

Tensor init_coefficients(std::size_t n, RngStream& rng) {
  Tensor c = Tensor::matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) c(i, j) = rng.uniform(-kInitScale, kInitScale);
  return c;
}

}  // namespace s2cn
