#pragma once

#include "s2cn/numkit/tensor.hpp"

namespace s2cn {

// Dense matrix kernels on rank-2 tensors. Loops run in a fixed order so that
// results are reproducible bit for bit.

Tensor matmul(const Tensor& a, const Tensor& b);     // a * b
Tensor matmul_tn(const Tensor& a, const Tensor& b);  // a^T * b
Tensor matmul_nt(const Tensor& a, const Tensor& b);  // a * b^T
Tensor transpose(const Tensor& a);

double dot(const Tensor& a, const Tensor& b);
double squared_norm(const Tensor& a);
double max_abs(const Tensor& a);

/// y += alpha * x
void add_scaled(Tensor& y, double alpha, const Tensor& x);
Tensor subtract(const Tensor& a, const Tensor& b);
void scale(Tensor& a, double alpha);

void require_square(const Tensor& m, const char* what);

}  // namespace s2cn
