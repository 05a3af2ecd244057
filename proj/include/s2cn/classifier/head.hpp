#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "s2cn/numkit/rng.hpp"
#include "s2cn/numkit/tensor.hpp"
#include "s2cn/spectral/spectral.hpp"

namespace s2cn {

/// Fully connected head p -> N1 -> N2 -> n with ReLU hidden layers and a
/// linear output, plus one center per class in output space.
struct ClassifierHead {
  Tensor w1, b1;  // N1 x p, N1
  Tensor w2, b2;  // N2 x N1, N2
  Tensor w3, b3;  // n x N2, n
  Tensor centers; // n x n, column k is the center of class k + 1

  std::size_t input_dim() const { return w1.cols(); }
  std::size_t classes() const { return w3.rows(); }
};

/// N1 = floor(samples / 2), N2 = classes. Kaiming-uniform weights, zero biases.
ClassifierHead make_head(std::size_t feature_dim, std::size_t samples, std::size_t classes, RngStream& rng);

/// All weights, biases, and centers zero: the head outputs zeros.
ClassifierHead zero_head(std::size_t feature_dim, std::size_t samples, std::size_t classes);

struct FcForward {
  Tensor hidden1;  // post-ReLU, N1 x N
  Tensor hidden2;  // post-ReLU, N2 x N
  Tensor y;        // n x N
  Tensor prob;     // column-wise softmax of y
};

FcForward fc_forward(const Tensor& z, const ClassifierHead& head);

/// Column-wise softmax with max subtraction.
Tensor softmax_columns(const Tensor& y);

struct HeadGrads {
  Tensor w1, b1, w2, b2, w3, b3;
  Tensor z;
};

HeadGrads fc_backward(const Tensor& grad_y, const FcForward& fwd, const Tensor& z, const ClassifierHead& head);

enum class CrossEntropyForm {
  softplus,       // ln(1 + exp(-prob_j . q_j))
  log_likelihood  // -ln(prob_j . q_j)
};

struct CecResult {
  double loss = 0.0;
  double classification = 0.0;  // mean of the first term
  double center = 0.0;          // mean of the unweighted center term
  Tensor grad_y;
};

/// L4 = (1/N) sum_j [ce(prob_j, q_j) + tau * ||y_j - mu_{pi(j)}||^2]. Columns of
/// Q may be all zero, in which case the center term is skipped for that sample.
/// Centers are constants.
CecResult cec_loss(const Tensor& y, const Tensor& prob, const Tensor& q, const Tensor& centers, double tau,
                   CrossEntropyForm form = CrossEntropyForm::softplus);

/// mu_k = mean of y_j over {j : labels_j = k}; empty classes keep `previous`.
Tensor update_centers(const Tensor& y, std::span<const Label> labels, const Tensor& previous);

}  // namespace s2cn
