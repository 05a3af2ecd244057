#pragma once

#include <cstddef>

#include "s2cn/numkit/tensor.hpp"

namespace s2cn {

// Stride-2 convolution and its transpose on batched feature stacks of shape
// (images, channels, height, width).
//
// Padding is "same-ceil": an input extent `in` maps to ceil(in / 2), with
// total padding max(0, 2 * (out - 1) + k - in) of which floor(total / 2) goes
// before the first row/column. So 48x42 -> 24x21 -> 12x11 -> 6x6.

inline constexpr std::size_t kStride = 2;

enum class Activation { relu, identity };

std::size_t strided_extent(std::size_t in);
std::size_t pad_before(std::size_t in, std::size_t kernel);

/// Tensors retained by a forward pass for the matching backward pass.
struct ConvCache {
  Tensor input;
  Tensor output;
  Activation activation = Activation::relu;

  bool valid() const noexcept { return input.rank() == 4 && output.rank() == 4; }
};

struct ConvGrads {
  Tensor input;
  Tensor kernels;
  Tensor biases;
};

/// kernels: (out_ch, in_ch, kh, kw); biases: (out_ch). Accepts a single
/// (channels, height, width) stack or a batch.
Tensor conv2d_forward(const Tensor& input, const Tensor& kernels, const Tensor& biases,
                      Activation act = Activation::relu, ConvCache* cache = nullptr);

ConvGrads conv2d_backward(const Tensor& grad_out, const ConvCache& cache, const Tensor& kernels);

/// Transposed convolution. kernels: (in_ch, out_ch, kh, kw), i.e. the layout of
/// the encoder layer it mirrors. Output extents are cropped to (out_h, out_w),
/// which must satisfy ceil(out / 2) == input extent.
Tensor deconv2d_forward(const Tensor& input, const Tensor& kernels, const Tensor& biases, std::size_t out_h,
                        std::size_t out_w, Activation act = Activation::relu, ConvCache* cache = nullptr);

ConvGrads deconv2d_backward(const Tensor& grad_out, const ConvCache& cache, const Tensor& kernels);

}  // namespace s2cn
