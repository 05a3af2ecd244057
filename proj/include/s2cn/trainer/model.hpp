#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "s2cn/classifier/head.hpp"
#include "s2cn/convae/conv_stack.hpp"
#include "s2cn/numkit/adam.hpp"

namespace s2cn {

/// Everything a run learns. The convolutional stacks are empty when the
/// network is trained directly on precomputed features; the head stays zero
/// until the self-supervised stage starts.
struct Model {
  ConvStack encoder;
  ConvStack decoder{StackRole::decoder, {}};
  Tensor coefficients;  // N x N, zero diagonal
  ClassifierHead head;

  bool has_conv() const noexcept { return !encoder.layers.empty(); }
  bool has_head() const noexcept { return !head.w1.empty(); }
};

/// Which parameter groups take part in an optimizer step.
struct ParamGroups {
  bool conv = true;
  bool coefficients = true;
  bool head = true;
};

/// Parameter names in canonical order: encoder.k.{kernels,biases},
/// decoder.k.{kernels,biases}, self_expression.C, head.fc{1,2,3}.{weight,bias}.
/// Groups that are absent from the model are skipped.
std::vector<std::string> parameter_names(const Model& model, const ParamGroups& groups = {});

/// Pointers into `model` in the order of `parameter_names`, paired with the
/// matching entries of `grads`.
std::vector<ParamRef> model_parameters(Model& model, const std::vector<Tensor>& grads,
                                       const ParamGroups& groups = {});
std::vector<const Tensor*> parameter_values(const Model& model, const ParamGroups& groups = {});

}  // namespace s2cn
