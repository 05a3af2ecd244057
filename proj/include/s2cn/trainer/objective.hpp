#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "s2cn/classifier/head.hpp"
#include "s2cn/selfexpr/self_expression.hpp"
#include "s2cn/trainer/hyper_params.hpp"
#include "s2cn/trainer/model.hpp"

namespace s2cn {

/// Inputs of one full-batch evaluation. Exactly one of images / features is
/// used: images when the model has convolutional stacks, features otherwise.
struct TrainData {
  std::string name;
  Tensor images;    // N x H x W
  Tensor features;  // p x N
  std::vector<Label> truth;
  std::size_t clusters = 0;

  std::size_t size() const;
};

struct LossBreakdown {
  double l0 = 0.0;  // reconstruction
  double l1 = 0.0;  // regularizer on C
  double l2 = 0.0;  // self-expression fit
  double l3 = 0.0;  // ||C||_Q
  double l4 = 0.0;  // classification + center loss
  double total = 0.0;
  std::size_t epoch = 0;
};

/// Multipliers of L0..L4 in the objective being differentiated.
using LossWeights = std::array<double, 5>;

LossWeights training_weights(const HyperParams& hyper);

/// L = L0 + g1 L1 + g2 L2 + g3 L3 + g4 L4. Throws NumericError naming the
/// first non-finite component.
double total_loss(const LossBreakdown& parts, const HyperParams& hyper);

/// Sum over components of weight_i * per_component[i], tensor by tensor.
std::vector<Tensor> combine_gradients(std::span<const std::vector<Tensor>> per_component, const LossWeights& weights);

struct ObjectiveOptions {
  LossWeights weights{1.0, 1.0, 1.0, 0.0, 0.0};
  Regularizer regularizer = Regularizer::l1;
  double tau = 0.1;
  CrossEntropyForm cross_entropy = CrossEntropyForm::softplus;
  /// When false the decoder sees Z itself and L1, L2, L3 are not evaluated.
  bool use_coefficients = true;
  /// Recompute the class centers from the current outputs before the
  /// center loss; when false the stored centers are used.
  bool refresh_centers = true;
  bool compute_gradient = true;
  ParamGroups groups;
};

/// Pseudo-labels the self-supervised terms are measured against. With an
/// empty `q` neither L3 nor L4 is evaluated.
struct Supervision {
  Tensor q;
  std::vector<Label> labels;
};

struct Evaluation {
  LossBreakdown parts;  // total uses options.weights
  std::vector<Tensor> grads;  // parameter_names(model, options.groups) order
  Tensor centers;  // centers used by the center loss (empty when L4 is off)
  Tensor z;
};

Evaluation evaluate_objective(const Model& model, const TrainData& data, const Supervision& supervision,
                              const ObjectiveOptions& options);

}  // namespace s2cn
