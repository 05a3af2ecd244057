#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "s2cn/classifier/head.hpp"
#include "s2cn/convae/conv_stack.hpp"
#include "s2cn/selfexpr/self_expression.hpp"

namespace s2cn {

/// Which self-supervision terms are switched on.
enum class LossConfig { base, with_l3, with_l4, dual };

std::string to_string(LossConfig config);
/// Accepts base, l3, l4, dual and the spellings +L3, +L4, +L3+L4.
LossConfig parse_loss_config(std::string_view text);

struct HyperParams {
  double gamma1 = 1.0;  // regularizer on C
  double gamma2 = 1.0;  // self-expression fit
  double gamma3 = 0.0;  // ||C||_Q
  double gamma4 = 0.0;  // classification + center loss
  double tau = 0.1;
  double learning_rate = 1e-3;
  std::size_t t0 = 5;
  std::size_t t_max = 10;
  Regularizer regularizer = Regularizer::l1;
  CrossEntropyForm cross_entropy = CrossEntropyForm::softplus;
  bool align_labels = true;
  std::uint64_t seed = 0;
  std::size_t cae_epochs = 1000;
  std::size_t dsc_epochs = 500;

  /// Throws std::invalid_argument on negative tradeoffs, tau outside [0, 1],
  /// a negative learning rate, or zero T0 / T_max.
  void validate() const;
  /// Stable across runs and platforms.
  std::uint64_t hash() const;
};

/// Zeroes gamma3 and/or gamma4 according to the configuration.
HyperParams with_loss_config(HyperParams hyper, LossConfig config);

/// Tradeoffs and schedule for a named dataset. Throws std::invalid_argument
/// listing the known names when `name` is not one of them.
HyperParams preset(std::string_view name, std::size_t clusters);

/// Encoder geometry for a named dataset. The fixed-size presets check the
/// image extents; "synthetic" adapts to them.
NetworkSpec preset_network(std::string_view name, std::size_t height, std::size_t width);

std::vector<std::string> preset_names();

std::string to_string(Regularizer kind);
Regularizer parse_regularizer(std::string_view text);

}  // namespace s2cn
