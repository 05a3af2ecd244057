#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "s2cn/numkit/tensor.hpp"

namespace s2cn {

struct AdamSettings {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// A trainable tensor, its gradient, and the name used in diagnostics.
struct ParamRef {
  std::string name;
  Tensor* value = nullptr;
  const Tensor* grad = nullptr;
};

/// Moment accumulators for one ordered parameter list. Accumulators are
/// allocated on the first step and must keep mirroring the parameter shapes.
class OptimState {
 public:
  explicit OptimState(AdamSettings settings = {}) : settings_(settings) {}

  const AdamSettings& settings() const noexcept { return settings_; }
  std::uint64_t step() const noexcept { return step_; }
  const std::vector<Tensor>& first_moments() const noexcept { return m_; }
  const std::vector<Tensor>& second_moments() const noexcept { return v_; }

 private:
  friend void adam_step(std::span<const ParamRef> params, OptimState& state);

  AdamSettings settings_;
  std::uint64_t step_ = 0;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
};

/// One bias-corrected Adam update applied elementwise. Throws NumericError
/// naming the first parameter whose gradient is not finite; in that case no
/// parameter is modified.
void adam_step(std::span<const ParamRef> params, OptimState& state);

}  // namespace s2cn
