#include "s2cn/numkit/adam.hpp"

#include <cmath>

#include "s2cn/numkit/errors.hpp"

namespace s2cn {

void adam_step(std::span<const ParamRef> params, OptimState& state) {
  for (const ParamRef& p : params) {
    if (!p.value || !p.grad) throw std::invalid_argument("adam_step: parameter '" + p.name + "' is unbound");
    require_shape(*p.grad, p.value->shape(), ("adam_step gradient of " + p.name).c_str());
    if (!p.grad->all_finite()) throw NumericError("adam_step: non-finite gradient for parameter '" + p.name + "'");
  }
  if (state.m_.empty() && state.step_ == 0) {
    for (const ParamRef& p : params) {
      state.m_.emplace_back(p.value->shape());
      state.v_.emplace_back(p.value->shape());
    }
  }
  if (state.m_.size() != params.size()) {
    throw ShapeError("adam_step: optimizer tracks " + std::to_string(state.m_.size()) + " parameters, got " +
                     std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    require_shape(state.m_[i], params[i].value->shape(), ("adam_step moments of " + params[i].name).c_str());
  }

  const AdamSettings& s = state.settings_;
  const double t = static_cast<double>(state.step_ + 1);
  const double c1 = 1.0 - std::pow(s.beta1, t);
  const double c2 = 1.0 - std::pow(s.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& w = *params[i].value;
    const Tensor& g = *params[i].grad;
    Tensor& m = state.m_[i];
    Tensor& v = state.v_[i];
    for (std::size_t k = 0; k < w.size(); ++k) {
      m[k] = s.beta1 * m[k] + (1.0 - s.beta1) * g[k];
      v[k] = s.beta2 * v[k] + (1.0 - s.beta2) * g[k] * g[k];
      const double mhat = m[k] / c1;
      const double vhat = v[k] / c2;
      w[k] -= s.learning_rate * mhat / (std::sqrt(vhat) + s.epsilon);
    }
  }
  ++state.step_;
}

}  // namespace s2cn
