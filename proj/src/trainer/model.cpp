#include "s2cn/trainer/model.hpp"

#include <stdexcept>

#include "s2cn/numkit/errors.hpp"

namespace s2cn {

namespace {

template <typename M, typename Fn>
void visit_params(M& model, const ParamGroups& groups, Fn&& fn) {
  if (groups.conv) {
    for (std::size_t k = 0; k < model.encoder.layers.size(); ++k) {
      fn("encoder." + std::to_string(k) + ".kernels", model.encoder.layers[k].kernels);
      fn("encoder." + std::to_string(k) + ".biases", model.encoder.layers[k].biases);
    }
    for (std::size_t k = 0; k < model.decoder.layers.size(); ++k) {
      fn("decoder." + std::to_string(k) + ".kernels", model.decoder.layers[k].kernels);
      fn("decoder." + std::to_string(k) + ".biases", model.decoder.layers[k].biases);
    }
  }
  if (groups.coefficients && !model.coefficients.empty()) fn(std::string("self_expression.C"), model.coefficients);
  if (groups.head && !model.head.w1.empty()) {
    fn(std::string("head.fc1.weight"), model.head.w1);
    fn(std::string("head.fc1.bias"), model.head.b1);
    fn(std::string("head.fc2.weight"), model.head.w2);
    fn(std::string("head.fc2.bias"), model.head.b2);
    fn(std::string("head.fc3.weight"), model.head.w3);
    fn(std::string("head.fc3.bias"), model.head.b3);
  }
}

}  // namespace

std::vector<std::string> parameter_names(const Model& model, const ParamGroups& groups) {
  std::vector<std::string> names;
  visit_params(model, groups, [&](const std::string& name, const Tensor&) { names.push_back(name); });
  return names;
}

std::vector<ParamRef> model_parameters(Model& model, const std::vector<Tensor>& grads, const ParamGroups& groups) {
  std::vector<ParamRef> refs;
  visit_params(model, groups, [&](const std::string& name, Tensor& value) {
    refs.push_back({name, &value, nullptr});
  });
  if (refs.size() != grads.size()) {
    throw std::invalid_argument("expected " + std::to_string(refs.size()) + " gradients, got " +
                                std::to_string(grads.size()));
  }
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (grads[i].shape() != refs[i].value->shape()) {
      throw ShapeError("gradient for " + refs[i].name + " has shape " + shape_to_string(grads[i].shape()) +
                       ", parameter has " + shape_to_string(refs[i].value->shape()));
    }
    refs[i].grad = &grads[i];
  }
  return refs;
}

std::vector<const Tensor*> parameter_values(const Model& model, const ParamGroups& groups) {
  std::vector<const Tensor*> out;
  visit_params(model, groups, [&](const std::string&, const Tensor& value) { out.push_back(&value); });
  return out;
}

}  // namespace s2cn
