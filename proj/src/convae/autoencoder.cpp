#include "s2cn/convae/autoencoder.hpp"

#include <cmath>
#include <string>

#include "s2cn/numkit/linalg.hpp"

namespace s2cn {

namespace {

Tensor as_stack_of_images(const Tensor& t) {
  if (t.rank() == 4 && t.extent(1) == 1) return t.reshaped({t.extent(0), t.extent(2), t.extent(3)});
  return t;
}

}  // namespace

double recon_loss(const Tensor& x, const Tensor& x_hat) {
  const Tensor a = as_stack_of_images(x), b = as_stack_of_images(x_hat);
  require_shape(b, a.shape(), "recon_loss");
  if (a.rank() == 0 || a.extent(0) == 0) throw ShapeError("recon_loss: no images");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s / (2.0 * static_cast<double>(a.extent(0)));
}

Tensor recon_loss_grad(const Tensor& x, const Tensor& x_hat) {
  const Tensor a = as_stack_of_images(x);
  Tensor g = as_stack_of_images(x_hat);
  require_shape(g, a.shape(), "recon_loss_grad");
  const double inv_n = 1.0 / static_cast<double>(a.extent(0));
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = (g[i] - a[i]) * inv_n;
  return g;
}

CaeGradient cae_loss_and_gradient(const Tensor& images, const ConvStack& encoder, const ConvStack& decoder) {
  EncodeResult enc = encode(images, encoder);
  DecodeResult dec = decode(enc.top, decoder);
  const Tensor x = as_stack_of_images(images);
  CaeGradient out;
  out.loss = recon_loss(x, dec.images);
  StackGrads dg = decoder_backward(recon_loss_grad(x, dec.images), dec.caches, decoder);
  StackGrads eg = encoder_backward(dg.input, enc.caches, encoder);
  for (std::size_t k = 0; k < encoder.layers.size(); ++k) {
    out.grads.push_back(std::move(eg.kernels[k]));
    out.grads.push_back(std::move(eg.biases[k]));
  }
  for (std::size_t k = 0; k < decoder.layers.size(); ++k) {
    out.grads.push_back(std::move(dg.kernels[k]));
    out.grads.push_back(std::move(dg.biases[k]));
  }
  return out;
}

std::vector<ParamRef> cae_parameters(ConvStack& encoder, ConvStack& decoder, const std::vector<Tensor>& grads) {
  std::vector<ParamRef> params;
  std::size_t g = 0;
  auto add = [&](const std::string& name, Tensor& value) {
    params.push_back({name, &value, g < grads.size() ? &grads[g] : nullptr});
    ++g;
  };
  for (std::size_t k = 0; k < encoder.layers.size(); ++k) {
    add("encoder." + std::to_string(k) + ".kernels", encoder.layers[k].kernels);
    add("encoder." + std::to_string(k) + ".biases", encoder.layers[k].biases);
  }
  for (std::size_t k = 0; k < decoder.layers.size(); ++k) {
    add("decoder." + std::to_string(k) + ".kernels", decoder.layers[k].kernels);
    add("decoder." + std::to_string(k) + ".biases", decoder.layers[k].biases);
  }
  return params;
}

std::vector<double> pretrain_cae(const Tensor& images, ConvStack& encoder, ConvStack& decoder,
                                 const CaeConfig& config) {
  spec_from_stacks(encoder, decoder);
  OptimState state(config.adam);
  std::vector<double> history;
  history.reserve(config.epochs + 1);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    CaeGradient step = cae_loss_and_gradient(images, encoder, decoder);
    history.push_back(step.loss);
    if (!std::isfinite(step.loss)) {
      throw DivergenceError("pretrain_cae: reconstruction loss became non-finite at epoch " + std::to_string(epoch),
                            history);
    }
    std::vector<ParamRef> params = cae_parameters(encoder, decoder, step.grads);
    adam_step(params, state);
  }
  const double final_loss = recon_loss(images, decode(encode(images, encoder).top, decoder).images);
  history.push_back(final_loss);
  if (!std::isfinite(final_loss)) throw DivergenceError("pretrain_cae: final loss is non-finite", history);
  return history;
}

}  // namespace s2cn
