#include "s2cn/trainer/objective.hpp"

#include <cmath>
#include <stdexcept>

#include "s2cn/convae/autoencoder.hpp"
#include "s2cn/numkit/errors.hpp"
#include "s2cn/numkit/linalg.hpp"
#include "s2cn/spectral/spectral.hpp"

namespace s2cn {

std::size_t TrainData::size() const {
  if (!images.empty()) return images.extent(0);
  return features.empty() ? 0 : features.cols();
}

LossWeights training_weights(const HyperParams& hyper) {
  return {1.0, hyper.gamma1, hyper.gamma2, hyper.gamma3, hyper.gamma4};
}

double total_loss(const LossBreakdown& parts, const HyperParams& hyper) {
  const double values[] = {parts.l0, parts.l1, parts.l2, parts.l3, parts.l4};
  const char* names[] = {"L0", "L1", "L2", "L3", "L4"};
  for (int i = 0; i < 5; ++i) {
    if (!std::isfinite(values[i])) throw NumericError(std::string("loss component ") + names[i] + " is not finite");
  }
  return parts.l0 + hyper.gamma1 * parts.l1 + hyper.gamma2 * parts.l2 + hyper.gamma3 * parts.l3 +
         hyper.gamma4 * parts.l4;
}

std::vector<Tensor> combine_gradients(std::span<const std::vector<Tensor>> per_component, const LossWeights& weights) {
  if (per_component.size() != weights.size()) {
    throw std::invalid_argument("need one gradient list per loss component");
  }
  std::vector<Tensor> out;
  for (std::size_t c = 0; c < per_component.size(); ++c) {
    const auto& grads = per_component[c];
    if (out.empty()) {
      for (const Tensor& g : grads) out.emplace_back(g.shape(), 0.0);
    }
    if (grads.size() != out.size()) throw std::invalid_argument("gradient lists differ in length");
    for (std::size_t i = 0; i < grads.size(); ++i) add_scaled(out[i], weights[c], grads[i]);
  }
  return out;
}

Evaluation evaluate_objective(const Model& model, const TrainData& data, const Supervision& supervision,
                              const ObjectiveOptions& options) {
  const LossWeights& w = options.weights;
  const bool conv = model.has_conv();
  const bool use_c = options.use_coefficients && !model.coefficients.empty();
  const bool supervised = !supervision.q.empty();
  const bool head_on = supervised && model.has_head();
  const bool grad = options.compute_gradient;

  Evaluation ev;

  EncodeResult enc;
  Shape map_shape;
  if (conv) {
    enc = encode(data.images, model.encoder);
    ev.z = enc.z;
    map_shape = {enc.top.extent(1), enc.top.extent(2), enc.top.extent(3)};
  } else {
    if (data.features.empty()) throw std::invalid_argument("model has no encoder and the data has no features");
    ev.z = data.features;
  }
  const Tensor& z = ev.z;
  const std::size_t n_samples = z.cols();
  if (use_c) require_shape(model.coefficients, {n_samples, n_samples}, "self-expression coefficients");

  Tensor zc = use_c ? matmul(z, model.coefficients) : z;

  DecodeResult dec;
  if (conv) {
    dec = decode(features_to_maps(zc, map_shape), model.decoder);
    ev.parts.l0 = recon_loss(data.images, dec.images);
  }

  SelfExpressionLosses se;
  if (use_c) {
    se = selfexpr_losses(z, model.coefficients, options.regularizer);
    ev.parts.l1 = se.reg;
    ev.parts.l2 = se.fit;
  }

  WeightedNorm l3;
  if (use_c && supervised) {
    l3 = q_weighted_norm(model.coefficients, supervision.q);
    ev.parts.l3 = l3.value;
  }

  FcForward fc;
  CecResult cec;
  if (head_on) {
    fc = fc_forward(z, model.head);
    ev.centers = options.refresh_centers ? update_centers(fc.y, supervision.labels, model.head.centers)
                                         : model.head.centers;
    cec = cec_loss(fc.y, fc.prob, supervision.q, ev.centers, options.tau, options.cross_entropy);
    ev.parts.l4 = cec.loss;
  }

  ev.parts.total = w[0] * ev.parts.l0 + w[1] * ev.parts.l1 + w[2] * ev.parts.l2 + w[3] * ev.parts.l3 +
                   w[4] * ev.parts.l4;
  if (!grad) return ev;

  Tensor gz(z.shape(), 0.0);
  Tensor gc;
  if (use_c) gc = Tensor(model.coefficients.shape(), 0.0);

  StackGrads dec_grads;
  if (conv) {
    Tensor gimg = recon_loss_grad(data.images, dec.images);
    scale(gimg, w[0]);
    dec_grads = decoder_backward(gimg, dec.caches, model.decoder);
    const Tensor gzc = maps_to_features(dec_grads.input);
    if (use_c) {
      add_scaled(gc, 1.0, matmul_tn(z, gzc));
      add_scaled(gz, 1.0, matmul_nt(gzc, model.coefficients));
    } else {
      add_scaled(gz, 1.0, gzc);
    }
  }
  if (use_c) {
    add_scaled(gc, w[1], se.grad_c_reg);
    add_scaled(gc, w[2], se.grad_c_fit);
    add_scaled(gz, w[2], se.grad_z);
    if (supervised) add_scaled(gc, w[3], l3.grad);
    project_diag_zero(gc);
  }

  HeadGrads hg;
  const bool head_grads = model.has_head() && options.groups.head;
  if (head_on && w[4] != 0.0) {
    Tensor gy = cec.grad_y;
    scale(gy, w[4]);
    hg = fc_backward(gy, fc, z, model.head);
    add_scaled(gz, 1.0, hg.z);
  } else if (head_grads) {
    const ClassifierHead& h = model.head;
    hg.w1 = Tensor(h.w1.shape(), 0.0);
    hg.b1 = Tensor(h.b1.shape(), 0.0);
    hg.w2 = Tensor(h.w2.shape(), 0.0);
    hg.b2 = Tensor(h.b2.shape(), 0.0);
    hg.w3 = Tensor(h.w3.shape(), 0.0);
    hg.b3 = Tensor(h.b3.shape(), 0.0);
  }

  if (conv && options.groups.conv) {
    StackGrads enc_grads = encoder_backward(features_to_maps(gz, map_shape), enc.caches, model.encoder);
    for (std::size_t k = 0; k < enc_grads.kernels.size(); ++k) {
      ev.grads.push_back(std::move(enc_grads.kernels[k]));
      ev.grads.push_back(std::move(enc_grads.biases[k]));
    }
    for (std::size_t k = 0; k < dec_grads.kernels.size(); ++k) {
      ev.grads.push_back(std::move(dec_grads.kernels[k]));
      ev.grads.push_back(std::move(dec_grads.biases[k]));
    }
  }
  if (options.groups.coefficients && !model.coefficients.empty()) {
    ev.grads.push_back(use_c ? std::move(gc) : Tensor(model.coefficients.shape(), 0.0));
  }
  if (head_grads) {
    ev.grads.push_back(std::move(hg.w1));
    ev.grads.push_back(std::move(hg.b1));
    ev.grads.push_back(std::move(hg.w2));
    ev.grads.push_back(std::move(hg.b2));
    ev.grads.push_back(std::move(hg.w3));
    ev.grads.push_back(std::move(hg.b3));
  }
  return ev;
}

}  // namespace s2cn
