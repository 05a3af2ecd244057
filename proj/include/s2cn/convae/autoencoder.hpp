#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "s2cn/convae/conv_stack.hpp"
#include "s2cn/numkit/adam.hpp"
#include "s2cn/numkit/errors.hpp"

namespace s2cn {

/// Reconstruction error (1 / 2N) * ||X - Xhat||_F^2 over N images.
double recon_loss(const Tensor& x, const Tensor& x_hat);

/// d recon_loss / d x_hat = (x_hat - x) / N.
Tensor recon_loss_grad(const Tensor& x, const Tensor& x_hat);

struct CaeConfig {
  std::size_t epochs = 1000;
  AdamSettings adam;
};

/// Thrown when a loss becomes non-finite; carries the losses recorded so far.
class DivergenceError : public NumericError {
 public:
  DivergenceError(const std::string& what, std::vector<double> history)
      : NumericError(what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

/// Full-batch Adam on the reconstruction loss only. Returns the loss measured
/// at the start of every epoch followed by the loss after the last update,
/// so the result has epochs + 1 entries.
std::vector<double> pretrain_cae(const Tensor& images, ConvStack& encoder, ConvStack& decoder,
                                 const CaeConfig& config);

/// Reconstruction loss of decode(encode(images)) and its gradients. Output
/// order matches `cae_parameters`.
struct CaeGradient {
  double loss = 0.0;
  std::vector<Tensor> grads;
};
CaeGradient cae_loss_and_gradient(const Tensor& images, const ConvStack& encoder, const ConvStack& decoder);

std::vector<ParamRef> cae_parameters(ConvStack& encoder, ConvStack& decoder, const std::vector<Tensor>& grads);

}  // namespace s2cn
