#include "s2cn/numkit/conv.hpp"

#include <algorithm>
#include <string>

#include "s2cn/numkit/errors.hpp"

namespace s2cn {

namespace {

struct Batched {
  Tensor t;
  bool was_single = false;
};

Batched as_batch(const Tensor& t, const char* what) {
  if (t.rank() == 4) return {t, false};
  if (t.rank() == 3) return {t.reshaped({1, t.extent(0), t.extent(1), t.extent(2)}), true};
  throw ShapeError(std::string(what) + ": expected a (channels, height, width) stack or a batch of them, got " +
                   shape_to_string(t.shape()));
}

Tensor unbatch(Tensor t, bool single) {
  if (!single) return t;
  return std::move(t).reshaped({t.extent(1), t.extent(2), t.extent(3)});
}

void apply_activation(Tensor& t, Activation act) {
  if (act != Activation::relu) return;
  for (double& v : t.values()) v = v > 0.0 ? v : 0.0;
}

// Multiplies the upstream gradient by the activation derivative.
Tensor masked_gradient(const Tensor& grad_out, const ConvCache& cache) {
  Tensor g = grad_out;
  if (cache.activation == Activation::relu) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(cache.output[i] > 0.0)) g[i] = 0.0;
    }
  }
  return g;
}

void require_cache(const ConvCache& cache, const char* what) {
  if (!cache.valid()) throw std::invalid_argument(std::string(what) + ": missing forward cache");
}

}  // namespace

std::size_t strided_extent(std::size_t in) { return (in + kStride - 1) / kStride; }

std::size_t pad_before(std::size_t in, std::size_t kernel) {
  const std::size_t out = strided_extent(in);
  const std::size_t span = kStride * (out - 1) + kernel;
  const std::size_t total = span > in ? span - in : 0;
  return total / 2;
}

Tensor conv2d_forward(const Tensor& input, const Tensor& kernels, const Tensor& biases, Activation act,
                      ConvCache* cache) {
  Batched in = as_batch(input, "conv2d_forward input");
  require_rank(kernels, 4, "conv2d_forward kernels");
  const Tensor& x = in.t;
  const std::size_t n = x.extent(0), ci = x.extent(1), h = x.extent(2), w = x.extent(3);
  const std::size_t co = kernels.extent(0), kh = kernels.extent(2), kw = kernels.extent(3);
  if (kernels.extent(1) != ci) {
    throw ShapeError("conv2d_forward: kernels expect " + std::to_string(kernels.extent(1)) +
                     " input channels but input " + shape_to_string(input.shape()) + " has " + std::to_string(ci));
  }
  require_shape(biases, {co}, "conv2d_forward biases");
  if (h == 0 || w == 0) throw ShapeError("conv2d_forward: empty spatial extent " + shape_to_string(input.shape()));

  const std::size_t oh = strided_extent(h), ow = strided_extent(w);
  const long pt = static_cast<long>(pad_before(h, kh)), pl = static_cast<long>(pad_before(w, kw));
  Tensor out({n, co, oh, ow});
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t o = 0; o < co; ++o) {
      for (std::size_t oy = 0; oy < oh; ++oy) {
        for (std::size_t ox = 0; ox < ow; ++ox) {
          double s = biases[o];
          for (std::size_t c = 0; c < ci; ++c) {
            for (std::size_t ky = 0; ky < kh; ++ky) {
              const long iy = static_cast<long>(kStride * oy + ky) - pt;
              if (iy < 0 || iy >= static_cast<long>(h)) continue;
              for (std::size_t kx = 0; kx < kw; ++kx) {
                const long ix = static_cast<long>(kStride * ox + kx) - pl;
                if (ix < 0 || ix >= static_cast<long>(w)) continue;
                s += kernels(o, c, ky, kx) * x(b, c, static_cast<std::size_t>(iy), static_cast<std::size_t>(ix));
              }
            }
          }
          out(b, o, oy, ox) = s;
        }
      }
    }
  }
  apply_activation(out, act);
  if (cache) {
    cache->input = x;
    cache->output = out;
    cache->activation = act;
  }
  return unbatch(std::move(out), in.was_single);
}

ConvGrads conv2d_backward(const Tensor& grad_out, const ConvCache& cache, const Tensor& kernels) {
  require_cache(cache, "conv2d_backward");
  Batched go = as_batch(grad_out, "conv2d_backward grad_out");
  require_shape(go.t, cache.output.shape(), "conv2d_backward grad_out");
  const Tensor g = masked_gradient(go.t, cache);
  const Tensor& x = cache.input;
  const std::size_t n = x.extent(0), ci = x.extent(1), h = x.extent(2), w = x.extent(3);
  const std::size_t co = kernels.extent(0), kh = kernels.extent(2), kw = kernels.extent(3);
  const std::size_t oh = g.extent(2), ow = g.extent(3);
  const long pt = static_cast<long>(pad_before(h, kh)), pl = static_cast<long>(pad_before(w, kw));

  ConvGrads grads{Tensor(x.shape()), Tensor(kernels.shape()), Tensor({co})};
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t o = 0; o < co; ++o) {
      for (std::size_t oy = 0; oy < oh; ++oy) {
        for (std::size_t ox = 0; ox < ow; ++ox) {
          const double gv = g(b, o, oy, ox);
          if (gv == 0.0) continue;
          grads.biases[o] += gv;
          for (std::size_t c = 0; c < ci; ++c) {
            for (std::size_t ky = 0; ky < kh; ++ky) {
              const long iy = static_cast<long>(kStride * oy + ky) - pt;
              if (iy < 0 || iy >= static_cast<long>(h)) continue;
              for (std::size_t kx = 0; kx < kw; ++kx) {
                const long ix = static_cast<long>(kStride * ox + kx) - pl;
                if (ix < 0 || ix >= static_cast<long>(w)) continue;
                const auto uy = static_cast<std::size_t>(iy), ux = static_cast<std::size_t>(ix);
                grads.kernels(o, c, ky, kx) += gv * x(b, c, uy, ux);
                grads.input(b, c, uy, ux) += gv * kernels(o, c, ky, kx);
              }
            }
          }
        }
      }
    }
  }
  grads.input = unbatch(std::move(grads.input), go.was_single);
  return grads;
}

Tensor deconv2d_forward(const Tensor& input, const Tensor& kernels, const Tensor& biases, std::size_t out_h,
                        std::size_t out_w, Activation act, ConvCache* cache) {
  Batched in = as_batch(input, "deconv2d_forward input");
  require_rank(kernels, 4, "deconv2d_forward kernels");
  const Tensor& x = in.t;
  const std::size_t n = x.extent(0), ci = x.extent(1), h = x.extent(2), w = x.extent(3);
  const std::size_t co = kernels.extent(1), kh = kernels.extent(2), kw = kernels.extent(3);
  if (kernels.extent(0) != ci) {
    throw ShapeError("deconv2d_forward: kernels expect " + std::to_string(kernels.extent(0)) +
                     " input channels but input " + shape_to_string(input.shape()) + " has " + std::to_string(ci));
  }
  require_shape(biases, {co}, "deconv2d_forward biases");
  if (out_h == 0 || out_w == 0 || strided_extent(out_h) != h || strided_extent(out_w) != w) {
    throw ShapeError("deconv2d_forward: target extent " + std::to_string(out_h) + "x" + std::to_string(out_w) +
                     " is unreachable from input " + shape_to_string(input.shape()));
  }
  const long pt = static_cast<long>(pad_before(out_h, kh)), pl = static_cast<long>(pad_before(out_w, kw));
  Tensor out({n, co, out_h, out_w});
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t o = 0; o < co; ++o) {
      for (std::size_t y = 0; y < out_h; ++y)
        for (std::size_t xx = 0; xx < out_w; ++xx) out(b, o, y, xx) = biases[o];
    }
    for (std::size_t c = 0; c < ci; ++c) {
      for (std::size_t iy = 0; iy < h; ++iy) {
        for (std::size_t ix = 0; ix < w; ++ix) {
          const double v = x(b, c, iy, ix);
          if (v == 0.0) continue;
          for (std::size_t o = 0; o < co; ++o) {
            for (std::size_t ky = 0; ky < kh; ++ky) {
              const long oy = static_cast<long>(kStride * iy + ky) - pt;
              if (oy < 0 || oy >= static_cast<long>(out_h)) continue;
              for (std::size_t kx = 0; kx < kw; ++kx) {
                const long ox = static_cast<long>(kStride * ix + kx) - pl;
                if (ox < 0 || ox >= static_cast<long>(out_w)) continue;
                out(b, o, static_cast<std::size_t>(oy), static_cast<std::size_t>(ox)) += kernels(c, o, ky, kx) * v;
              }
            }
          }
        }
      }
    }
  }
  apply_activation(out, act);
  if (cache) {
    cache->input = x;
    cache->output = out;
    cache->activation = act;
  }
  return unbatch(std::move(out), in.was_single);
}

ConvGrads deconv2d_backward(const Tensor& grad_out, const ConvCache& cache, const Tensor& kernels) {
  require_cache(cache, "deconv2d_backward");
  Batched go = as_batch(grad_out, "deconv2d_backward grad_out");
  require_shape(go.t, cache.output.shape(), "deconv2d_backward grad_out");
  const Tensor g = masked_gradient(go.t, cache);
  const Tensor& x = cache.input;
  const std::size_t n = x.extent(0), ci = x.extent(1), h = x.extent(2), w = x.extent(3);
  const std::size_t co = kernels.extent(1), kh = kernels.extent(2), kw = kernels.extent(3);
  const std::size_t out_h = g.extent(2), out_w = g.extent(3);
  const long pt = static_cast<long>(pad_before(out_h, kh)), pl = static_cast<long>(pad_before(out_w, kw));

  ConvGrads grads{Tensor(x.shape()), Tensor(kernels.shape()), Tensor({co})};
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t o = 0; o < co; ++o) {
      double s = 0.0;
      for (std::size_t y = 0; y < out_h; ++y)
        for (std::size_t xx = 0; xx < out_w; ++xx) s += g(b, o, y, xx);
      grads.biases[o] += s;
    }
    for (std::size_t c = 0; c < ci; ++c) {
      for (std::size_t iy = 0; iy < h; ++iy) {
        for (std::size_t ix = 0; ix < w; ++ix) {
          const double v = x(b, c, iy, ix);
          double acc = 0.0;
          for (std::size_t o = 0; o < co; ++o) {
            for (std::size_t ky = 0; ky < kh; ++ky) {
              const long oy = static_cast<long>(kStride * iy + ky) - pt;
              if (oy < 0 || oy >= static_cast<long>(out_h)) continue;
              for (std::size_t kx = 0; kx < kw; ++kx) {
                const long ox = static_cast<long>(kStride * ix + kx) - pl;
                if (ox < 0 || ox >= static_cast<long>(out_w)) continue;
                const double gv = g(b, o, static_cast<std::size_t>(oy), static_cast<std::size_t>(ox));
                acc += kernels(c, o, ky, kx) * gv;
                grads.kernels(c, o, ky, kx) += v * gv;
              }
            }
          }
          grads.input(b, c, iy, ix) = acc;
        }
      }
    }
  }
  grads.input = unbatch(std::move(grads.input), go.was_single);
  return grads;
}

}  // namespace s2cn
