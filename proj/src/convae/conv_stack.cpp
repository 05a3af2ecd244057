#include "s2cn/convae/conv_stack.hpp"

#include <cmath>
#include <string>

#include "s2cn/numkit/errors.hpp"
#include "s2cn/numkit/linalg.hpp"

namespace s2cn {

namespace {

void require_spec(const NetworkSpec& spec) {
  if (spec.height == 0 || spec.width == 0) throw ShapeError("network spec: image extent must be positive");
  if (spec.encoder.empty()) throw ShapeError("network spec: encoder has no layers");
  for (const LayerSpec& l : spec.encoder) {
    if (l.kernel_h == 0 || l.kernel_w == 0 || l.channels == 0) {
      throw ShapeError("network spec: kernel extents and channel counts must be positive");
    }
  }
}

Tensor kaiming_uniform(const Shape& shape, std::size_t fan_in, RngStream& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  Tensor t(shape);
  for (double& v : t.values()) v = rng.uniform(-bound, bound);
  return t;
}

Tensor as_image_batch(const Tensor& images) {
  if (images.rank() == 3) return images.reshaped({images.extent(0), 1, images.extent(1), images.extent(2)});
  if (images.rank() == 4) {
    if (images.extent(1) != 1) throw ShapeError("encode: images must have one channel, got " + shape_to_string(images.shape()));
    return images;
  }
  throw ShapeError("encode: expected (N, H, W) images, got " + shape_to_string(images.shape()));
}

}  // namespace

std::vector<Extent> encoder_extents(const NetworkSpec& spec) {
  require_spec(spec);
  std::vector<Extent> out{{spec.height, spec.width}};
  for (std::size_t i = 0; i < spec.encoder.size(); ++i) {
    out.push_back({strided_extent(out.back().h), strided_extent(out.back().w)});
  }
  return out;
}

Shape top_map_shape(const NetworkSpec& spec) {
  const Extent top = encoder_extents(spec).back();
  return {spec.encoder.back().channels, top.h, top.w};
}

std::size_t feature_dim(const NetworkSpec& spec) { return shape_size(top_map_shape(spec)); }

std::size_t ConvStack::in_channels() const {
  if (layers.empty()) return 0;
  return role == StackRole::encoder ? layers.front().kernels.extent(1) : layers.front().kernels.extent(0);
}

std::size_t ConvStack::out_channels() const {
  if (layers.empty()) return 0;
  return role == StackRole::encoder ? layers.back().kernels.extent(0) : layers.back().kernels.extent(1);
}

ConvStack make_encoder(const NetworkSpec& spec, RngStream& rng) {
  require_spec(spec);
  ConvStack stack{StackRole::encoder, {}};
  std::size_t in = 1;
  for (const LayerSpec& l : spec.encoder) {
    ConvLayer layer;
    layer.kernels = kaiming_uniform({l.channels, in, l.kernel_h, l.kernel_w}, in * l.kernel_h * l.kernel_w, rng);
    layer.biases = Tensor({l.channels});
    stack.layers.push_back(std::move(layer));
    in = l.channels;
  }
  return stack;
}

ConvStack make_decoder(const NetworkSpec& spec, RngStream& rng) {
  const std::vector<Extent> extents = encoder_extents(spec);
  ConvStack stack{StackRole::decoder, {}};
  const std::size_t depth = spec.encoder.size();
  for (std::size_t k = 0; k < depth; ++k) {
    const std::size_t mirrored = depth - 1 - k;
    const LayerSpec& l = spec.encoder[mirrored];
    const std::size_t in = l.channels;
    const std::size_t out = mirrored == 0 ? 1 : spec.encoder[mirrored - 1].channels;
    ConvLayer layer;
    layer.kernels = kaiming_uniform({in, out, l.kernel_h, l.kernel_w}, in * l.kernel_h * l.kernel_w, rng);
    layer.biases = Tensor({out});
    layer.target = extents[mirrored];
    stack.layers.push_back(std::move(layer));
  }
  return stack;
}

void validate_stack(const ConvStack& stack) {
  if (stack.layers.empty()) throw ShapeError("conv stack has no layers");
  std::size_t prev_out = 0;
  for (std::size_t i = 0; i < stack.layers.size(); ++i) {
    const ConvLayer& l = stack.layers[i];
    require_rank(l.kernels, 4, "conv stack kernels");
    const bool enc = stack.role == StackRole::encoder;
    const std::size_t in = enc ? l.kernels.extent(1) : l.kernels.extent(0);
    const std::size_t out = enc ? l.kernels.extent(0) : l.kernels.extent(1);
    require_shape(l.biases, {out}, "conv stack biases");
    if (i > 0 && in != prev_out) {
      throw ShapeError("conv stack layer " + std::to_string(i) + " expects " + std::to_string(in) +
                       " channels but the previous layer emits " + std::to_string(prev_out));
    }
    if (!enc && (l.target.h == 0 || l.target.w == 0)) {
      throw ShapeError("decoder layer " + std::to_string(i) + " has no target extent");
    }
    prev_out = out;
  }
}

NetworkSpec spec_from_stacks(const ConvStack& encoder, const ConvStack& decoder) {
  validate_stack(encoder);
  validate_stack(decoder);
  if (encoder.layers.size() != decoder.layers.size()) {
    throw ShapeError("encoder and decoder depths differ");
  }
  NetworkSpec spec;
  spec.height = decoder.layers.back().target.h;
  spec.width = decoder.layers.back().target.w;
  for (const ConvLayer& l : encoder.layers) {
    spec.encoder.push_back({l.kernels.extent(2), l.kernels.extent(3), l.kernels.extent(0)});
  }
  const std::vector<Extent> extents = encoder_extents(spec);
  for (std::size_t k = 0; k < decoder.layers.size(); ++k) {
    if (decoder.layers[k].target != extents[decoder.layers.size() - 1 - k]) {
      throw ShapeError("decoder layer " + std::to_string(k) + " does not mirror the encoder geometry");
    }
  }
  return spec;
}

Tensor features_to_maps(const Tensor& z, const Shape& map_shape) {
  require_rank(z, 2, "features_to_maps");
  if (z.rows() != shape_size(map_shape)) {
    throw ShapeError("features_to_maps: feature dimension " + std::to_string(z.rows()) + " does not match maps " +
                     shape_to_string(map_shape));
  }
  return transpose(z).reshaped({z.cols(), map_shape[0], map_shape[1], map_shape[2]});
}

Tensor maps_to_features(const Tensor& maps) {
  require_rank(maps, 4, "maps_to_features");
  const std::size_t n = maps.extent(0);
  return transpose(maps.reshaped({n, maps.size() / (n ? n : 1)}));
}

EncodeResult encode(const Tensor& images, const ConvStack& encoder) {
  if (encoder.role != StackRole::encoder) throw std::invalid_argument("encode: stack is not an encoder");
  validate_stack(encoder);
  Tensor x = as_image_batch(images);
  if (encoder.in_channels() != 1) throw ShapeError("encode: encoder must take single-channel images");
  EncodeResult result;
  result.caches.resize(encoder.layers.size());
  for (std::size_t i = 0; i < encoder.layers.size(); ++i) {
    const ConvLayer& l = encoder.layers[i];
    x = conv2d_forward(x, l.kernels, l.biases, Activation::relu, &result.caches[i]);
  }
  result.z = maps_to_features(x);
  result.top = std::move(x);
  return result;
}

DecodeResult decode(const Tensor& maps, const ConvStack& decoder) {
  if (decoder.role != StackRole::decoder) throw std::invalid_argument("decode: stack is not a decoder");
  validate_stack(decoder);
  require_rank(maps, 4, "decode maps");
  const ConvLayer& first = decoder.layers.front();
  const Extent expected{strided_extent(first.target.h), strided_extent(first.target.w)};
  if (maps.extent(1) != decoder.in_channels() || maps.extent(2) != expected.h || maps.extent(3) != expected.w) {
    throw ShapeError("decode: maps " + shape_to_string(maps.shape()) + " do not match the decoder input (" +
                     std::to_string(decoder.in_channels()) + ", " + std::to_string(expected.h) + ", " +
                     std::to_string(expected.w) + ")");
  }
  DecodeResult result;
  result.caches.resize(decoder.layers.size());
  Tensor x = maps;
  for (std::size_t i = 0; i < decoder.layers.size(); ++i) {
    const ConvLayer& l = decoder.layers[i];
    x = deconv2d_forward(x, l.kernels, l.biases, l.target.h, l.target.w, Activation::relu, &result.caches[i]);
  }
  const std::size_t n = x.extent(0), h = x.extent(2), w = x.extent(3);
  result.images = std::move(x).reshaped({n, h, w});
  return result;
}

StackGrads encoder_backward(const Tensor& grad_top, const std::vector<ConvCache>& caches, const ConvStack& encoder) {
  if (caches.size() != encoder.layers.size()) throw std::invalid_argument("encoder_backward: missing forward cache");
  StackGrads grads;
  grads.kernels.resize(encoder.layers.size());
  grads.biases.resize(encoder.layers.size());
  Tensor g = grad_top;
  for (std::size_t k = encoder.layers.size(); k-- > 0;) {
    ConvGrads lg = conv2d_backward(g, caches[k], encoder.layers[k].kernels);
    grads.kernels[k] = std::move(lg.kernels);
    grads.biases[k] = std::move(lg.biases);
    g = std::move(lg.input);
  }
  grads.input = std::move(g);
  return grads;
}

StackGrads decoder_backward(const Tensor& grad_images, const std::vector<ConvCache>& caches,
                            const ConvStack& decoder) {
  if (caches.size() != decoder.layers.size()) throw std::invalid_argument("decoder_backward: missing forward cache");
  StackGrads grads;
  grads.kernels.resize(decoder.layers.size());
  grads.biases.resize(decoder.layers.size());
  Tensor g = grad_images.rank() == 3
                 ? grad_images.reshaped({grad_images.extent(0), 1, grad_images.extent(1), grad_images.extent(2)})
                 : grad_images;
  for (std::size_t k = decoder.layers.size(); k-- > 0;) {
    ConvGrads lg = deconv2d_backward(g, caches[k], decoder.layers[k].kernels);
    grads.kernels[k] = std::move(lg.kernels);
    grads.biases[k] = std::move(lg.biases);
    g = std::move(lg.input);
  }
  grads.input = std::move(g);
  return grads;
}

}  // namespace s2cn
