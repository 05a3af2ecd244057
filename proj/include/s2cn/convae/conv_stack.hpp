#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "s2cn/numkit/conv.hpp"
#include "s2cn/numkit/rng.hpp"
#include "s2cn/numkit/tensor.hpp"

namespace s2cn {

struct LayerSpec {
  std::size_t kernel_h = 3;
  std::size_t kernel_w = 3;
  std::size_t channels = 1;
};

/// Encoder geometry for single-channel images. The decoder is always the
/// layer-for-layer mirror of the encoder and ends in one channel.
struct NetworkSpec {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<LayerSpec> encoder;
};

struct Extent {
  std::size_t h = 0;
  std::size_t w = 0;
  bool operator==(const Extent&) const = default;
};

/// Spatial extents seen by the encoder: entry 0 is the image, entry k the
/// output of layer k.
std::vector<Extent> encoder_extents(const NetworkSpec& spec);

/// Shape (channels, h, w) of the top encoder layer.
Shape top_map_shape(const NetworkSpec& spec);

/// Feature dimension p: top-layer map area times its channel count.
std::size_t feature_dim(const NetworkSpec& spec);

enum class StackRole { encoder, decoder };

struct ConvLayer {
  Tensor kernels;  // encoder: (out, in, kh, kw); decoder: (in, out, kh, kw)
  Tensor biases;
  Extent target;   // decoder only: output extent, equal to the mirrored encoder input
};

struct ConvStack {
  StackRole role = StackRole::encoder;
  std::vector<ConvLayer> layers;

  std::size_t in_channels() const;
  std::size_t out_channels() const;
};

/// Kaiming-uniform kernels, zero biases.
ConvStack make_encoder(const NetworkSpec& spec, RngStream& rng);
ConvStack make_decoder(const NetworkSpec& spec, RngStream& rng);

/// Checks that consecutive layers chain their channel counts.
void validate_stack(const ConvStack& stack);

/// Recovers the geometry of an encoder/decoder pair.
NetworkSpec spec_from_stacks(const ConvStack& encoder, const ConvStack& decoder);

struct EncodeResult {
  Tensor z;    // p x N, column j is the flattened top-layer stack of image j
  Tensor top;  // (N, channels, h, w)
  std::vector<ConvCache> caches;
};

/// images: (N, H, W) or (N, 1, H, W).
EncodeResult encode(const Tensor& images, const ConvStack& encoder);

struct DecodeResult {
  Tensor images;  // (N, H, W)
  std::vector<ConvCache> caches;
};

/// maps: (N, channels, h, w) matching the encoder's top layer.
DecodeResult decode(const Tensor& maps, const ConvStack& decoder);

/// p x N feature matrix <-> (N, channels, h, w) map stack.
Tensor features_to_maps(const Tensor& z, const Shape& map_shape);
Tensor maps_to_features(const Tensor& maps);

struct StackGrads {
  std::vector<Tensor> kernels;
  std::vector<Tensor> biases;
  Tensor input;  // gradient w.r.t. the stack input
};

StackGrads encoder_backward(const Tensor& grad_top, const std::vector<ConvCache>& caches, const ConvStack& encoder);

/// grad_images: (N, H, W). The returned input gradient has the map shape.
StackGrads decoder_backward(const Tensor& grad_images, const std::vector<ConvCache>& caches,
                            const ConvStack& decoder);

}  // namespace s2cn
