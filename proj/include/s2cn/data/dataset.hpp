#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "s2cn/numkit/tensor.hpp"
#include "s2cn/spectral/spectral.hpp"

namespace s2cn {

/// N grayscale images with pixels in [0, 1], optional ground truth in
/// 1..clusters, and optional raw feature columns (p x N) for runs that skip
/// the convolutional path.
struct ImageDataset {
  std::string name;
  Tensor images;               // N x H x W
  std::vector<Label> labels;   // empty when no ground truth
  std::size_t clusters = 0;
  Tensor features;             // empty unless provided
  std::string resampler;       // filter used to resize the source images, if recorded

  std::size_t size() const { return images.empty() ? (features.empty() ? 0 : features.cols()) : images.extent(0); }
  bool has_truth() const noexcept { return !labels.empty(); }
};

/// Throws std::invalid_argument describing the first violated invariant.
void validate_dataset(const ImageDataset& ds);

/// Manifest keys: name, n, tensor (N x H x W TensorFile), labels (CSV,
/// optional), features (p x N TensorFile, optional). Relative paths are
/// resolved against the manifest's directory. Pixel tensors whose maximum
/// exceeds 1 are taken as 0-255 and divided by 255.
ImageDataset load_dataset(const std::filesystem::path& manifest);

/// Writes tensor, labels, optional features, and the manifest into `dir`.
/// Returns the manifest path.
std::filesystem::path write_dataset(const std::filesystem::path& dir, const ImageDataset& ds);

/// Keeps the first `clusters` classes (labels 1..clusters), preserving order.
ImageDataset subset_subjects(const ImageDataset& ds, std::size_t clusters);

/// CSV with header "index,label"; index is 0-based and must be sequential.
std::vector<Label> read_labels_csv(const std::filesystem::path& path);
std::vector<Label> parse_labels_csv(std::istream& is, const std::string& source = "<stream>");
void write_labels_csv(std::ostream& os, const std::vector<Label>& labels);
void save_labels_csv(const std::filesystem::path& path, const std::vector<Label>& labels);

}  // namespace s2cn
