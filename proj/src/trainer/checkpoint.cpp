#include "s2cn/trainer/checkpoint.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "s2cn/data/byte_io.hpp"
#include "s2cn/data/tensor_file.hpp"
#include "s2cn/numkit/errors.hpp"

namespace s2cn {

using namespace byte_io;

void write_archive(std::ostream& os, const Archive& archive) {
  os.write(kCheckpointMagic, 4);
  put_u32(os, kCheckpointVersion);
  for (const NamedTensor& rec : archive) {
    put_u32(os, static_cast<std::uint32_t>(rec.name.size()));
    os.write(rec.name.data(), static_cast<std::streamsize>(rec.name.size()));
    write_tensor_body(os, rec.value);
  }
}

Archive read_archive(std::istream& is) {
  char magic[4];
  read_exact(is, magic, 4, "checkpoint magic");
  if (!std::equal(magic, magic + 4, kCheckpointMagic)) throw FormatError("not a checkpoint file (bad magic)");
  const std::uint32_t version = get_u32(is, "checkpoint version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  Archive archive;
  while (is.peek() != std::char_traits<char>::eof()) {
    const std::uint32_t len = get_u32(is, "record name length");
    if (len > (1u << 16)) throw FormatError("implausible record name length " + std::to_string(len));
    std::string name(len, '\0');
    read_exact(is, name.data(), len, "record name");
    try {
      archive.push_back({name, read_tensor_body(is)});
    } catch (const FormatError& e) {
      throw FormatError("record '" + name + "': " + e.what());
    }
  }
  return archive;
}

void save_archive(const std::filesystem::path& path, const Archive& archive) {
  std::ostringstream os(std::ios::binary);
  write_archive(os, archive);
  write_file_atomic(path, os.str());
}

Archive load_archive(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open checkpoint " + path.string());
  try {
    return read_archive(is);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

const Tensor* find_tensor(const Archive& archive, const std::string& name) {
  for (const NamedTensor& rec : archive) {
    if (rec.name == name) return &rec.value;
  }
  return nullptr;
}

Archive model_to_archive(const Model& model) {
  Archive archive;
  if (model.has_conv()) {
    const NetworkSpec spec = spec_from_stacks(model.encoder, model.decoder);
    archive.push_back({"model.image_extent",
                       Tensor({2}, {static_cast<double>(spec.height), static_cast<double>(spec.width)})});
  }
  const std::vector<std::string> names = parameter_names(model);
  const std::vector<const Tensor*> values = parameter_values(model);
  for (std::size_t i = 0; i < names.size(); ++i) archive.push_back({names[i], *values[i]});
  if (model.has_head()) archive.push_back({"head.centers", model.head.centers});
  return archive;
}

namespace {

const Tensor& need(const Archive& archive, const std::string& name) {
  const Tensor* t = find_tensor(archive, name);
  if (!t) throw FormatError("checkpoint is missing '" + name + "'");
  return *t;
}

}  // namespace

Model model_from_archive(const Archive& archive) {
  Model model;
  for (std::size_t k = 0;; ++k) {
    const Tensor* kern = find_tensor(archive, "encoder." + std::to_string(k) + ".kernels");
    if (!kern) break;
    model.encoder.layers.push_back({*kern, need(archive, "encoder." + std::to_string(k) + ".biases"), {}});
  }
  for (std::size_t k = 0;; ++k) {
    const Tensor* kern = find_tensor(archive, "decoder." + std::to_string(k) + ".kernels");
    if (!kern) break;
    model.decoder.layers.push_back({*kern, need(archive, "decoder." + std::to_string(k) + ".biases"), {}});
  }
  if (model.encoder.layers.size() != model.decoder.layers.size()) {
    throw FormatError("checkpoint encoder and decoder depths differ");
  }
  if (model.has_conv()) {
    const Tensor& ext = need(archive, "model.image_extent");
    if (ext.size() != 2) throw FormatError("model.image_extent must hold two values");
    NetworkSpec spec;
    spec.height = static_cast<std::size_t>(ext[0]);
    spec.width = static_cast<std::size_t>(ext[1]);
    for (const ConvLayer& layer : model.encoder.layers) {
      if (layer.kernels.rank() != 4) throw FormatError("encoder kernels must have rank 4");
      spec.encoder.push_back({layer.kernels.extent(2), layer.kernels.extent(3), layer.kernels.extent(0)});
    }
    const std::vector<Extent> extents = encoder_extents(spec);
    const std::size_t depth = model.decoder.layers.size();
    for (std::size_t k = 0; k < depth; ++k) model.decoder.layers[k].target = extents[depth - 1 - k];
    try {
      validate_stack(model.encoder);
      validate_stack(model.decoder);
    } catch (const std::exception& e) {
      throw FormatError(std::string("inconsistent network in checkpoint: ") + e.what());
    }
  }
  if (const Tensor* c = find_tensor(archive, "self_expression.C")) model.coefficients = *c;
  if (const Tensor* w1 = find_tensor(archive, "head.fc1.weight")) {
    model.head.w1 = *w1;
    model.head.b1 = need(archive, "head.fc1.bias");
    model.head.w2 = need(archive, "head.fc2.weight");
    model.head.b2 = need(archive, "head.fc2.bias");
    model.head.w3 = need(archive, "head.fc3.weight");
    model.head.b3 = need(archive, "head.fc3.bias");
    model.head.centers = need(archive, "head.centers");
  }
  return model;
}

void save_model(const std::filesystem::path& path, const Model& model) { save_archive(path, model_to_archive(model)); }

Model load_model(const std::filesystem::path& path) { return model_from_archive(load_archive(path)); }

}  // namespace s2cn
