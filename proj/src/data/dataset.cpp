#include "s2cn/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "s2cn/data/key_value.hpp"
#include "s2cn/data/tensor_file.hpp"
#include "s2cn/numkit/errors.hpp"

namespace s2cn {

namespace fs = std::filesystem;

namespace {

std::size_t parse_count(const std::string& text, const std::string& key) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || text.empty() || text.front() == '-') {
    throw std::invalid_argument("manifest key '" + key + "' must be a non-negative integer, got '" + text + "'");
  }
  return static_cast<std::size_t>(v);
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

void validate_dataset(const ImageDataset& ds) {
  if (ds.clusters < 2) throw std::invalid_argument("dataset '" + ds.name + "': cluster count must be at least 2");
  if (ds.images.empty() && ds.features.empty()) throw std::invalid_argument("dataset '" + ds.name + "' has no data");
  if (!ds.images.empty()) {
    if (ds.images.rank() != 3) {
      throw std::invalid_argument("dataset '" + ds.name + "': images must be N x H x W, got " +
                                  shape_to_string(ds.images.shape()));
    }
    for (double v : ds.images.values()) {
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("dataset '" + ds.name + "': pixel outside [0, 1]");
    }
  }
  if (!ds.features.empty()) {
    if (ds.features.rank() != 2) throw std::invalid_argument("dataset '" + ds.name + "': features must be p x N");
    if (!ds.features.all_finite()) throw std::invalid_argument("dataset '" + ds.name + "': non-finite feature");
    if (!ds.images.empty() && ds.features.cols() != ds.images.extent(0)) {
      throw std::invalid_argument("dataset '" + ds.name + "': features and images disagree on N");
    }
  }
  const std::size_t n = ds.size();
  if (n < ds.clusters) throw std::invalid_argument("dataset '" + ds.name + "': fewer samples than clusters");
  if (ds.has_truth()) {
    if (ds.labels.size() != n) {
      throw std::invalid_argument("dataset '" + ds.name + "': " + std::to_string(ds.labels.size()) +
                                  " labels for " + std::to_string(n) + " samples");
    }
    for (Label l : ds.labels) {
      if (l < 1 || static_cast<std::size_t>(l) > ds.clusters) {
        throw std::invalid_argument("dataset '" + ds.name + "': label " + std::to_string(l) + " outside 1.." +
                                    std::to_string(ds.clusters));
      }
    }
  }
}

std::vector<Label> parse_labels_csv(std::istream& is, const std::string& source) {
  std::vector<Label> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line.find_first_of("0123456789") != 0) continue;  // header
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw FormatError(source + ":" + std::to_string(lineno) + ": expected index,label");
    long long index = -1, label = 0;
    try {
      std::size_t p1 = 0, p2 = 0;
      const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
      index = std::stoll(a, &p1);
      label = std::stoll(b, &p2);
      if (p1 != a.size() || p2 != b.size()) throw std::invalid_argument("junk");
    } catch (const std::exception&) {
      throw FormatError(source + ":" + std::to_string(lineno) + ": malformed row '" + line + "'");
    }
    if (index != static_cast<long long>(labels.size())) {
      throw FormatError(source + ":" + std::to_string(lineno) + ": expected index " + std::to_string(labels.size()));
    }
    labels.push_back(static_cast<Label>(label));
  }
  return labels;
}

std::vector<Label> read_labels_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open label file " + path.string());
  return parse_labels_csv(in, path.string());
}

void write_labels_csv(std::ostream& os, const std::vector<Label>& labels) {
  os << "index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) os << i << ',' << labels[i] << '\n';
}

void save_labels_csv(const fs::path& path, const std::vector<Label>& labels) {
  std::ostringstream os;
  write_labels_csv(os, labels);
  write_file_atomic(path, os.str());
}

ImageDataset load_dataset(const fs::path& manifest) {
  if (!fs::exists(manifest)) throw std::invalid_argument("dataset manifest not found: " + manifest.string());
  const KeyValues kv = read_key_values(manifest);
  const fs::path base = manifest.parent_path();
  ImageDataset ds;
  ds.name = lookup(kv, "name").value_or(manifest.stem().string());
  const auto n = lookup(kv, "n");
  if (!n) throw std::invalid_argument(manifest.string() + ": missing key 'n'");
  ds.clusters = parse_count(*n, "n");

  const auto tensor = lookup(kv, "tensor");
  const auto features = lookup(kv, "features");
  if (!tensor && !features) throw std::invalid_argument(manifest.string() + ": missing key 'tensor'");
  if (tensor) {
    ds.images = load_tensor(resolve(base, *tensor));
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < ds.images.size(); ++i) {
      const double v = ds.images[i];
      if (!std::isfinite(v)) throw std::invalid_argument(manifest.string() + ": non-finite pixel");
      lo = i == 0 ? v : std::min(lo, v);
      hi = i == 0 ? v : std::max(hi, v);
    }
    if (lo < 0.0 || hi > 255.0) throw std::invalid_argument(manifest.string() + ": pixels outside [0, 255]");
    if (hi > 1.0) {
      for (double& v : ds.images.values()) v /= 255.0;
    }
  }
  if (features) ds.features = load_tensor(resolve(base, *features));
  ds.resampler = lookup(kv, "resampler").value_or("");
  if (const auto labels = lookup(kv, "labels")) ds.labels = read_labels_csv(resolve(base, *labels));
  validate_dataset(ds);
  return ds;
}

fs::path write_dataset(const fs::path& dir, const ImageDataset& ds) {
  validate_dataset(ds);
  fs::create_directories(dir);
  std::ostringstream manifest;
  manifest << "name=" << ds.name << "\n";
  manifest << "n=" << ds.clusters << "\n";
  if (!ds.resampler.empty()) manifest << "resampler=" << ds.resampler << "\n";
  if (!ds.images.empty()) {
    save_tensor(dir / "images.stsr", ds.images);
    manifest << "tensor=images.stsr\n";
  }
  if (!ds.features.empty()) {
    save_tensor(dir / "features.stsr", ds.features);
    manifest << "features=features.stsr\n";
  }
  if (ds.has_truth()) {
    save_labels_csv(dir / "labels.csv", ds.labels);
    manifest << "labels=labels.csv\n";
  }
  const fs::path path = dir / "manifest.txt";
  write_file_atomic(path, manifest.str());
  return path;
}

ImageDataset subset_subjects(const ImageDataset& ds, std::size_t clusters) {
  if (!ds.has_truth()) throw std::invalid_argument("subset_subjects: dataset has no ground truth");
  if (clusters < 2) throw std::invalid_argument("subset_subjects: need at least 2 subjects");
  if (clusters > ds.clusters) {
    throw std::invalid_argument("subset_subjects: requested " + std::to_string(clusters) + " subjects, dataset has " +
                                std::to_string(ds.clusters));
  }
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < ds.labels.size(); ++j)
    if (static_cast<std::size_t>(ds.labels[j]) <= clusters) keep.push_back(j);

  ImageDataset out;
  out.name = ds.name;
  out.clusters = clusters;
  for (std::size_t j : keep) out.labels.push_back(ds.labels[j]);
  if (!ds.images.empty()) {
    const std::size_t h = ds.images.extent(1), w = ds.images.extent(2), px = h * w;
    out.images = Tensor({keep.size(), h, w});
    for (std::size_t k = 0; k < keep.size(); ++k)
      std::copy_n(ds.images.data() + keep[k] * px, px, out.images.data() + k * px);
  }
  if (!ds.features.empty()) {
    const std::size_t p = ds.features.rows();
    out.features = Tensor::matrix(p, keep.size());
    for (std::size_t r = 0; r < p; ++r)
      for (std::size_t k = 0; k < keep.size(); ++k) out.features(r, k) = ds.features(r, keep[k]);
  }
  validate_dataset(out);
  return out;
}

}  // namespace s2cn
