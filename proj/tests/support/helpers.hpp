#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>

#include "s2cn/numkit/rng.hpp"
#include "s2cn/numkit/tensor.hpp"

namespace th {

inline s2cn::Tensor random_tensor(s2cn::Shape shape, s2cn::RngStream& rng, double lo = -1.0, double hi = 1.0) {
  s2cn::Tensor t(std::move(shape));
  for (double& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

inline double max_abs_diff(const s2cn::Tensor& a, const s2cn::Tensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double inner(const s2cn::Tensor& a, const s2cn::Tensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("s2cn_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace th

namespace th {

/// Symmetric affinity with strong blocks (within U(0.5, 1)) and weak links
/// across (U(0, cross)); zero diagonal. `labels` receives 1-based block ids.
inline s2cn::Tensor block_affinity(const std::vector<std::size_t>& sizes, double cross, s2cn::RngStream& rng,
                                   std::vector<int>& labels) {
  labels.clear();
  for (std::size_t b = 0; b < sizes.size(); ++b) labels.insert(labels.end(), sizes[b], static_cast<int>(b) + 1);
  const std::size_t n = labels.size();
  s2cn::Tensor a({n, n});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = labels[i] == labels[j] ? rng.uniform(0.5, 1.0) : rng.uniform(0.0, cross);
      a(i, j) = v;
      a(j, i) = v;
    }
  return a;
}

}  // namespace th
