#include "s2cn/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "s2cn/numkit/rng.hpp"

namespace s2cn {

namespace {

Tensor orthonormal_basis(std::size_t ambient, std::size_t dim, RngStream& rng) {
  Tensor b = Tensor::matrix(ambient, dim);
  for (double& v : b.values()) v = rng.normal();
  for (std::size_t k = 0; k < dim; ++k) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t prev = 0; prev < k; ++prev) {
        double proj = 0.0;
        for (std::size_t r = 0; r < ambient; ++r) proj += b(r, prev) * b(r, k);
        for (std::size_t r = 0; r < ambient; ++r) b(r, k) -= proj * b(r, prev);
      }
    }
    double norm = 0.0;
    for (std::size_t r = 0; r < ambient; ++r) norm += b(r, k) * b(r, k);
    norm = std::sqrt(norm);
    if (norm < 1e-12) throw std::runtime_error("gen_synthetic: degenerate random basis");
    for (std::size_t r = 0; r < ambient; ++r) b(r, k) /= norm;
  }
  return b;
}

}  // namespace

SyntheticSet gen_synthetic(const SyntheticSpec& spec) {
  if (spec.subspaces < 2) throw std::invalid_argument("gen_synthetic: need at least 2 subspaces");
  if (spec.dim == 0 || spec.dim >= spec.ambient) {
    throw std::invalid_argument("gen_synthetic: subspace dimension must satisfy 0 < d < D");
  }
  if (spec.per_subspace == 0) throw std::invalid_argument("gen_synthetic: need at least one point per subspace");
  if (!(spec.noise >= 0.0) || !std::isfinite(spec.noise)) throw std::invalid_argument("gen_synthetic: invalid noise");

  RngStream basis_rng(derive_seed(spec.seed, "synthetic.bases"));
  RngStream point_rng(derive_seed(spec.seed, "synthetic.points"));
  const std::size_t n = spec.subspaces * spec.per_subspace;
  SyntheticSet set{Tensor::matrix(spec.ambient, n), std::vector<Label>(n), {}};
  std::vector<double> coef(spec.dim);
  std::size_t col = 0;
  for (std::size_t s = 0; s < spec.subspaces; ++s) {
    set.bases.push_back(orthonormal_basis(spec.ambient, spec.dim, basis_rng));
    const Tensor& basis = set.bases.back();
    for (std::size_t i = 0; i < spec.per_subspace; ++i, ++col) {
      double norm = 0.0;
      for (double& c : coef) {
        c = point_rng.normal();
        norm += c * c;
      }
      norm = std::sqrt(norm);
      for (std::size_t r = 0; r < spec.ambient; ++r) {
        double v = 0.0;
        for (std::size_t k = 0; k < spec.dim; ++k) v += basis(r, k) * coef[k] / norm;
        set.points(r, col) = v;
      }
      set.labels[col] = static_cast<Label>(s + 1);
    }
  }
  if (spec.noise > 0.0) {
    for (double& v : set.points.values()) v += spec.noise * point_rng.normal();
  }
  return set;
}

ImageDataset to_pseudo_images(const SyntheticSet& set, const std::string& name) {
  const std::size_t d = set.points.rows(), n = set.points.cols();
  std::size_t side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
  while (side * side < d) ++side;
  double lo = 0.0, hi = 0.0;
  for (double v : set.points.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double range = hi > lo ? hi - lo : 1.0;

  ImageDataset ds;
  ds.name = name;
  ds.images = Tensor({n, side, side});
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t px = 0; px < side * side; ++px) {
      const double v = px < d ? set.points(px, j) : 0.0;
      ds.images[j * side * side + px] = std::clamp((v - lo) / range, 0.0, 1.0);
    }
  }
  ds.labels = set.labels;
  Label max_label = 0;
  for (Label l : set.labels) max_label = std::max(max_label, l);
  ds.clusters = static_cast<std::size_t>(max_label);
  ds.features = set.points;
  return ds;
}

}  // namespace s2cn
