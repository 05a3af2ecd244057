#include "s2cn/classifier/head.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "s2cn/numkit/errors.hpp"
#include "s2cn/numkit/linalg.hpp"

namespace s2cn {

namespace {

Tensor kaiming(std::size_t rows, std::size_t cols, RngStream& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(cols));
  Tensor t = Tensor::matrix(rows, cols);
  for (double& v : t.values()) v = rng.uniform(-bound, bound);
  return t;
}

// out = w * in + b (broadcast over columns), optionally rectified.
Tensor affine(const Tensor& w, const Tensor& b, const Tensor& in, bool relu) {
  Tensor out = matmul(w, in);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) {
      double v = out(r, c) + b[r];
      if (relu && !(v > 0.0)) v = 0.0;
      out(r, c) = v;
    }
  }
  return out;
}

Tensor row_sums(const Tensor& g) {
  Tensor s({g.rows()});
  for (std::size_t r = 0; r < g.rows(); ++r)
    for (std::size_t c = 0; c < g.cols(); ++c) s[r] += g(r, c);
  return s;
}

void mask_by(Tensor& g, const Tensor& activated) {
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!(activated[i] > 0.0)) g[i] = 0.0;
}

std::size_t hidden_width(std::size_t samples) {
  const std::size_t n1 = samples / 2;
  if (n1 == 0) throw std::invalid_argument("classifier head: need at least 2 samples");
  return n1;
}

}  // namespace

ClassifierHead make_head(std::size_t feature_dim, std::size_t samples, std::size_t classes, RngStream& rng) {
  const std::size_t n1 = hidden_width(samples);
  ClassifierHead h;
  h.w1 = kaiming(n1, feature_dim, rng);
  h.b1 = Tensor({n1});
  h.w2 = kaiming(classes, n1, rng);
  h.b2 = Tensor({classes});
  h.w3 = kaiming(classes, classes, rng);
  h.b3 = Tensor({classes});
  h.centers = Tensor::matrix(classes, classes);
  return h;
}

ClassifierHead zero_head(std::size_t feature_dim, std::size_t samples, std::size_t classes) {
  const std::size_t n1 = hidden_width(samples);
  return {Tensor::matrix(n1, feature_dim), Tensor({n1}),      Tensor::matrix(classes, n1), Tensor({classes}),
          Tensor::matrix(classes, classes), Tensor({classes}), Tensor::matrix(classes, classes)};
}

Tensor softmax_columns(const Tensor& y) {
  require_rank(y, 2, "softmax_columns");
  Tensor p = y;
  for (std::size_t c = 0; c < y.cols(); ++c) {
    double mx = y(0, c);
    for (std::size_t r = 1; r < y.rows(); ++r) mx = std::max(mx, y(r, c));
    double sum = 0.0;
    for (std::size_t r = 0; r < y.rows(); ++r) {
      p(r, c) = std::exp(y(r, c) - mx);
      sum += p(r, c);
    }
    for (std::size_t r = 0; r < y.rows(); ++r) p(r, c) /= sum;
  }
  return p;
}

FcForward fc_forward(const Tensor& z, const ClassifierHead& head) {
  require_rank(z, 2, "fc_forward features");
  if (z.rows() != head.input_dim()) {
    throw ShapeError("fc_forward: head expects " + std::to_string(head.input_dim()) + " features, Z is " +
                     shape_to_string(z.shape()));
  }
  FcForward f;
  f.hidden1 = affine(head.w1, head.b1, z, true);
  f.hidden2 = affine(head.w2, head.b2, f.hidden1, true);
  f.y = affine(head.w3, head.b3, f.hidden2, false);
  f.prob = softmax_columns(f.y);
  return f;
}

HeadGrads fc_backward(const Tensor& grad_y, const FcForward& fwd, const Tensor& z, const ClassifierHead& head) {
  require_shape(grad_y, fwd.y.shape(), "fc_backward grad_y");
  HeadGrads g;
  g.w3 = matmul_nt(grad_y, fwd.hidden2);
  g.b3 = row_sums(grad_y);
  Tensor g2 = matmul_tn(head.w3, grad_y);
  mask_by(g2, fwd.hidden2);
  g.w2 = matmul_nt(g2, fwd.hidden1);
  g.b2 = row_sums(g2);
  Tensor g1 = matmul_tn(head.w2, g2);
  mask_by(g1, fwd.hidden1);
  g.w1 = matmul_nt(g1, z);
  g.b1 = row_sums(g1);
  g.z = matmul_tn(head.w1, g1);
  return g;
}

CecResult cec_loss(const Tensor& y, const Tensor& prob, const Tensor& q, const Tensor& centers, double tau,
                   CrossEntropyForm form) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("cec_loss: tau must lie in [0, 1]");
  require_rank(y, 2, "cec_loss outputs");
  require_shape(prob, y.shape(), "cec_loss probabilities");
  require_shape(q, y.shape(), "cec_loss segmentation");
  require_shape(centers, {y.rows(), y.rows()}, "cec_loss centers");
  const std::size_t n = y.rows(), samples = y.cols();
  if (samples == 0) throw ShapeError("cec_loss: no samples");
  const double inv_n = 1.0 / static_cast<double>(samples);

  CecResult out;
  out.grad_y = Tensor(y.shape());
  for (std::size_t j = 0; j < samples; ++j) {
    double s = 0.0;
    std::size_t cls = n;
    for (std::size_t k = 0; k < n; ++k) {
      s += prob(k, j) * q(k, j);
      if (q(k, j) != 0.0 && cls == n) cls = k;
    }
    // d ce / d s, then d s / d y_k = prob_k * (q_k - s)
    double dce_ds = 0.0;
    if (form == CrossEntropyForm::softplus) {
      out.classification += std::log1p(std::exp(-s));
      dce_ds = -1.0 / (1.0 + std::exp(s));
    } else if (cls != n) {
      out.classification += -std::log(s);
      dce_ds = -1.0 / s;
    }
    for (std::size_t k = 0; k < n; ++k) out.grad_y(k, j) = inv_n * dce_ds * prob(k, j) * (q(k, j) - s);

    if (cls != n) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double d = y(k, j) - centers(k, cls);
        d2 += d * d;
        out.grad_y(k, j) += inv_n * 2.0 * tau * d;
      }
      out.center += d2;
    }
  }
  out.classification *= inv_n;
  out.center *= inv_n;
  out.loss = out.classification + tau * out.center;
  return out;
}

Tensor update_centers(const Tensor& y, std::span<const Label> labels, const Tensor& previous) {
  require_rank(y, 2, "update_centers outputs");
  const std::size_t n = y.rows();
  require_shape(previous, {n, n}, "update_centers previous centers");
  if (labels.size() != y.cols()) throw ShapeError("update_centers: label count does not match outputs");
  Tensor sums = Tensor::matrix(n, n);
  std::vector<std::size_t> counts(n, 0);
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const Label l = labels[j];
    if (l < 1 || static_cast<std::size_t>(l) > n) {
      throw std::invalid_argument("update_centers: label " + std::to_string(l) + " outside 1.." + std::to_string(n));
    }
    const auto k = static_cast<std::size_t>(l - 1);
    ++counts[k];
    for (std::size_t r = 0; r < n; ++r) sums(r, k) += y(r, j);
  }
  Tensor centers = previous;
  for (std::size_t k = 0; k < n; ++k) {
    if (counts[k] == 0) continue;
    for (std::size_t r = 0; r < n; ++r) centers(r, k) = sums(r, k) / static_cast<double>(counts[k]);
  }
  return centers;
}

}  // namespace s2cn
