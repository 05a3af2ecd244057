#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "s2cn/classifier/alignment.hpp"
#include "s2cn/classifier/head.hpp"
#include "s2cn/classifier/hungarian.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace s2cn;

TEST_CASE("hungarian matches brute force") {
  RngStream rng(1);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng.below(6);
    const Tensor cost = th::random_tensor({n, n}, rng, -5.0, 5.0);
    const Assignment a = hungarian(cost);
    CHECK(a.cost == doctest::Approx(oracle::brute_force_assignment(cost)).epsilon(1e-12));
    std::vector<std::size_t> cols = a.column_of_row;
    std::sort(cols.begin(), cols.end());
    std::vector<std::size_t> expect(n);
    std::iota(expect.begin(), expect.end(), 0);
    CHECK(cols == expect);
  }
}

TEST_CASE("hungarian edge cases") {
  CHECK(hungarian(Tensor({0, 0})).column_of_row.empty());
  CHECK_THROWS_AS(hungarian(Tensor({2, 3})), std::invalid_argument);
  CHECK_THROWS_AS(hungarian(Tensor({2, 2}, {0, INFINITY, 1, 1})), std::invalid_argument);
  const Assignment a = hungarian(Tensor({2, 2}, {1, 0, 0, 1}));
  CHECK(a.cost == 0.0);
  CHECK(a.column_of_row == std::vector<std::size_t>{1, 0});
}

TEST_CASE("alignment undoes a relabeling") {
  const PseudoLabelState prev{{1, 1, 2, 2, 3, 3}, 3, 0};
  const PseudoLabelState next{{3, 3, 1, 1, 2, 2}, 3, 5};
  const AlignedLabels al = align_labels(prev, next);
  CHECK(al.state.labels == prev.labels);
  CHECK(al.record.agreement == 6);
  CHECK_FALSE(al.record.is_identity());
  CHECK(al.record.permutation == std::vector<Label>{2, 3, 1});
}

TEST_CASE("alignment is idempotent") {
  RngStream rng(2);
  PseudoLabelState s{{}, 4, 0};
  for (int j = 0; j < 40; ++j) s.labels.push_back(static_cast<Label>(rng.below(4)) + 1);
  const AlignedLabels al = align_labels(s, s);
  CHECK(al.record.is_identity());
  CHECK(al.state.labels == s.labels);
  // identity is kept whenever it ties for the optimum
  const PseudoLabelState other{{1, 2, 1, 2}, 2, 0};
  const PseudoLabelState swapped{{1, 1, 2, 2}, 2, 0};
  CHECK(align_labels(other, swapped).record.is_identity());
}

TEST_CASE("alignment maximizes agreement") {
  RngStream rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    PseudoLabelState a{{}, 3, 0}, b{{}, 3, 0};
    for (int j = 0; j < 25; ++j) {
      a.labels.push_back(static_cast<Label>(rng.below(3)) + 1);
      b.labels.push_back(static_cast<Label>(rng.below(3)) + 1);
    }
    const AlignedLabels al = align_labels(a, b);
    const double best_error = oracle::brute_force_error(b.labels, a.labels, 3);
    CHECK(100.0 * (1.0 - al.record.agreement / 25.0) == doctest::Approx(best_error));
  }
}

TEST_CASE("head shapes and zero head") {
  RngStream rng(4);
  const ClassifierHead h = make_head(12, 20, 3, rng);
  CHECK(h.w1.shape() == Shape{10, 12});
  CHECK(h.w2.shape() == Shape{3, 10});
  CHECK(h.w3.shape() == Shape{3, 3});
  CHECK(h.centers.shape() == Shape{3, 3});
  const ClassifierHead z = zero_head(12, 20, 3);
  const FcForward f = fc_forward(th::random_tensor({12, 20}, rng), z);
  for (double v : f.y.values()) CHECK(v == 0.0);
  for (double v : f.prob.values()) CHECK(v == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("softmax is stable for large inputs") {
  const Tensor y({2, 2}, {1000.0, -1000.0, 1001.0, -1000.0});
  const Tensor p = softmax_columns(y);
  CHECK(p.all_finite());
  CHECK(p(1, 0) == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
  CHECK(p(0, 1) == doctest::Approx(0.5));
}

namespace {

double l4_value(const Tensor& y, const Tensor& q, const Tensor& mu, double tau, CrossEntropyForm form) {
  return cec_loss(y, softmax_columns(y), q, mu, tau, form).loss;
}

}  // namespace

TEST_CASE("classification and center loss gradient") {
  RngStream rng(5);
  Tensor y = th::random_tensor({3, 6}, rng, -2.0, 2.0);
  const Tensor q = labels_to_q(std::vector<Label>{1, 2, 3, 1, 2, 3}, 3).q;
  const Tensor mu = th::random_tensor({3, 3}, rng);
  for (CrossEntropyForm form : {CrossEntropyForm::softplus, CrossEntropyForm::log_likelihood}) {
    const CecResult r = cec_loss(y, softmax_columns(y), q, mu, 0.3, form);
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double orig = y[i];
      y[i] = orig + 1e-6;
      const double up = l4_value(y, q, mu, 0.3, form);
      y[i] = orig - 1e-6;
      const double down = l4_value(y, q, mu, 0.3, form);
      y[i] = orig;
      CHECK(r.grad_y[i] == doctest::Approx((up - down) / 2e-6).epsilon(1e-6));
    }
  }
}

TEST_CASE("classification loss values") {
  // y = 0 gives uniform probabilities 1/2; softplus of -1/2.
  const Tensor y({2, 1});
  const Tensor q({2, 1}, {1.0, 0.0});
  const Tensor mu({2, 2});
  const CecResult r = cec_loss(y, softmax_columns(y), q, mu, 0.0);
  CHECK(r.loss == doctest::Approx(std::log(1.0 + std::exp(-0.5))));
  CHECK_THROWS_AS(cec_loss(y, softmax_columns(y), q, mu, 1.5), std::invalid_argument);
  const CecResult ll = cec_loss(y, softmax_columns(y), q, mu, 0.0, CrossEntropyForm::log_likelihood);
  CHECK(ll.loss == doctest::Approx(std::log(2.0)));
}

TEST_CASE("centers are class means and keep the previous value when a class is empty") {
  const Tensor y({2, 3}, {1.0, 3.0, 5.0, 2.0, 4.0, 6.0});
  const Tensor prev({2, 2}, 9.0);
  const Tensor mu = update_centers(y, std::vector<Label>{1, 1, 2}, prev);
  CHECK(mu(0, 0) == 2.0);
  CHECK(mu(1, 0) == 3.0);
  CHECK(mu(0, 1) == 5.0);
  CHECK(mu(1, 1) == 6.0);
  const Tensor kept = update_centers(y, std::vector<Label>{1, 1, 1}, prev);
  CHECK(kept(0, 0) == 3.0);
  CHECK(kept(0, 1) == 9.0);
  CHECK(kept(1, 1) == 9.0);
}

TEST_CASE("head backward matches finite differences") {
  RngStream rng(6);
  const Tensor z = th::random_tensor({5, 8}, rng);
  ClassifierHead h = make_head(5, 8, 3, rng);
  for (double& v : h.b1.values()) v = rng.uniform(-0.1, 0.1);
  for (double& v : h.b2.values()) v = rng.uniform(-0.1, 0.1);
  const FcForward f = fc_forward(z, h);
  const Tensor g = th::random_tensor(f.y.shape(), rng);
  const HeadGrads hg = fc_backward(g, f, z, h);
  auto check = [&](Tensor& param, const Tensor& grad) {
    for (std::size_t i = 0; i < param.size(); ++i) {
      const double orig = param[i];
      param[i] = orig + 1e-6;
      const double up = th::inner(fc_forward(z, h).y, g);
      param[i] = orig - 1e-6;
      const double down = th::inner(fc_forward(z, h).y, g);
      param[i] = orig;
      CHECK(grad[i] == doctest::Approx((up - down) / 2e-6).epsilon(1e-6));
    }
  };
  check(h.w1, hg.w1);
  check(h.b1, hg.b1);
  check(h.w2, hg.w2);
  check(h.b2, hg.b2);
  check(h.w3, hg.w3);
  check(h.b3, hg.b3);
  Tensor zz = z;
  for (std::size_t i = 0; i < zz.size(); ++i) {
    const double orig = zz[i];
    zz[i] = orig + 1e-6;
    const double up = th::inner(fc_forward(zz, h).y, g);
    zz[i] = orig - 1e-6;
    const double down = th::inner(fc_forward(zz, h).y, g);
    zz[i] = orig;
    CHECK(hg.z[i] == doctest::Approx((up - down) / 2e-6).epsilon(1e-6));
  }
}
