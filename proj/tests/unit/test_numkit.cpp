#include <cmath>
#include <set>

#include "doctest.h"
#include "s2cn/numkit/adam.hpp"
#include "s2cn/numkit/conv.hpp"
#include "s2cn/numkit/errors.hpp"
#include "s2cn/numkit/linalg.hpp"
#include "s2cn/numkit/rng.hpp"
#include "s2cn/numkit/symmetric_eig.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace s2cn;

TEST_CASE("tensor shape checks") {
  Tensor t({2, 3}, 1.5);
  CHECK(t.size() == 6);
  CHECK(t.rows() == 2);
  CHECK(t.cols() == 3);
  CHECK_THROWS_AS(Tensor({2, 2}, std::vector<double>{1, 2, 3}), ShapeError);
  CHECK_THROWS_AS(t.reshaped({4, 2}), ShapeError);
  CHECK(t.reshaped({3, 2}).extent(0) == 3);
  CHECK_THROWS_AS(t.extent(2), ShapeError);
  t[4] = NAN;
  CHECK_FALSE(t.all_finite());
}

TEST_CASE("bitwise equality distinguishes shapes and signed zero") {
  Tensor a({2}, {0.0, 1.0});
  Tensor b({2}, {-0.0, 1.0});
  CHECK_FALSE(bitwise_equal(a, b));
  CHECK(bitwise_equal(a, Tensor({2}, {0.0, 1.0})));
  CHECK_FALSE(bitwise_equal(a, Tensor({1, 2}, {0.0, 1.0})));
}

TEST_CASE("matrix products agree with the triple loop") {
  RngStream rng(3);
  const Tensor a = th::random_tensor({4, 7}, rng);
  const Tensor b = th::random_tensor({7, 5}, rng);
  CHECK(th::max_abs_diff(matmul(a, b), oracle::naive_matmul(a, b)) < 1e-13);
  CHECK(th::max_abs_diff(matmul_tn(transpose(a), b), oracle::naive_matmul(a, b)) < 1e-13);
  CHECK(th::max_abs_diff(matmul_nt(a, transpose(b)), oracle::naive_matmul(a, b)) < 1e-13);
  CHECK_THROWS_AS(matmul(a, a), ShapeError);
}

TEST_CASE("same-ceil geometry") {
  CHECK(strided_extent(48) == 24);
  CHECK(strided_extent(21) == 11);
  CHECK(strided_extent(11) == 6);
  CHECK(strided_extent(1) == 1);
  // total padding 2*(24-1)+5-48 = 3, one row before
  CHECK(pad_before(48, 5) == 1);
  CHECK(pad_before(42, 3) == 0);
  CHECK(pad_before(21, 3) == 1);
}

TEST_CASE("convolution matches the direct oracle") {
  RngStream rng(11);
  for (auto [h, w, k] : {std::tuple{8, 8, 3}, {7, 9, 5}, {5, 4, 3}, {1, 3, 3}}) {
    const Tensor x = th::random_tensor({2, 3, std::size_t(h), std::size_t(w)}, rng);
    const Tensor kern = th::random_tensor({4, 3, std::size_t(k), std::size_t(k)}, rng);
    const Tensor b = th::random_tensor({4}, rng);
    for (Activation act : {Activation::relu, Activation::identity}) {
      const Tensor y = conv2d_forward(x, kern, b, act);
      const Tensor ref = oracle::conv_same_ceil(x, kern, b, act == Activation::relu);
      REQUIRE(y.shape() == ref.shape());
      CHECK(th::max_abs_diff(y, ref) < 1e-12);
    }
  }
}

TEST_CASE("transposed convolution matches the oracle and inverts extents") {
  RngStream rng(12);
  for (auto [oh, ow, k] : {std::tuple{8, 8, 3}, {7, 9, 5}, {48, 42, 5}, {11, 6, 3}}) {
    const std::size_t h = strided_extent(std::size_t(oh)), w = strided_extent(std::size_t(ow));
    const Tensor x = th::random_tensor({2, 3, h, w}, rng);
    const Tensor kern = th::random_tensor({3, 2, std::size_t(k), std::size_t(k)}, rng);
    const Tensor b = th::random_tensor({2}, rng);
    const Tensor y = deconv2d_forward(x, kern, b, std::size_t(oh), std::size_t(ow), Activation::identity);
    const Tensor ref = oracle::deconv_same_ceil(x, kern, b, std::size_t(oh), std::size_t(ow), false);
    REQUIRE(y.shape() == Shape{2, 2, std::size_t(oh), std::size_t(ow)});
    CHECK(th::max_abs_diff(y, ref) < 1e-12);
  }
  const Tensor x({1, 1, 3, 3});
  CHECK_THROWS_AS(deconv2d_forward(x, Tensor({1, 1, 3, 3}), Tensor({1}), 8, 6), ShapeError);
}

TEST_CASE("transposed convolution is the adjoint of convolution") {
  RngStream rng(13);
  const Tensor kern = th::random_tensor({4, 3, 3, 3}, rng);
  const Tensor zero4({4}), zero3({3});
  const Tensor x = th::random_tensor({1, 3, 9, 7}, rng);
  const Tensor y = th::random_tensor({1, 4, 5, 4}, rng);
  const double lhs = th::inner(conv2d_forward(x, kern, zero4, Activation::identity), y);
  const double rhs = th::inner(x, deconv2d_forward(y, kern, zero3, 9, 7, Activation::identity));
  CHECK(std::abs(lhs - rhs) < 1e-11);
}

namespace {

// Central differences of sum(g .* f(param)) over every entry of `param`.
template <typename F>
Tensor numeric_grad(Tensor& param, const Tensor& g, F&& f) {
  Tensor out(param.shape());
  const double h = 1e-6;
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double orig = param[i];
    param[i] = orig + h;
    const double up = th::inner(f(), g);
    param[i] = orig - h;
    const double down = th::inner(f(), g);
    param[i] = orig;
    out[i] = (up - down) / (2 * h);
  }
  return out;
}

}  // namespace

TEST_CASE("convolution backward matches finite differences") {
  RngStream rng(21);
  Tensor x = th::random_tensor({2, 2, 7, 6}, rng);
  Tensor kern = th::random_tensor({3, 2, 3, 3}, rng);
  Tensor b = th::random_tensor({3}, rng, -0.2, 0.2);
  ConvCache cache;
  const Tensor y = conv2d_forward(x, kern, b, Activation::relu, &cache);
  const Tensor g = th::random_tensor(y.shape(), rng);
  const ConvGrads grads = conv2d_backward(g, cache, kern);
  auto f = [&] { return conv2d_forward(x, kern, b, Activation::relu); };
  CHECK(th::max_abs_diff(grads.input, numeric_grad(x, g, f)) < 1e-6);
  CHECK(th::max_abs_diff(grads.kernels, numeric_grad(kern, g, f)) < 1e-6);
  CHECK(th::max_abs_diff(grads.biases, numeric_grad(b, g, f)) < 1e-6);
  CHECK_THROWS_AS(conv2d_backward(g, ConvCache{}, kern), std::invalid_argument);
}

TEST_CASE("transposed convolution backward matches finite differences") {
  RngStream rng(22);
  Tensor x = th::random_tensor({2, 3, 4, 3}, rng);
  Tensor kern = th::random_tensor({3, 2, 5, 5}, rng);
  Tensor b = th::random_tensor({2}, rng, -0.2, 0.2);
  ConvCache cache;
  const Tensor y = deconv2d_forward(x, kern, b, 7, 6, Activation::relu, &cache);
  const Tensor g = th::random_tensor(y.shape(), rng);
  const ConvGrads grads = deconv2d_backward(g, cache, kern);
  auto f = [&] { return deconv2d_forward(x, kern, b, 7, 6, Activation::relu); };
  CHECK(th::max_abs_diff(grads.input, numeric_grad(x, g, f)) < 1e-6);
  CHECK(th::max_abs_diff(grads.kernels, numeric_grad(kern, g, f)) < 1e-6);
  CHECK(th::max_abs_diff(grads.biases, numeric_grad(b, g, f)) < 1e-6);
}

TEST_CASE("adam follows the scalar recurrence") {
  Tensor w({3}, {0.5, -1.0, 2.0});
  Tensor g({3});
  OptimState state;
  double m[3] = {0, 0, 0}, v[3] = {0, 0, 0}, ref[3] = {0.5, -1.0, 2.0};
  for (int t = 1; t <= 5; ++t) {
    for (int i = 0; i < 3; ++i) g[i] = 2.0 * ref[i] + 0.1 * t;
    std::vector<ParamRef> params{{"w", &w, &g}};
    adam_step(params, state);
    for (int i = 0; i < 3; ++i) {
      const double gi = 2.0 * ref[i] + 0.1 * t;
      m[i] = 0.9 * m[i] + 0.1 * gi;
      v[i] = 0.999 * v[i] + 0.001 * gi * gi;
      const double mh = m[i] / (1 - std::pow(0.9, t));
      const double vh = v[i] / (1 - std::pow(0.999, t));
      ref[i] -= 1e-3 * mh / (std::sqrt(vh) + 1e-8);
    }
  }
  CHECK(state.step() == 5);
  for (int i = 0; i < 3; ++i) CHECK(w[i] == doctest::Approx(ref[i]).epsilon(1e-14));
}

TEST_CASE("adam rejects non-finite gradients and leaves parameters alone") {
  Tensor a({2}, {1.0, 2.0}), b({1}, {3.0});
  Tensor ga({2}, {0.1, 0.2}), gb({1}, {INFINITY});
  OptimState state;
  std::vector<ParamRef> params{{"a", &a, &ga}, {"b", &b, &gb}};
  try {
    adam_step(params, state);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("b") != std::string::npos);
  }
  CHECK(a[0] == 1.0);
  CHECK(state.step() == 0);
}

TEST_CASE("jacobi eigensolver") {
  SUBCASE("2x2 closed form") {
    const SymmetricEigen e = symmetric_eig(Tensor({2, 2}, {2.0, 1.0, 1.0, 2.0}));
    CHECK(e.values[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e.values[1] == doctest::Approx(3.0).epsilon(1e-14));
  }
  SUBCASE("random symmetric reconstructs") {
    RngStream rng(5);
    const std::size_t n = 12;
    Tensor a = th::random_tensor({n, n}, rng);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) a(i, j) = a(j, i);
    const SymmetricEigen e = symmetric_eig(a);
    CHECK(std::is_sorted(e.values.begin(), e.values.end()));
    Tensor lam({n, n});
    for (std::size_t i = 0; i < n; ++i) lam(i, i) = e.values[i];
    const Tensor rec = oracle::naive_matmul(oracle::naive_matmul(e.vectors, lam), transpose(e.vectors));
    CHECK(th::max_abs_diff(rec, a) < 1e-9);
    const Tensor gram = oracle::naive_matmul(transpose(e.vectors), e.vectors);
    CHECK(th::max_abs_diff(gram, Tensor::identity(n)) < 1e-10);
    CHECK(e.sweeps <= 100);
  }
  SUBCASE("rejects asymmetric input") {
    CHECK_THROWS_AS(symmetric_eig(Tensor({2, 2}, {1.0, 2.0, 0.0, 1.0})), std::invalid_argument);
  }
}

TEST_CASE("rng streams are reproducible and separated by name") {
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(derive_seed(1, "encoder") != derive_seed(1, "decoder"));
  CHECK(derive_seed(1, "encoder") == derive_seed(1, "encoder"));
  RngStream c(7);
  double sum = 0.0, sq = 0.0;
  std::set<std::size_t> seen;
  for (int i = 0; i < 20000; ++i) {
    const double u = c.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    const double z = c.normal();
    sum += z;
    sq += z * z;
    seen.insert(c.below(5));
  }
  CHECK(std::abs(sum / 20000) < 0.05);
  CHECK(std::abs(sq / 20000 - 1.0) < 0.05);
  CHECK(seen.size() == 5);
}
