#include <cmath>

#include "doctest.h"
#include "s2cn/numkit/errors.hpp"
#include "s2cn/numkit/linalg.hpp"
#include "s2cn/selfexpr/self_expression.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace s2cn;

namespace {

Tensor random_c(std::size_t n, RngStream& rng) {
  Tensor c = th::random_tensor({n, n}, rng, -0.5, 0.5);
  project_diag_zero(c);
  return c;
}

}  // namespace

TEST_CASE("self-expression losses on a hand-sized example") {
  // Z columns e1, e1: each column reproduces the other exactly.
  const Tensor z({2, 2}, {1.0, 1.0, 0.0, 0.0});
  const Tensor c({2, 2}, {0.0, 1.0, 1.0, 0.0});
  const SelfExpressionLosses l = selfexpr_losses(z, c, Regularizer::l1);
  CHECK(l.fit == doctest::Approx(0.0));
  CHECK(l.reg == doctest::Approx(2.0));
  const SelfExpressionLosses l2 = selfexpr_losses(z, c, Regularizer::l2);
  CHECK(l2.reg == doctest::Approx(1.0));
}

TEST_CASE("self-expression gradients match finite differences") {
  RngStream rng(8);
  const std::size_t n = 7;
  Tensor z = th::random_tensor({4, n}, rng);
  Tensor c = random_c(n, rng);
  for (Regularizer kind : {Regularizer::l1, Regularizer::l2}) {
    const SelfExpressionLosses l = selfexpr_losses(z, c, kind);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i / n == i % n) {
        CHECK(l.grad_c_fit[i] == 0.0);
        CHECK(l.grad_c_reg[i] == 0.0);
        continue;
      }
      const double orig = c[i];
      c[i] = orig + 1e-6;
      const SelfExpressionLosses up = selfexpr_losses(z, c, kind);
      c[i] = orig - 1e-6;
      const SelfExpressionLosses down = selfexpr_losses(z, c, kind);
      c[i] = orig;
      CHECK(l.grad_c_fit[i] == doctest::Approx((up.fit - down.fit) / 2e-6).epsilon(1e-6));
      CHECK(l.grad_c_reg[i] == doctest::Approx((up.reg - down.reg) / 2e-6).epsilon(1e-6));
    }
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double orig = z[i];
      z[i] = orig + 1e-6;
      const double up = selfexpr_losses(z, c, kind).fit;
      z[i] = orig - 1e-6;
      const double down = selfexpr_losses(z, c, kind).fit;
      z[i] = orig;
      CHECK(l.grad_z[i] == doctest::Approx((up - down) / 2e-6).epsilon(1e-6));
    }
  }
}

TEST_CASE("l1 subgradient is zero at zero") {
  const Tensor z({1, 3}, {1.0, 2.0, 3.0});
  const Tensor c({3, 3});
  const SelfExpressionLosses l = selfexpr_losses(z, c, Regularizer::l1);
  for (double v : l.grad_c_reg.values()) CHECK(v == 0.0);
}

TEST_CASE("nonzero diagonal is rejected") {
  const Tensor z({1, 2}, {1.0, 2.0});
  CHECK_THROWS_AS(selfexpr_losses(z, Tensor({2, 2}, {0.1, 0.0, 0.0, 0.0}), Regularizer::l1), std::invalid_argument);
}

TEST_CASE("affinity is symmetric, nonnegative, and zero on the diagonal") {
  RngStream rng(9);
  const Tensor c = random_c(6, rng);
  const Tensor a = affinity(c);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(a(i, i) == 0.0);
    for (std::size_t j = 0; j < 6; ++j) {
      CHECK(a(i, j) == a(j, i));
      CHECK(a(i, j) == doctest::Approx(0.5 * (std::abs(c(i, j)) + std::abs(c(j, i)))));
    }
  }
}

TEST_CASE("coefficient initialization") {
  RngStream rng(10);
  const Tensor c = init_coefficients(20, rng);
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(c(i, i) == 0.0);
    for (std::size_t j = 0; j < 20; ++j) CHECK(std::abs(c(i, j)) <= 1e-4);
  }
  RngStream again(10);
  CHECK(bitwise_equal(init_coefficients(20, again), c));
}
