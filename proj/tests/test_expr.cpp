#include "stride/expr.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace stride;

namespace {

double central_diff(const ExprPool& pool, std::int32_t root, std::vector<double> x, int var) {
  const double h = 1e-6 * std::max(1.0, std::abs(x[var]));
  x[var] += h;
  const double up = pool.value(root, x);
  x[var] -= 2 * h;
  const double down = pool.value(root, x);
  return (up - down) / (2 * h);
}

}  // namespace

TEST_CASE("d/dx x^2 at 3 is 6") {
  ExprPool pool;
  const Expr x = pool.var(0);
  const Expr e = square(x);
  const std::vector<double> at{3.0};
  const SparseGradient g = pool.gradient(e.id(), at);
  CHECK(g.value == 9.0);
  REQUIRE(g.entries.size() == 1);
  CHECK(g.entries[0].first == 0);
  CHECK(g.entries[0].second == 6.0);
}

TEST_CASE("constant expressions have empty sparsity") {
  ExprPool pool;
  const Expr c = pool.constant(4.2) + 1.0;
  const std::vector<double> at{};
  const SparseGradient g = pool.gradient(c.id(), at);
  CHECK(g.value == doctest::Approx(5.2));
  CHECK(g.entries.empty());
  CHECK(pool.variables_of(c.id()).empty());
  CHECK(pool.polynomial_degree(c.id()) == 0);
}

TEST_CASE("moment-style expression matches central differences") {
  // tau * ((p1 - c1) * f2 - (p2 - c2) * f1), all six operands variables
  ExprPool pool;
  const Expr tau = pool.var(0);
  const Expr p1 = pool.var(1), c1 = pool.var(2), f2 = pool.var(3);
  const Expr p2 = pool.var(4), c2 = pool.var(5), f1 = pool.var(6);
  const Expr moment = (p1 - c1) * f2 - (p2 - c2) * f1;
  const Expr e = tau * moment;
  CHECK(pool.polynomial_degree(e.id()) == 3);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(7);
    for (double& v : x) v = u(rng);
    const SparseGradient g = pool.gradient(e.id(), x);
    for (const auto& [var, val] : g.entries) {
      const double fd = central_diff(pool, e.id(), x, var);
      CHECK(std::abs(val - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("whole-pool reverse pass equals per-row gradients") {
  ExprPool pool;
  const Expr x0 = pool.var(0), x1 = pool.var(1), x2 = pool.var(2);
  const Expr r0 = square(x0) + x1 * x2;
  const Expr r1 = pool.scale(3.0, x1) - square(x2);
  const Expr cost = square(r0) + square(x0 - 2.0);

  const std::vector<double> x{0.7, -1.3, 2.1};
  std::vector<double> values;
  pool.forward(x, values);
  std::vector<double> adjoints(pool.size(), 0.0);
  const double w0 = 1.7, w1 = -0.4, wc = 2.0;
  adjoints[r0.id()] += w0;
  adjoints[r1.id()] += w1;
  adjoints[cost.id()] += wc;
  std::vector<double> grad(3, 0.0);
  pool.reverse(values, adjoints, grad);

  for (int var = 0; var < 3; ++var) {
    double expected = 0.0;
    for (const auto& [root, w] : {std::pair{r0.id(), w0}, {r1.id(), w1}, {cost.id(), wc}}) {
      for (const auto& [v, g] : pool.gradient(root, x).entries)
        if (v == var) expected += w * g;
    }
    CHECK(grad[var] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("variable nodes are deduplicated and sparsity is stable") {
  ExprPool pool;
  const Expr a = pool.var(4);
  const Expr b = pool.var(4);
  CHECK(a.id() == b.id());
  const Expr e = a * b + pool.var(1);
  const auto vars = pool.variables_of(e.id());
  REQUIRE(vars.size() == 2);
  CHECK(vars[0] == 1);
  CHECK(vars[1] == 4);
  CHECK(pool.num_vars() == 5);
}

TEST_CASE("polynomial degrees") {
  ExprPool pool;
  const Expr x = pool.var(0), y = pool.var(1);
  CHECK(pool.polynomial_degree(x.id()) == 1);
  CHECK(pool.polynomial_degree((x + y).id()) == 1);
  CHECK(pool.polynomial_degree((x * y).id()) == 2);
  CHECK(pool.polynomial_degree(square(x * y).id()) == 4);
  CHECK(pool.polynomial_degree(pool.scale(2.5, x).id()) == 1);
}
