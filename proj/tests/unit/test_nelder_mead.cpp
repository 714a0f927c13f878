#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "xtalk/nelder_mead.hpp"

using namespace xtalk;

TEST_CASE("Nelder-Mead on a quadratic bowl") {
  auto f = [](std::span<const double> x) {
    return std::pow(x[0] - 1.0, 2) + 10 * std::pow(x[1] + 2.0, 2) + 3 * std::pow(x[2] - 0.5, 2);
  };
  const auto r = nelder_mead(f, {0.0, 0.0, 0.0});
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r.x[1] == doctest::Approx(-2.0).epsilon(1e-5));
  CHECK(r.x[2] == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(r.value < 1e-10);
}

TEST_CASE("Nelder-Mead on Rosenbrock") {
  auto f = [](std::span<const double> x) {
    return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
  };
  NelderMeadOptions o;
  o.max_evaluations = 5000;
  const auto r = nelder_mead(f, {-1.2, 1.0}, o);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("evaluation budget is respected") {
  int calls = 0;
  auto f = [&](std::span<const double> x) {
    ++calls;
    return std::cos(x[0]) + x[1] * x[1];
  };
  NelderMeadOptions o;
  o.max_evaluations = 30;
  const auto r = nelder_mead(f, {0.1, 0.3}, o);
  CHECK(calls <= 32);
  CHECK(r.evaluations == calls);
  CHECK_FALSE(r.converged);
}

TEST_CASE("infinite values are treated as rejections") {
  auto f = [](std::span<const double> x) {
    return x[0] < 0 ? std::numeric_limits<double>::infinity() : std::pow(x[0] - 0.2, 2);
  };
  const auto r = nelder_mead(f, {1.0});
  CHECK(r.x[0] == doctest::Approx(0.2).epsilon(1e-5));
}

TEST_CASE("scalar minimization") {
  const auto m = minimize_scalar([](double x) { return std::cos(x) + 0.1 * x; }, -4.0, 4.0);
  CHECK(m.x == doctest::Approx(-std::numbers::pi - std::asin(0.1)).epsilon(1e-8));
  const auto edge = minimize_scalar([](double x) { return x; }, 2.0, 3.0);
  CHECK(edge.x == doctest::Approx(2.0).epsilon(1e-9));
}
