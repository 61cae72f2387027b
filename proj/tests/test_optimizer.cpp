#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "rlmpc/error.hpp"
#include "rlmpc/optimizer.hpp"

using namespace rlmpc;

namespace {

const Box unit_box{{-1.0, -1.0}, {1.0, 1.0}};

}  // namespace

TEST_CASE("finds the interior minimum of a convex quadratic") {
  const auto f = [](std::span<const double> x) {
    return x[0] * x[0] + 2.0 * x[1] * x[1];
  };
  const std::vector<double> init{1.0, 1.0};
  const OptimizerResult res = minimize(f, init, unit_box, {0, 1e-8});
  CHECK(res.converged);
  CHECK(std::abs(res.argmin[0]) <= 1e-4);
  CHECK(std::abs(res.argmin[1]) <= 1e-4);
  CHECK(res.value <= f(init));
}

TEST_CASE("minimum on a bound face lands on the boundary") {
  // Unconstrained minimum at (2, 0.5), clamped to x = 1.
  const auto f = [](std::span<const double> x) {
    return (x[0] - 2.0) * (x[0] - 2.0) + (x[1] - 0.5) * (x[1] - 0.5);
  };
  const std::vector<double> init{-0.5, -0.5};
  const OptimizerResult res = minimize(f, init, unit_box, {2000, 1e-10});
  CHECK(res.argmin[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(res.argmin[1] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(res.argmin[0] <= 1.0);
}

TEST_CASE("constant objective returns the initial point, converged") {
  const auto f = [](std::span<const double>) { return 7.0; };
  const std::vector<double> init{0.25, -0.75};
  const OptimizerResult res = minimize(f, init, unit_box, {});
  CHECK(res.converged);
  CHECK(res.argmin[0] == 0.25);
  CHECK(res.argmin[1] == -0.75);
  CHECK(res.value == 7.0);
}

TEST_CASE("non-finite objective aborts with a diagnostic") {
  const auto f = [](std::span<const double> x) {
    return x[0] > 0.5 ? std::numeric_limits<double>::quiet_NaN() : x[0];
  };
  const std::vector<double> init{0.9, 0.0};
  CHECK_THROWS_AS(minimize(f, init, unit_box, {}), OptimizerError);
}

TEST_CASE("deterministic given identical inputs") {
  const auto f = [](std::span<const double> x) {
    return std::sin(3.0 * x[0]) + x[1] * x[1] + 0.3 * x[0];
  };
  const std::vector<double> init{0.2, 0.4};
  const OptimizerResult a = minimize(f, init, unit_box, {});
  const OptimizerResult b = minimize(f, init, unit_box, {});
  CHECK(a.argmin[0] == b.argmin[0]);
  CHECK(a.argmin[1] == b.argmin[1]);
  CHECK(a.value == b.value);
  CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("respects the evaluation budget and the bounds") {
  int calls = 0;
  const auto f = [&calls](std::span<const double> x) {
    ++calls;
    double s = 0.0;
    for (double xi : x) s += (xi - 3.0) * (xi - 3.0);  // min far outside the box
    return s;
  };
  Box box{{-1, -1, -1, -1}, {1, 1, 1, 1}};
  const std::vector<double> init{0, 0, 0, 0};
  const OptimizerResult res = minimize(f, init, box, {60, 1e-12});
  CHECK(res.evaluations == calls);
  CHECK(res.evaluations <= 60);
  for (double x : res.argmin) {
    CHECK(x >= -1.0);
    CHECK(x <= 1.0);
  }
  CHECK(res.value <= f(init) + 1e-12);
}

TEST_CASE("input validation") {
  const auto f = [](std::span<const double>) { return 0.0; };
  CHECK_THROWS_AS(minimize(f, std::vector<double>{}, unit_box, {}), InvalidInput);
  CHECK_THROWS_AS(minimize(f, std::vector<double>{0.0}, unit_box, {}), InvalidInput);
  Box bad{{1.0}, {-1.0}};
  CHECK_THROWS_AS(minimize(f, std::vector<double>{0.0}, bad, {}), InvalidConfig);
}
