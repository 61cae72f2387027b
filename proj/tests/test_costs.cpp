#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "rlmpc/costs.hpp"
#include "rlmpc/error.hpp"

using namespace rlmpc;

TEST_CASE("running_cost is the weighted square sum of (x, y, theta, v, omega)") {
  CostMatrix identity{{1, 1, 1, 1, 1}};
  CHECK(running_cost({0, 0, 0}, {0, 0}, identity) == 0.0);
  CHECK(running_cost({1, 1, 1}, {1, 1}, identity) == doctest::Approx(5.0));

  CostMatrix weighted{{2, 1, 1, 1, 1}};
  CHECK(running_cost({3, 0, 0}, {0, 0}, weighted) == doctest::Approx(18.0));

  CHECK_THROWS_AS(running_cost({std::nan(""), 0, 0}, {0, 0}, identity), InvalidInput);
}

TEST_CASE("running_cost properties") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-4, 4);
  const CostMatrix R;  // defaults
  for (int i = 0; i < 300; ++i) {
    const State s{u(rng), u(rng), u(rng)};
    const Action a{u(rng), u(rng)};
    const double c = running_cost(s, a, R);
    CHECK(c >= 0.0);
    if (s.x != 0 || s.y != 0 || s.theta != 0 || a.v != 0 || a.omega != 0) CHECK(c > 0.0);
    // Even function of chi.
    const double flipped = running_cost({-s.x, -s.y, -s.theta}, {-a.v, -a.omega}, R);
    CHECK(flipped == doctest::Approx(c).epsilon(1e-15));
  }
}

TEST_CASE("cost matrix validation") {
  CHECK_NOTHROW(validate(CostMatrix{}));
  CHECK_THROWS_AS(validate(CostMatrix{{1, 1, 0, 1, 1}}), InvalidConfig);
  CHECK_THROWS_AS(validate(CostMatrix{{1, -1, 1, 1, 1}}), InvalidConfig);
}

TEST_CASE("discounted_sum") {
  const std::vector<double> ones{1, 1, 1};
  CHECK(discounted_sum(ones, 1.0) == doctest::Approx(3.0));
  CHECK(discounted_sum(ones, 0.5) == doctest::Approx(1.75));
  const std::vector<double> single{4.2};
  CHECK(discounted_sum(single, 0.3) == doctest::Approx(4.2));
  CHECK(discounted_sum(std::vector<double>{}, 0.9) == 0.0);
  CHECK_THROWS_AS(discounted_sum(ones, 0.0), InvalidConfig);
  CHECK_THROWS_AS(discounted_sum(ones, 1.5), InvalidConfig);
}

TEST_CASE("discounted_sum with gamma = 1 equals the plain sum") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 10);
  std::vector<double> costs;
  double plain = 0.0;
  for (int i = 0; i < 50; ++i) {
    costs.push_back(u(rng));
    plain += costs.back();
    CHECK(std::abs(discounted_sum(costs, 1.0) - plain) <= 1e-12 * std::max(1.0, plain));
  }
}

TEST_CASE("accumulated_cost is the delta-scaled column sum") {
  CHECK(accumulated_cost(std::vector<StageRecord>{}, 0.1) == 0.0);

  std::vector<StageRecord> two(2);
  two[0].cost = 1.0;
  two[1].cost = 1.0;
  CHECK(accumulated_cost(two, 0.1) == doctest::Approx(0.2));

  // Independent summation oracle on an arbitrary log.
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 3);
  std::vector<StageRecord> log;
  double previous = 0.0;
  for (int i = 0; i < 100; ++i) {
    StageRecord r;
    r.time = 0.1 * i;
    r.cost = u(rng);
    log.push_back(r);
    double naive = 0.0;
    for (const auto& rec : log) naive += rec.cost;
    const double acc = accumulated_cost(log, 0.1);
    CHECK(acc == doctest::Approx(0.1 * naive).epsilon(1e-13));
    // Monotone as records append.
    CHECK(acc >= previous);
    previous = acc;
  }
}
