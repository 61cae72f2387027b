#pragma once

// Quadratic running cost, horizon discounting, and the accumulated-cost
// metric used to score episodes.

#include <array>
#include <span>

#include "rlmpc/dynamics.hpp"

namespace rlmpc {

/// Diagonal positive-definite weights for the stacked vector
/// chi = (x, y, theta, v, omega). The defaults penalize position dominantly
/// and keep heading and actuation cheap enough that the receding-horizon
/// controllers can afford transit headings and terminal rotations.
struct CostMatrix {
  std::array<double, 5> diag = {1.0, 1.0, 0.02, 0.01, 0.001};
};

/// Throws InvalidConfig unless every diagonal entry is finite and > 0.
void validate(const CostMatrix& R);

/// rho(s, a) = sum_i R_i * chi_i^2. Nonnegative; zero iff chi == 0.
/// Throws InvalidInput on non-finite state or action.
double running_cost(const State& s, const Action& a, const CostMatrix& R);

/// sum_i gamma^(i-1) * costs[i-1] with i starting at 1; empty input gives 0.
/// Throws InvalidConfig unless 0 < gamma <= 1.
double discounted_sum(std::span<const double> costs, double gamma);

/// One logged control interval: goal-frame state, applied action, and the
/// running cost of the pair.
struct StageRecord {
  double time = 0.0;  // [s], k * delta
  State state;        // goal frame
  Action action;
  double cost = 0.0;
};

/// Rectangle-rule time integral delta * sum of the cost column. Undiscounted.
double accumulated_cost(std::span<const StageRecord> log, double delta);

}  // namespace rlmpc
