#pragma once

// Deterministic derivative-free direct search (Nelder-Mead with adaptive
// coefficients) over a box. Candidate points are projected onto the box
// before evaluation, so every returned point is feasible.

#include <functional>
#include <span>
#include <vector>

namespace rlmpc {

struct Box {
  std::vector<double> lower;
  std::vector<double> upper;
};

struct OptimizerSettings {
  int max_evaluations = 0;   // 0 means 100 * dimension
  double tolerance = 1e-4;   // relative spread of simplex objective values
};

struct OptimizerResult {
  std::vector<double> argmin;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Minimizes objective over the box starting from init (which must be
/// feasible). Deterministic: identical inputs and settings give bit-identical
/// results. Throws OptimizerError if the objective returns a non-finite value
/// and InvalidInput on dimension mismatches.
OptimizerResult minimize(const std::function<double(std::span<const double>)>& objective,
                         std::span<const double> init, const Box& bounds,
                         const OptimizerSettings& settings);

}  // namespace rlmpc
