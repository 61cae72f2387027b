#include "rlmpc/costs.hpp"

#include <cmath>

#include "rlmpc/error.hpp"

namespace rlmpc {

void validate(const CostMatrix& R) {
  for (double r : R.diag) {
    if (!std::isfinite(r) || r <= 0.0) {
      throw InvalidConfig("cost matrix entries must be finite and > 0");
    }
  }
}

double running_cost(const State& s, const Action& a, const CostMatrix& R) {
  const double chi[5] = {s.x, s.y, s.theta, a.v, a.omega};
  double sum = 0.0;
  for (int i = 0; i < 5; ++i) {
    if (!std::isfinite(chi[i])) throw InvalidInput("running_cost: non-finite input");
    sum += R.diag[static_cast<std::size_t>(i)] * chi[i] * chi[i];
  }
  return sum;
}

double discounted_sum(std::span<const double> costs, double gamma) {
  if (!(gamma > 0.0) || gamma > 1.0) throw InvalidConfig("discounted_sum: gamma must be in (0, 1]");
  double sum = 0.0;
  double w = 1.0;
  for (double c : costs) {
    sum += w * c;
    w *= gamma;
  }
  return sum;
}

double accumulated_cost(std::span<const StageRecord> log, double delta) {
  double sum = 0.0;
  for (const StageRecord& r : log) sum += r.cost;
  return delta * sum;
}

}  // namespace rlmpc
