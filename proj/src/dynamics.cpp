#include "rlmpc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rlmpc/error.hpp"

namespace rlmpc {

namespace {

bool finite(const State& s) {
  return std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.theta);
}

bool finite(const Action& a) { return std::isfinite(a.v) && std::isfinite(a.omega); }

bool finite(const Pose& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.theta);
}

}  // namespace

double normalize_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(theta + std::numbers::pi, two_pi);
  if (r <= 0.0) r += two_pi;
  return r - std::numbers::pi;
}

Action clamp(const Action& a, const ActionBounds& bounds) {
  return {std::clamp(a.v, -bounds.v_max, bounds.v_max),
          std::clamp(a.omega, -bounds.omega_max, bounds.omega_max)};
}

StateDerivative derivative(const State& s, const Action& a) {
  if (!finite(s) || !finite(a)) throw InvalidInput("derivative: non-finite state or action");
  return {a.v * std::cos(s.theta), a.v * std::sin(s.theta), a.omega};
}

State euler_step(const State& s, const Action& a, double delta) {
  if (!(delta > 0.0)) throw InvalidConfig("euler_step: delta must be > 0");
  const StateDerivative d = derivative(s, a);
  return {s.x + delta * d.dx, s.y + delta * d.dy, s.theta + delta * d.dtheta};
}

State rk4_step(const State& s, const Action& a, double delta) {
  if (!(delta > 0.0)) throw InvalidConfig("rk4_step: delta must be > 0");
  const auto add = [](const State& base, const StateDerivative& d, double h) -> State {
    return {base.x + h * d.dx, base.y + h * d.dy, base.theta + h * d.dtheta};
  };
  const StateDerivative k1 = derivative(s, a);
  const StateDerivative k2 = derivative(add(s, k1, delta / 2.0), a);
  const StateDerivative k3 = derivative(add(s, k2, delta / 2.0), a);
  const StateDerivative k4 = derivative(add(s, k3, delta), a);
  const double h = delta / 6.0;
  return {s.x + h * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx),
          s.y + h * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy),
          s.theta + h * (k1.dtheta + 2.0 * k2.dtheta + 2.0 * k3.dtheta + k4.dtheta)};
}

std::vector<State> rollout(const State& s0, std::span<const Action> seq, double delta) {
  if (seq.empty()) throw InvalidInput("rollout: empty action sequence");
  std::vector<State> states;
  states.reserve(seq.size());
  states.push_back(s0);
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    states.push_back(euler_step(states.back(), seq[i], delta));
  }
  return states;
}

Pose to_goal_frame(const Pose& robot, const Pose& goal) {
  if (!finite(robot) || !finite(goal)) throw InvalidInput("to_goal_frame: non-finite pose");
  if (robot.frame != Frame::world || goal.frame != Frame::world) {
    throw InvalidInput("to_goal_frame: both poses must be world-framed");
  }
  // Inverse rigid transform of the goal pose applied to the robot position,
  // so that robot == goal maps to the zero state.
  const double c = std::cos(goal.theta);
  const double s = std::sin(goal.theta);
  const double dx = robot.x - goal.x;
  const double dy = robot.y - goal.y;
  return {c * dx + s * dy, -s * dx + c * dy, normalize_angle(robot.theta - goal.theta),
          Frame::goal};
}

}  // namespace rlmpc
