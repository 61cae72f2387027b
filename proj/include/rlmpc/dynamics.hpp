#pragma once

// Differential-drive kinematics, one-step integrators, receding-horizon state
// prediction, and the world-to-goal frame transform.

#include <span>
#include <vector>

namespace rlmpc {

/// Robot configuration (x [m], y [m], heading [rad]). Heading is stored
/// unwrapped; use normalize_angle() to map into (-pi, pi].
struct State {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

/// Time derivative of a State.
struct StateDerivative {
  double dx = 0.0;
  double dy = 0.0;
  double dtheta = 0.0;
};

/// Control input: linear velocity v [m/s] and angular velocity omega [rad/s].
struct Action {
  double v = 0.0;
  double omega = 0.0;
};

/// Symmetric box limits on the action channels.
struct ActionBounds {
  double v_max = 0.22;      // [m/s]
  double omega_max = 2.48;  // [rad/s]
};

enum class Frame { world, goal };

/// A State tagged with the frame it is expressed in.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  Frame frame = Frame::world;
};

using ActionSequence = std::vector<Action>;

/// Maps any angle to the half-open interval (-pi, pi]. Idempotent.
double normalize_angle(double theta);

/// Clamps both action channels into the box.
Action clamp(const Action& a, const ActionBounds& bounds);

inline State to_state(const Pose& p) { return {p.x, p.y, p.theta}; }

/// Kinematic model: (v cos theta, v sin theta, omega).
/// Throws InvalidInput on non-finite state or action.
StateDerivative derivative(const State& s, const Action& a);

/// Explicit Euler step s + delta * f(s, a). Throws InvalidConfig if delta <= 0.
State euler_step(const State& s, const Action& a, double delta);

/// Classical 4th-order Runge-Kutta step with the action held constant over
/// the interval. Used as the fine-integration reference and optionally as the
/// plant integrator; the controllers predict with euler_step only.
State rk4_step(const State& s, const Action& a, double delta);

/// Predicted states along an action sequence. Element 0 is s0 itself and
/// element i+1 = euler_step(element i, seq[i], delta); the returned vector has
/// the same length as seq, so the final action only ever appears paired with
/// the final predicted state.
std::vector<State> rollout(const State& s0, std::span<const Action> seq, double delta);

/// Expresses a world-frame robot pose in the frame attached to a world-frame
/// goal pose. The goal maps to (0, 0, 0); the returned heading is
/// normalize_angle(theta_robot - theta_goal). Throws InvalidInput if either
/// pose is non-finite or not world-framed.
Pose to_goal_frame(const Pose& robot, const Pose& goal);

}  // namespace rlmpc
