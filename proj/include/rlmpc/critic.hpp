#pragma once

// Quadratic Q-function approximator shared by the learning controllers:
// feature map, temporal-difference error, experience replay, and the exact
// least-squares critic update.

#include <array>
#include <cstddef>
#include <deque>

#include "rlmpc/costs.hpp"
#include "rlmpc/dynamics.hpp"

namespace rlmpc {

inline constexpr int kChiDim = 5;  // (x, y, theta, v, omega)
inline constexpr int kFeatureDim = kChiDim * (kChiDim + 1) / 2;  // 15

/// Upper-triangular entries of chi * chi^T in row-major order:
///   [x^2, xy, x.th, xv, xw, y^2, y.th, yv, yw, th^2, th.v, th.w, v^2, vw, w^2]
/// The dimension is forced by the 5-vector chi; mismatches cannot arise.
using FeatureVector = std::array<double, kFeatureDim>;

/// Critic parameter vector, aligned with FeatureVector ordering.
using CriticWeights = std::array<double, kFeatureDim>;

/// One closed-loop sample. next_action is the action actually applied at the
/// next step (on-policy pairing); cost is running_cost(state, action, R).
struct Transition {
  State state;
  Action action;
  double cost = 0.0;
  State next_state;
  Action next_action;
};

/// Bounded FIFO of transitions, oldest first. Capacity M >= 1.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  /// Appends t; evicts the oldest transition once the buffer is full.
  void push(const Transition& t);

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }

  /// Index 0 is the oldest retained transition.
  const Transition& operator[](std::size_t i) const { return items_[i]; }

  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

 private:
  std::deque<Transition> items_;
  std::size_t capacity_;
};

/// Quadratic feature map phi(s, a).
FeatureVector features(const State& s, const Action& a);

/// Q-hat(s, a; w) = w . phi(s, a).
double q_value(const CriticWeights& w, const State& s, const Action& a);

/// e = Q-hat(t.state, t.action; w) - Q-hat(t.next_state, t.next_action; w_prev) - t.cost.
double td_error(const CriticWeights& w, const CriticWeights& w_prev, const Transition& t);

/// 1/2 * sum over the buffer of td_error^2. Throws EmptyBuffer on empty input.
double critic_loss(const CriticWeights& w, const CriticWeights& w_prev, const ReplayBuffer& buf);

struct CriticUpdate {
  CriticWeights weights{};
  double loss = 0.0;          // critic_loss at the returned weights
  bool rank_deficient = false;  // regression matrix had rank < kFeatureDim
};

/// Exact minimizer of the critic loss with w_prev held fixed. The error is
/// affine in w, so the argmin is the solution of the normal equations; a
/// Tikhonov term kCriticRidge * |w - w_prev|^2 keeps rank-deficient systems
/// well-posed (minimum change from the previous weights) and guarantees the
/// returned loss never exceeds the loss at w_prev. Rank deficiency is
/// flagged in the result.
inline constexpr double kCriticRidge = 1e-9;
CriticUpdate update_critic(const ReplayBuffer& buf, const CriticWeights& w_prev);

/// Weights reproducing the running cost: Q-hat(s, a) = rho(s, a). Used to
/// warm-start the critic so the learning actors behave like MPC until the
/// replay buffer has filled with informative data.
CriticWeights running_cost_weights(const CostMatrix& R);

/// Box-constrained variant of update_critic: minimizes the same regularized
/// objective subject to lower[i] <= w_i <= upper[i], via projected
/// Gauss-Seidel warm-started at the clamped previous weights. The closed-loop
/// controllers need the box: undiscounted value iteration on on-policy
/// trajectory data is an expansive fixed-point map, and unconstrained weight
/// magnitudes diverge at control rate.
CriticUpdate update_critic_boxed(const ReplayBuffer& buf, const CriticWeights& w_prev,
                                 const CriticWeights& lower, const CriticWeights& upper);

/// Weight box used by the controllers. Diagonal (squared-feature) weights
/// live in [R_i, cap]: the true cost-to-go dominates the running cost, so
/// along each feature axis w_ii >= R_i. Cross-term weights live in
/// [-cross_cap, cross_cap].
struct CriticBox {
  CriticWeights lower{};
  CriticWeights upper{};
};
CriticBox critic_box(const CostMatrix& R, double cap, double cross_cap);

}  // namespace rlmpc
