#pragma once

// The three receding-horizon actors (MPC, rollout Q-learning, stacked
// Q-learning), the box-constrained sequence optimization they share, and the
// stateful per-step control loop.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "rlmpc/costs.hpp"
#include "rlmpc/critic.hpp"
#include "rlmpc/dynamics.hpp"
#include "rlmpc/optimizer.hpp"

namespace rlmpc {

enum class Method { mpc, rql, sql };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);  // throws InvalidConfig

struct ControllerSpec {
  Method method = Method::mpc;
  int horizon = 12;              // N, prediction stages
  double delta = 0.1;            // [s], zero-order-hold interval
  double gamma = 1.0;            // discount; used by the MPC objective only
  CostMatrix cost;               // R
  std::size_t buffer_size = 20;  // M; ignored by MPC
  ActionBounds bounds;
  OptimizerSettings optimizer;   // max_evaluations = 0 means 100 * (2N)
  /// Critic weight box (see critic_box): squared-feature weights live in
  /// [R_i, critic_weight_cap], cross-term weights in [-critic_cross_cap,
  /// critic_cross_cap]. Ignored by MPC.
  double critic_weight_cap = 50.0;
  double critic_cross_cap = 0.25;
  double init_jitter = 0.0;      // warm-start perturbation std dev; 0 = off
  std::uint64_t jitter_seed = 0;
};

/// Throws InvalidConfig naming the offending field.
void validate(const ControllerSpec& spec);

/// Finite-horizon cost sum_{i=1..N} gamma^(i-1) rho(x_i, u_i) along the Euler
/// prediction, with x_1 = s. Throws InvalidInput if seq length != N.
double mpc_objective(const State& s, std::span<const Action> seq, const ControllerSpec& spec);

/// Running cost over the first N-1 predicted stages plus the critic value at
/// the terminal stage: sum_{i=1..N-1} rho(x_i, u_i) + Q-hat(x_N, u_N; w).
/// For N = 1 this is plain Q-hat(s, u_1; w) and no model prediction is used.
double rql_objective(const State& s, std::span<const Action> seq, const CriticWeights& w,
                     const ControllerSpec& spec);

/// Critic value summed over every predicted stage:
/// sum_{i=1..N} Q-hat(x_i, u_i; w).
double sql_objective(const State& s, std::span<const Action> seq, const CriticWeights& w,
                     const ControllerSpec& spec);

struct SequenceResult {
  ActionSequence argmin;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Minimizes an objective over action sequences of fixed length within the
/// action box. init must be feasible; the result is feasible and no worse
/// than init. Deterministic.
SequenceResult minimize_sequence(const std::function<double(std::span<const Action>)>& objective,
                                 const ActionSequence& init, const ActionBounds& bounds,
                                 const OptimizerSettings& settings);

/// One controller instance: owns its critic weights, replay buffer, and
/// warm-started sequence. Stateful and single-threaded; distinct instances
/// are independent.
class Controller {
 public:
  explicit Controller(const ControllerSpec& spec);

  /// One control step for the goal-frame state s: updates the critic from
  /// replay (learning methods only, once two transitions exist), minimizes
  /// the method objective over the action sequence, records the completed
  /// transition, and returns the first action of the optimized sequence.
  /// If the optimizer fails the previously applied action is held.
  Action compute_action(const State& s);

  const ControllerSpec& spec() const { return spec_; }
  const CriticWeights& weights() const { return weights_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  int optimizer_failures() const { return optimizer_failures_; }

 private:
  ControllerSpec spec_;
  CriticBox box_;
  CriticWeights weights_{};
  ReplayBuffer buffer_;
  ActionSequence warm_start_;
  Action previous_action_{};
  int optimizer_failures_ = 0;
  std::mt19937_64 jitter_rng_;

  struct Pending {
    State state;
    Action action;
    double cost;
  };
  std::optional<Pending> pending_;
};

}  // namespace rlmpc
