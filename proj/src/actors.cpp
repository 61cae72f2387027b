#include "rlmpc/actors.hpp"

#include <cmath>
#include <iostream>

#include "rlmpc/error.hpp"

namespace rlmpc {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::mpc: return "mpc";
    case Method::rql: return "rql";
    case Method::sql: return "sql";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "mpc") return Method::mpc;
  if (name == "rql") return Method::rql;
  if (name == "sql") return Method::sql;
  throw InvalidConfig("unknown method '" + std::string(name) + "' (expected mpc, rql or sql)");
}

void validate(const ControllerSpec& spec) {
  if (spec.horizon < 1) throw InvalidConfig("horizon: must be >= 1");
  if (!(spec.delta > 0.0) || !std::isfinite(spec.delta)) throw InvalidConfig("delta: must be > 0");
  if (!(spec.gamma > 0.0) || spec.gamma > 1.0) throw InvalidConfig("gamma: must be in (0, 1]");
  validate(spec.cost);
  if (spec.buffer_size < 1) throw InvalidConfig("buffer_size: must be >= 1");
  if (!(spec.bounds.v_max > 0.0)) throw InvalidConfig("v_max: must be > 0");
  if (!(spec.bounds.omega_max > 0.0)) throw InvalidConfig("omega_max: must be > 0");
  if (spec.optimizer.max_evaluations < 0) throw InvalidConfig("optimizer_max_evals: must be >= 0");
  if (!(spec.critic_weight_cap > 0.0)) throw InvalidConfig("critic_weight_cap: must be > 0");
  for (double r : spec.cost.diag) {
    if (r > spec.critic_weight_cap) {
      throw InvalidConfig("critic_weight_cap: must be >= every cost weight");
    }
  }
  if (spec.critic_cross_cap < 0.0) throw InvalidConfig("critic_cross_cap: must be >= 0");
  if (!(spec.optimizer.tolerance > 0.0)) throw InvalidConfig("optimizer_tolerance: must be > 0");
  if (spec.init_jitter < 0.0) throw InvalidConfig("init_jitter: must be >= 0");
}

namespace {

void check_length(std::span<const Action> seq, const ControllerSpec& spec, const char* who) {
  if (static_cast<int>(seq.size()) != spec.horizon) {
    throw InvalidInput(std::string(who) + ": sequence length does not match horizon");
  }
}

}  // namespace

double mpc_objective(const State& s, std::span<const Action> seq, const ControllerSpec& spec) {
  check_length(seq, spec, "mpc_objective");
  const std::vector<State> states = rollout(s, seq, spec.delta);
  double sum = 0.0;
  double w = 1.0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    sum += w * running_cost(states[i], seq[i], spec.cost);
    w *= spec.gamma;
  }
  return sum;
}

double rql_objective(const State& s, std::span<const Action> seq, const CriticWeights& w,
                     const ControllerSpec& spec) {
  check_length(seq, spec, "rql_objective");
  const std::vector<State> states = rollout(s, seq, spec.delta);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    sum += running_cost(states[i], seq[i], spec.cost);
  }
  return sum + q_value(w, states.back(), seq.back());
}

double sql_objective(const State& s, std::span<const Action> seq, const CriticWeights& w,
                     const ControllerSpec& spec) {
  check_length(seq, spec, "sql_objective");
  const std::vector<State> states = rollout(s, seq, spec.delta);
  double sum = 0.0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    sum += q_value(w, states[i], seq[i]);
  }
  return sum;
}

SequenceResult minimize_sequence(const std::function<double(std::span<const Action>)>& objective,
                                 const ActionSequence& init, const ActionBounds& bounds,
                                 const OptimizerSettings& settings) {
  const std::size_t n = init.size();
  if (n == 0) throw InvalidInput("minimize_sequence: empty initial sequence");

  Box box;
  box.lower.reserve(2 * n);
  box.upper.reserve(2 * n);
  std::vector<double> flat;
  flat.reserve(2 * n);
  for (const Action& a : init) {
    flat.push_back(a.v);
    flat.push_back(a.omega);
    box.lower.push_back(-bounds.v_max);
    box.upper.push_back(bounds.v_max);
    box.lower.push_back(-bounds.omega_max);
    box.upper.push_back(bounds.omega_max);
  }

  ActionSequence scratch(n);
  const auto unpack = [&scratch, n](std::span<const double> x) -> const ActionSequence& {
    for (std::size_t i = 0; i < n; ++i) scratch[i] = {x[2 * i], x[2 * i + 1]};
    return scratch;
  };

  const OptimizerResult res = minimize(
      [&](std::span<const double> x) { return objective(unpack(x)); }, flat, box, settings);

  SequenceResult out;
  out.argmin = unpack(res.argmin);
  out.value = res.value;
  out.evaluations = res.evaluations;
  out.converged = res.converged;
  return out;
}

Controller::Controller(const ControllerSpec& spec)
    : spec_(spec),
      buffer_(spec.buffer_size),
      warm_start_(static_cast<std::size_t>(spec.horizon)),
      jitter_rng_(spec.jitter_seed) {
  validate(spec_);
  box_ = critic_box(spec_.cost, spec_.critic_weight_cap, spec_.critic_cross_cap);
  // Critic warm start: Q-hat == running cost. The learning actors then
  // coincide with undiscounted MPC until replay data accumulates.
  weights_ = running_cost_weights(spec_.cost);
}

Action Controller::compute_action(const State& s) {
  const bool learning = spec_.method != Method::mpc;

  // Critic first, then actor, in that order each step. The previous weights
  // enter the TD target and are held fixed across the update. The weight box
  // matters: without it the undiscounted value iteration diverges on
  // closed-loop trajectory data.
  if (learning && buffer_.size() >= 2) {
    weights_ = update_critic_boxed(buffer_, weights_, box_.lower, box_.upper).weights;
  }

  std::function<double(std::span<const Action>)> objective;
  switch (spec_.method) {
    case Method::mpc:
      objective = [&](std::span<const Action> seq) { return mpc_objective(s, seq, spec_); };
      break;
    case Method::rql:
      objective = [&](std::span<const Action> seq) {
        return rql_objective(s, seq, weights_, spec_);
      };
      break;
    case Method::sql:
      objective = [&](std::span<const Action> seq) {
        return sql_objective(s, seq, weights_, spec_);
      };
      break;
  }

  ActionSequence init = warm_start_;
  if (spec_.init_jitter > 0.0) {
    std::normal_distribution<double> noise(0.0, spec_.init_jitter);
    for (Action& a : init) {
      a = clamp({a.v + noise(jitter_rng_), a.omega + noise(jitter_rng_)}, spec_.bounds);
    }
  }

  Action applied;
  ActionSequence solution;
  try {
    SequenceResult res = minimize_sequence(objective, init, spec_.bounds, spec_.optimizer);
    solution = std::move(res.argmin);
    applied = solution.front();
  } catch (const OptimizerError& err) {
    ++optimizer_failures_;
    std::cerr << "[rlmpc] warning: sequence optimizer failed (" << err.what()
              << "); holding previous action\n";
    applied = previous_action_;
    solution = warm_start_;
  }

  if (learning) {
    if (pending_) {
      buffer_.push({pending_->state, pending_->action, pending_->cost, s, applied});
    }
    pending_ = Pending{s, applied, running_cost(s, applied, spec_.cost)};
  }

  // Receding-horizon warm start: shift by one step, repeat the last action.
  warm_start_.assign(solution.begin() + 1, solution.end());
  warm_start_.push_back(solution.back());

  previous_action_ = applied;
  return applied;
}

}  // namespace rlmpc
