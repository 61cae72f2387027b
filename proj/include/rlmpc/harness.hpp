#pragma once

// Closed-loop episode simulation and the benchmark protocol: methods x
// starting poses x repetitions, per-cell aggregation, reproducible seeding.
// Episodes are independent; the batch runner has a serial reference path and
// an OpenMP path that must produce bit-identical results.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rlmpc/actors.hpp"
#include "rlmpc/costs.hpp"
#include "rlmpc/dynamics.hpp"

namespace rlmpc {

enum class PlantIntegrator { euler, rk4_fine };

std::string_view plant_integrator_name(PlantIntegrator p);
PlantIntegrator parse_plant_integrator(std::string_view name);  // throws InvalidConfig

/// A named prediction-horizon length; the benchmark is repeated per setting.
struct HorizonSetting {
  std::string name;
  int horizon = 1;
};

struct ExperimentConfig {
  std::vector<Pose> starts;  // world frame
  Pose goal{0.0, 0.0, 0.0, Frame::world};
  int repetitions = 5;
  double duration = 30.0;        // [s]
  double success_radius = 0.05;  // [m]
  double success_heading = 0.1;  // [rad]
  std::uint64_t seed = 1;
  PlantIntegrator plant = PlantIntegrator::euler;
  double actuation_noise = 0.0;  // std dev added to applied actions; 0 = off
  double init_jitter = 0.0;      // warm-start jitter std dev; 0 = off
  std::vector<Method> methods = {Method::mpc, Method::rql, Method::sql};
  std::vector<HorizonSetting> horizons = {{"long", 12}, {"short", 2}};
  /// Controller template per method (horizon filled in per setting).
  ControllerSpec mpc_spec;
  ControllerSpec rql_spec;
  ControllerSpec sql_spec;

  const ControllerSpec& spec_for(Method m) const;
  ControllerSpec resolved_spec(Method m, int horizon) const;
};

/// Default three starting poses: 1 m from the goal at bearings 180/135/90
/// degrees, heading pointing away from the goal.
std::vector<Pose> default_starts();

ExperimentConfig default_experiment();

/// Throws InvalidConfig naming the offending field.
void validate(const ExperimentConfig& cfg);

struct EpisodeLog {
  Method method = Method::mpc;
  std::string setting;  // horizon setting name
  int horizon = 0;
  int pose_index = 0;
  int repetition = 0;
  Pose start;  // world frame
  Pose goal;   // world frame
  std::uint64_t seed = 0;
  std::vector<StageRecord> records;  // goal-frame states, uniform delta spacing
  double accumulated = 0.0;
  double time_to_goal = std::numeric_limits<double>::infinity();  // [s]
  State final_state;  // goal frame, after the last plant step
  bool failed = false;
};

/// Seed for cell (method, pose, repetition): a pure function of the master
/// seed and the cell indices (splitmix64 chain).
std::uint64_t derive_seed(std::uint64_t master, int method_index, int pose_index, int repetition);

/// Simulates one closed-loop episode: transform to the goal frame, ask the
/// controller for an action, hold it for delta on the plant integrator,
/// record the stage. Controller exceptions mark the episode failed and keep
/// the partial log.
EpisodeLog run_episode(const ExperimentConfig& cfg, const ControllerSpec& spec,
                       const HorizonSetting& setting, int method_index, int pose_index,
                       int repetition);

struct CellStats {
  Method method = Method::mpc;
  int pose_index = 0;
  int repetitions = 0;
  int completed = 0;  // episodes that did not fail
  double mean_cost = 0.0;
  double min_cost = 0.0;
  double max_cost = 0.0;
  double mean_time_to_goal = std::numeric_limits<double>::infinity();
  double success_rate = 0.0;
};

struct BenchmarkResult {
  std::string setting;
  int horizon = 0;
  std::vector<EpisodeLog> logs;
  std::vector<CellStats> cells;
};

/// Per-cell reduction over episode logs, ordered (method, pose_index).
/// Failed episodes are excluded from the cost statistics but count against
/// the success rate.
std::vector<CellStats> aggregate(std::span<const EpisodeLog> logs);

/// Runs every (method, pose, repetition) episode of one horizon setting.
/// jobs <= 1 uses the serial reference loop; jobs > 1 distributes episodes
/// over OpenMP threads. Both paths fill the same pre-indexed slots, so the
/// logs are bit-identical regardless of jobs.
BenchmarkResult run_benchmark(const ExperimentConfig& cfg, const HorizonSetting& setting,
                              int jobs = 1);

}  // namespace rlmpc
