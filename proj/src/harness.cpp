#include "rlmpc/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>

#include "rlmpc/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rlmpc {

std::string_view plant_integrator_name(PlantIntegrator p) {
  return p == PlantIntegrator::euler ? "euler" : "rk4-fine";
}

PlantIntegrator parse_plant_integrator(std::string_view name) {
  if (name == "euler") return PlantIntegrator::euler;
  if (name == "rk4-fine") return PlantIntegrator::rk4_fine;
  throw InvalidConfig("unknown plant_integrator '" + std::string(name) +
                      "' (expected euler or rk4-fine)");
}

const ControllerSpec& ExperimentConfig::spec_for(Method m) const {
  switch (m) {
    case Method::mpc: return mpc_spec;
    case Method::rql: return rql_spec;
    case Method::sql: return sql_spec;
  }
  return mpc_spec;
}

ControllerSpec ExperimentConfig::resolved_spec(Method m, int horizon) const {
  ControllerSpec spec = spec_for(m);
  spec.method = m;
  spec.horizon = horizon;
  spec.init_jitter = init_jitter;
  return spec;
}

std::vector<Pose> default_starts() {
  const double pi = std::numbers::pi;
  // 1 m radius, bearings 180/135/90 degrees, heading radially outward.
  return {{-1.0, 0.0, pi, Frame::world},
          {-std::sqrt(0.5), std::sqrt(0.5), 0.75 * pi, Frame::world},
          {0.0, 1.0, 0.5 * pi, Frame::world}};
}

ExperimentConfig default_experiment() {
  ExperimentConfig cfg;
  cfg.starts = default_starts();
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.starts.empty()) throw InvalidConfig("starts: at least one starting pose required");
  const auto finite_pose = [](const Pose& p) {
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.theta);
  };
  for (const Pose& p : cfg.starts) {
    if (!finite_pose(p)) throw InvalidConfig("starts: poses must be finite");
  }
  if (!finite_pose(cfg.goal)) throw InvalidConfig("goal: must be finite");
  if (cfg.repetitions < 1) throw InvalidConfig("repetitions: must be >= 1");
  if (!(cfg.duration > 0.0)) throw InvalidConfig("duration: must be > 0");
  if (!(cfg.success_radius > 0.0)) throw InvalidConfig("success_radius: must be > 0");
  if (!(cfg.success_heading > 0.0)) throw InvalidConfig("success_heading: must be > 0");
  if (cfg.actuation_noise < 0.0) throw InvalidConfig("actuation_noise: must be >= 0");
  if (cfg.init_jitter < 0.0) throw InvalidConfig("init_jitter: must be >= 0");
  if (cfg.methods.empty()) throw InvalidConfig("methods: at least one method required");
  for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
    for (std::size_t j = i + 1; j < cfg.methods.size(); ++j) {
      if (cfg.methods[i] == cfg.methods[j]) {
        throw InvalidConfig("methods: duplicate entry '" +
                            std::string(method_name(cfg.methods[i])) + "'");
      }
    }
  }
  if (cfg.horizons.empty()) throw InvalidConfig("horizons: at least one horizon setting required");
  for (const HorizonSetting& h : cfg.horizons) {
    if (h.name.empty()) throw InvalidConfig("horizons: setting name must be non-empty");
    // Setting names become file names.
    for (char c : h.name) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') {
        throw InvalidConfig("horizons: setting name '" + h.name +
                            "' may only contain letters, digits, '-' and '.'");
      }
    }
    if (h.horizon < 1) throw InvalidConfig("horizons: horizon must be >= 1");
  }
  for (std::size_t i = 0; i < cfg.horizons.size(); ++i) {
    for (std::size_t j = i + 1; j < cfg.horizons.size(); ++j) {
      if (cfg.horizons[i].name == cfg.horizons[j].name) {
        throw InvalidConfig("horizons: duplicate setting name '" + cfg.horizons[i].name + "'");
      }
    }
  }
  for (Method m : cfg.methods) {
    ControllerSpec spec = cfg.resolved_spec(m, cfg.horizons.front().horizon);
    try {
      validate(spec);
    } catch (const InvalidConfig& e) {
      throw InvalidConfig(std::string(method_name(m)) + ": " + e.what());
    }
  }
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

State plant_step(const State& s, const Action& a, double delta, PlantIntegrator mode) {
  if (mode == PlantIntegrator::euler) return euler_step(s, a, delta);
  // Plant-model mismatch mode: fine RK4 ground truth at delta / 10.
  State out = s;
  const double h = delta / 10.0;
  for (int i = 0; i < 10; ++i) out = rk4_step(out, a, h);
  return out;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, int method_index, int pose_index,
                          int repetition) {
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ static_cast<std::uint64_t>(method_index + 1));
  s = splitmix64(s ^ static_cast<std::uint64_t>(pose_index + 1));
  s = splitmix64(s ^ static_cast<std::uint64_t>(repetition + 1));
  return s;
}

EpisodeLog run_episode(const ExperimentConfig& cfg, const ControllerSpec& spec,
                       const HorizonSetting& setting, int method_index, int pose_index,
                       int repetition) {
  EpisodeLog log;
  log.method = spec.method;
  log.setting = setting.name;
  log.horizon = setting.horizon;
  log.pose_index = pose_index;
  log.repetition = repetition;
  log.start = cfg.starts[static_cast<std::size_t>(pose_index)];
  log.goal = cfg.goal;
  log.seed = derive_seed(cfg.seed, method_index, pose_index, repetition);

  ControllerSpec episode_spec = spec;
  episode_spec.jitter_seed = log.seed;
  Controller controller(episode_spec);

  std::mt19937_64 rng(splitmix64(log.seed));
  std::normal_distribution<double> noise(0.0, cfg.actuation_noise);

  const int steps = static_cast<int>(std::ceil(cfg.duration / spec.delta));
  log.records.reserve(static_cast<std::size_t>(steps));

  State world = to_state(log.start);
  for (int k = 0; k < steps; ++k) {
    const Pose world_pose{world.x, world.y, world.theta, Frame::world};
    State s;
    Action applied;
    try {
      s = to_state(to_goal_frame(world_pose, cfg.goal));
      applied = controller.compute_action(s);
      if (cfg.actuation_noise > 0.0) {
        applied = clamp({applied.v + noise(rng), applied.omega + noise(rng)}, spec.bounds);
      }
      const double cost = running_cost(s, applied, spec.cost);
      if (!std::isfinite(cost)) throw InvalidInput("running cost overflow");
      log.records.push_back({static_cast<double>(k) * spec.delta, s, applied, cost});
      world = plant_step(world, applied, spec.delta, cfg.plant);
    } catch (const std::exception&) {
      log.failed = true;
      break;
    }
  }

  log.accumulated = accumulated_cost(log.records, spec.delta);
  for (const StageRecord& r : log.records) {
    if (std::hypot(r.state.x, r.state.y) <= cfg.success_radius &&
        std::abs(r.state.theta) <= cfg.success_heading) {
      log.time_to_goal = r.time;
      break;
    }
  }
  try {
    log.final_state =
        to_state(to_goal_frame({world.x, world.y, world.theta, Frame::world}, cfg.goal));
  } catch (const std::exception&) {
    log.failed = true;
  }
  return log;
}

std::vector<CellStats> aggregate(std::span<const EpisodeLog> logs) {
  // Cell order is fixed (method enum order, then pose index) so that reports
  // regenerated from persisted logs match the original byte for byte.
  std::vector<CellStats> cells;
  for (Method m : {Method::mpc, Method::rql, Method::sql}) {
    std::vector<int> poses;
    for (const EpisodeLog& log : logs) {
      if (log.method == m && std::find(poses.begin(), poses.end(), log.pose_index) == poses.end()) {
        poses.push_back(log.pose_index);
      }
    }
    std::sort(poses.begin(), poses.end());
    for (int pose : poses) {
      CellStats cell;
      cell.method = m;
      cell.pose_index = pose;
      double cost_sum = 0.0;
      double ttg_sum = 0.0;
      int reached = 0;
      for (const EpisodeLog& log : logs) {
        if (log.method != m || log.pose_index != pose) continue;
        ++cell.repetitions;
        if (log.failed) continue;
        ++cell.completed;
        cost_sum += log.accumulated;
        if (cell.completed == 1) {
          cell.min_cost = cell.max_cost = log.accumulated;
        } else {
          cell.min_cost = std::min(cell.min_cost, log.accumulated);
          cell.max_cost = std::max(cell.max_cost, log.accumulated);
        }
        if (std::isfinite(log.time_to_goal)) {
          ++reached;
          ttg_sum += log.time_to_goal;
        }
      }
      if (cell.completed > 0) cell.mean_cost = cost_sum / cell.completed;
      if (reached > 0) cell.mean_time_to_goal = ttg_sum / reached;
      cell.success_rate =
          cell.repetitions > 0 ? static_cast<double>(reached) / cell.repetitions : 0.0;
      cells.push_back(cell);
    }
  }
  return cells;
}

BenchmarkResult run_benchmark(const ExperimentConfig& cfg, const HorizonSetting& setting,
                              int jobs) {
  validate(cfg);

  struct Cell {
    int method_index;
    int pose_index;
    int repetition;
  };
  std::vector<Cell> plan;
  for (int mi = 0; mi < static_cast<int>(cfg.methods.size()); ++mi) {
    for (int pi = 0; pi < static_cast<int>(cfg.starts.size()); ++pi) {
      for (int rep = 0; rep < cfg.repetitions; ++rep) plan.push_back({mi, pi, rep});
    }
  }

  BenchmarkResult result;
  result.setting = setting.name;
  result.horizon = setting.horizon;
  result.logs.resize(plan.size());

  const auto run_cell = [&](std::size_t i) {
    const Cell& c = plan[i];
    const Method m = cfg.methods[static_cast<std::size_t>(c.method_index)];
    const ControllerSpec spec = cfg.resolved_spec(m, setting.horizon);
    result.logs[i] = run_episode(cfg, spec, setting, c.method_index, c.pose_index, c.repetition);
  };

#ifdef _OPENMP
  if (jobs > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (std::size_t i = 0; i < plan.size(); ++i) run_cell(i);
  } else {
    for (std::size_t i = 0; i < plan.size(); ++i) run_cell(i);
  }
#else
  (void)jobs;
  for (std::size_t i = 0; i < plan.size(); ++i) run_cell(i);
#endif

  result.cells = aggregate(result.logs);
  return result;
}

}  // namespace rlmpc
