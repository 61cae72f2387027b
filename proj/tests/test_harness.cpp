#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "rlmpc/error.hpp"
#include "rlmpc/harness.hpp"

using namespace rlmpc;

namespace {

ExperimentConfig quick_config() {
  ExperimentConfig cfg = default_experiment();
  cfg.repetitions = 1;
  cfg.duration = 2.0;
  return cfg;
}

bool identical(const EpisodeLog& a, const EpisodeLog& b) {
  if (a.records.size() != b.records.size() || a.accumulated != b.accumulated ||
      a.seed != b.seed || a.failed != b.failed) {
    return false;
  }
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const StageRecord& ra = a.records[i];
    const StageRecord& rb = b.records[i];
    if (ra.time != rb.time || ra.state.x != rb.state.x || ra.state.y != rb.state.y ||
        ra.state.theta != rb.state.theta || ra.action.v != rb.action.v ||
        ra.action.omega != rb.action.omega || ra.cost != rb.cost) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("starting at the goal keeps the robot there") {
  ExperimentConfig cfg = quick_config();
  cfg.starts = {cfg.goal};
  cfg.duration = 5.0;
  const HorizonSetting setting{"test", 6};
  const EpisodeLog log =
      run_episode(cfg, cfg.resolved_spec(Method::mpc, setting.horizon), setting, 0, 0, 0);
  REQUIRE_FALSE(log.failed);
  for (const StageRecord& r : log.records) {
    CHECK(std::hypot(r.state.x, r.state.y) <= 1e-2);
  }
  CHECK(log.accumulated < 1e-3);
  CHECK(log.time_to_goal == 0.0);
}

TEST_CASE("episode logs have ceil(duration/delta) records at exact stamps") {
  ExperimentConfig cfg = quick_config();
  cfg.duration = 1.234;  // not a multiple of delta
  const HorizonSetting setting{"test", 2};
  const ControllerSpec spec = cfg.resolved_spec(Method::mpc, 2);
  const EpisodeLog log = run_episode(cfg, spec, setting, 0, 0, 0);
  const int expect = static_cast<int>(std::ceil(cfg.duration / spec.delta));
  REQUIRE(static_cast<int>(log.records.size()) == expect);
  for (int k = 0; k < expect; ++k) {
    CHECK(log.records[static_cast<std::size_t>(k)].time == static_cast<double>(k) * spec.delta);
  }
  CHECK(log.accumulated == accumulated_cost(log.records, spec.delta));
}

TEST_CASE("identical seed and config give bit-identical episodes") {
  ExperimentConfig cfg = quick_config();
  cfg.actuation_noise = 0.01;  // exercise the stochastic path too
  const HorizonSetting setting{"test", 3};
  const ControllerSpec spec = cfg.resolved_spec(Method::sql, 3);
  const EpisodeLog a = run_episode(cfg, spec, setting, 0, 1, 0);
  const EpisodeLog b = run_episode(cfg, spec, setting, 0, 1, 0);
  CHECK(identical(a, b));
}

TEST_CASE("seed derivation is pure and collision-free across cells") {
  std::set<std::uint64_t> seen;
  for (int m = 0; m < 3; ++m) {
    for (int p = 0; p < 3; ++p) {
      for (int r = 0; r < 5; ++r) {
        const std::uint64_t s = derive_seed(7, m, p, r);
        CHECK(s == derive_seed(7, m, p, r));
        CHECK(seen.insert(s).second);
      }
    }
  }
  CHECK(derive_seed(7, 0, 0, 0) != derive_seed(8, 0, 0, 0));
}

TEST_CASE("an episode depends only on its own cell seed") {
  ExperimentConfig cfg = quick_config();
  cfg.repetitions = 2;
  cfg.actuation_noise = 0.02;
  cfg.methods = {Method::mpc};
  const HorizonSetting setting{"test", 2};
  const BenchmarkResult batch = run_benchmark(cfg, setting, 1);
  // Re-run one cell standalone; it must reproduce the batch log exactly.
  const EpisodeLog solo =
      run_episode(cfg, cfg.resolved_spec(Method::mpc, 2), setting, 0, 1, 1);
  bool found = false;
  for (const EpisodeLog& log : batch.logs) {
    if (log.pose_index == 1 && log.repetition == 1) {
      CHECK(identical(log, solo));
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("benchmark counting: methods x poses x reps logs, methods x poses cells") {
  ExperimentConfig cfg = quick_config();
  cfg.repetitions = 2;
  cfg.duration = 1.0;
  const BenchmarkResult result = run_benchmark(cfg, {"test", 2}, 1);
  CHECK(result.logs.size() == 3 * 3 * 2);
  CHECK(result.cells.size() == 3 * 3);
  for (const CellStats& cell : result.cells) {
    CHECK(cell.repetitions == 2);
    CHECK(cell.completed == 2);
  }
}

TEST_CASE("aggregate means match an independent recomputation") {
  ExperimentConfig cfg = quick_config();
  cfg.repetitions = 3;
  cfg.duration = 1.0;
  cfg.actuation_noise = 0.05;  // make repetitions differ
  cfg.methods = {Method::mpc, Method::sql};
  const BenchmarkResult result = run_benchmark(cfg, {"test", 2}, 1);
  for (const CellStats& cell : result.cells) {
    double sum = 0.0;
    int count = 0;
    for (const EpisodeLog& log : result.logs) {
      if (log.method == cell.method && log.pose_index == cell.pose_index && !log.failed) {
        sum += log.accumulated;
        ++count;
      }
    }
    REQUIRE(count == cell.completed);
    CHECK(cell.mean_cost == doctest::Approx(sum / count).epsilon(1e-15));
  }
}

TEST_CASE("parallel episode batch matches the serial reference bit for bit") {
  ExperimentConfig cfg = quick_config();
  cfg.repetitions = 2;
  cfg.duration = 1.5;
  cfg.actuation_noise = 0.01;
  const HorizonSetting setting{"test", 3};
  const BenchmarkResult serial = run_benchmark(cfg, setting, 1);
  const BenchmarkResult parallel = run_benchmark(cfg, setting, 4);
  REQUIRE(serial.logs.size() == parallel.logs.size());
  for (std::size_t i = 0; i < serial.logs.size(); ++i) {
    CHECK(identical(serial.logs[i], parallel.logs[i]));
  }
}

TEST_CASE("MPC with a long horizon approaches the goal from a facing start") {
  ExperimentConfig cfg = default_experiment();
  cfg.starts = {{-1.0, 0.0, 0.0, Frame::world}};  // heading toward the goal
  cfg.duration = 30.0;
  cfg.methods = {Method::mpc};
  const HorizonSetting setting{"long", 12};
  const EpisodeLog log =
      run_episode(cfg, cfg.resolved_spec(Method::mpc, 12), setting, 0, 0, 0);
  REQUIRE_FALSE(log.failed);
  double closest = std::numeric_limits<double>::infinity();
  for (const StageRecord& r : log.records) {
    closest = std::min(closest, std::hypot(r.state.x, r.state.y));
  }
  CHECK(closest < 0.05);
}

TEST_CASE("a diverging episode is marked failed and keeps its partial log") {
  ExperimentConfig cfg = quick_config();
  // Position so large that the quadratic running cost overflows: the
  // controller holds its fallback action and the episode cannot proceed.
  cfg.starts = {{1e170, 0.0, 0.0, Frame::world}};
  const HorizonSetting setting{"test", 2};
  const EpisodeLog log = run_episode(cfg, cfg.resolved_spec(Method::mpc, 2), setting, 0, 0, 0);
  CHECK(log.failed);
  CHECK(log.records.empty());  // failed on the very first stage

  // Failed episodes count against the success rate but not the cost stats.
  const std::vector<EpisodeLog> logs{log};
  const std::vector<CellStats> cells = aggregate(logs);
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].repetitions == 1);
  CHECK(cells[0].completed == 0);
  CHECK(cells[0].success_rate == 0.0);
}

TEST_CASE("experiment config validation") {
  ExperimentConfig cfg = quick_config();
  cfg.duration = -1.0;
  CHECK_THROWS_AS(validate(cfg), InvalidConfig);
  cfg = quick_config();
  cfg.repetitions = 0;
  CHECK_THROWS_AS(validate(cfg), InvalidConfig);
  cfg = quick_config();
  cfg.horizons.clear();
  CHECK_THROWS_AS(validate(cfg), InvalidConfig);
  CHECK_THROWS_AS(parse_plant_integrator("verlet"), InvalidConfig);
}
