// Times the episode batch runner: serial reference loop vs OpenMP workers on
// the same workload, and checks that both produce identical logs.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>

#include "rlmpc/harness.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool same_logs(const std::vector<rlmpc::EpisodeLog>& a, const std::vector<rlmpc::EpisodeLog>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].records.size() != b[i].records.size()) return false;
    if (a[i].accumulated != b[i].accumulated) return false;
    for (std::size_t k = 0; k < a[i].records.size(); ++k) {
      const auto& ra = a[i].records[k];
      const auto& rb = b[i].records[k];
      if (ra.state.x != rb.state.x || ra.state.y != rb.state.y ||
          ra.state.theta != rb.state.theta || ra.cost != rb.cost) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  int jobs = 0;
  if (argc > 1) jobs = std::atoi(argv[1]);
#ifdef _OPENMP
  if (jobs <= 0) jobs = omp_get_max_threads();
#else
  if (jobs <= 0) jobs = 1;
#endif

  rlmpc::ExperimentConfig cfg = rlmpc::default_experiment();
  cfg.repetitions = 2;
  cfg.duration = 8.0;
  const rlmpc::HorizonSetting setting{"bench", 8};

  std::cout << "episode batch: " << cfg.methods.size() << " methods x " << cfg.starts.size()
            << " poses x " << cfg.repetitions << " reps, " << cfg.duration << " s episodes\n";

  auto t0 = Clock::now();
  const rlmpc::BenchmarkResult serial = rlmpc::run_benchmark(cfg, setting, 1);
  const double serial_s = seconds_since(t0);
  std::cout << "serial reference: " << serial_s << " s\n";

  t0 = Clock::now();
  const rlmpc::BenchmarkResult parallel = rlmpc::run_benchmark(cfg, setting, jobs);
  const double parallel_s = seconds_since(t0);
  std::cout << "openmp (" << jobs << " workers): " << parallel_s << " s\n";
  std::cout << "speedup: " << serial_s / parallel_s << "x\n";

  if (!same_logs(serial.logs, parallel.logs)) {
    std::cout << "MISMATCH: parallel logs differ from serial reference\n";
    return 1;
  }
  std::cout << "parallel logs match the serial reference\n";
  return 0;
}
