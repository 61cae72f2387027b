#include "rlmpc/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rlmpc/config.hpp"
#include "rlmpc/episode_io.hpp"
#include "rlmpc/error.hpp"
#include "rlmpc/version.hpp"

namespace rlmpc::cli {

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

json load_raw_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidConfig(std::string("config parse error: ") + e.what());
  }
}

int report_failure(const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  if (dynamic_cast<const InvalidConfig*>(&e)) return kExitValidation;
  return kExitRuntime;
}

void print_summary(const BenchmarkResult& result, std::ostream& os) {
  os << "setting '" << result.setting << "' (N = " << result.horizon << ")\n";
  for (const CellStats& cell : result.cells) {
    os << "  " << method_name(cell.method) << " pose " << cell.pose_index
       << ": mean cost = " << cell.mean_cost << ", success rate = " << cell.success_rate;
    if (std::isfinite(cell.mean_time_to_goal)) {
      os << ", mean time to goal = " << cell.mean_time_to_goal << " s";
    }
    os << "\n";
  }
}

}  // namespace

std::filesystem::path default_output_root() {
  if (const char* root = std::getenv("RLMPC_OUT_ROOT")) return root;
  return ".";
}

int cmd_run(const RunOptions& opts) {
  try {
    json doc = load_raw_config(opts.config);
    for (const std::string& assignment : opts.overrides) apply_override(doc, assignment);
    if (opts.seed) doc["experiment"]["seed"] = *opts.seed;
    const ExperimentConfig cfg = parse_config(doc);
    const json effective = effective_config(cfg);

    const std::filesystem::path out =
        opts.out.empty() ? default_output_root() / "rlmpc-out" : opts.out;
    std::error_code ec;
    std::filesystem::create_directories(out / "episodes", ec);
    std::filesystem::create_directories(out / "plots", ec);
    if (ec) throw IoError("cannot create output directory: " + out.string());

    std::cout << "config " << opts.config.string() << " -> " << out.string() << "\n";
    std::cout << "defaults in effect: gamma(mpc) = " << cfg.mpc_spec.gamma
              << ", delta = " << cfg.mpc_spec.delta << ", M = " << cfg.rql_spec.buffer_size
              << ", R = [";
    for (std::size_t i = 0; i < 5; ++i) {
      std::cout << (i ? ", " : "") << cfg.mpc_spec.cost.diag[i];
    }
    std::cout << "]\n";

    std::vector<EpisodeBundle> bundles;
    for (const HorizonSetting& setting : cfg.horizons) {
      const BenchmarkResult result = run_benchmark(cfg, setting, opts.jobs);
      print_summary(result, std::cout);
      for (const EpisodeLog& log : result.logs) {
        bundles.push_back(make_bundle(cfg, cfg.resolved_spec(log.method, log.horizon), log));
      }
    }
    sort_bundles(bundles);

    std::vector<std::string> files;
    for (const EpisodeBundle& b : bundles) {
      const std::string name = episode_filename(b.log);
      write_episode_csv(out / "episodes" / name, b);
      files.push_back("episodes/" + name);
    }
    for (const std::string& plot : write_plot_files(out / "plots", bundles)) {
      files.push_back("plots/" + plot);
    }

    write_text(out / "report.json", build_report(bundles).dump(2) + "\n");
    files.push_back("report.json");
    write_text(out / "effective_config.json", effective.dump(2) + "\n");
    files.push_back("effective_config.json");
    files.push_back("manifest.json");
    write_text(out / "manifest.json",
               build_manifest(config_hash(effective), files).dump(2) + "\n");
    std::cout << "wrote " << files.size() << " files to " << out.string() << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return report_failure(e);
  }
}

int cmd_validate(const ValidateOptions& opts) {
  try {
    const json doc = load_raw_config(opts.config);
    const ExperimentConfig cfg = parse_config(doc);
    std::cout << effective_config(cfg).dump(2) << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return report_failure(e);
  }
}

int cmd_report(const ReportOptions& opts) {
  try {
    const std::filesystem::path episodes = opts.dir / "episodes";
    if (!std::filesystem::is_directory(episodes)) {
      throw IoError("no episodes directory under " + opts.dir.string());
    }
    std::vector<std::filesystem::path> paths;
    for (const auto& entry : std::filesystem::directory_iterator(episodes)) {
      if (entry.path().extension() == ".csv") paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());

    std::vector<EpisodeBundle> bundles;
    int corrupt = 0;
    for (const auto& path : paths) {
      try {
        bundles.push_back(read_episode_csv(path));
      } catch (const std::exception& e) {
        ++corrupt;
        std::cerr << "warning: skipping " << path.filename().string() << ": " << e.what() << "\n";
      }
    }
    if (corrupt > 0) std::cout << corrupt << " corrupt log(s) skipped\n";
    if (bundles.empty()) throw IoError("no readable episode logs in " + episodes.string());

    sort_bundles(bundles);
    write_text(opts.dir / "report.json", build_report(bundles).dump(2) + "\n");
    write_plot_files(opts.dir / "plots", bundles);
    std::cout << "report regenerated from " << bundles.size() << " episode log(s)\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return report_failure(e);
  }
}

int run_main(int argc, const char* const* argv) {
  CLI::App app{"Predictive controllers (MPC, rollout Q-learning, stacked Q-learning) "
               "for differential-drive pose stabilization"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  RunOptions run_opts;
  std::string run_out;
  CLI::App* run = app.add_subcommand("run", "execute the configured benchmark");
  run->add_option("--config", run_opts.config, "config file (JSON)")->required();
  run->add_option("--jobs", run_opts.jobs, "episode worker count")->check(CLI::PositiveNumber);
  std::uint64_t seed_value = 0;
  bool seed_given = false;
  run->add_option("--seed", seed_value, "override experiment.seed")
      ->each([&](const std::string&) { seed_given = true; });
  run->add_option("--out", run_out, "output directory");
  run->add_option("--set", run_opts.overrides, "config override section.key=value")
      ->take_all();

  ValidateOptions validate_opts;
  CLI::App* validate = app.add_subcommand("validate", "parse and validate a config file");
  validate->add_option("--config", validate_opts.config, "config file (JSON)")->required();

  ReportOptions report_opts;
  CLI::App* report = app.add_subcommand("report", "rebuild report and plot data from logs");
  report->add_option("--dir", report_opts.dir, "directory produced by 'run'")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (run->parsed()) {
    if (seed_given) run_opts.seed = seed_value;
    run_opts.out = run_out;
    return cmd_run(run_opts);
  }
  if (validate->parsed()) return cmd_validate(validate_opts);
  if (report->parsed()) return cmd_report(report_opts);
  return kExitOk;
}

}  // namespace rlmpc::cli
