#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rlmpc/cli.hpp"
#include "rlmpc/episode_io.hpp"

using namespace rlmpc;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const char* kQuickConfig = R"({
  "experiment": {
    "starts": [[-1.0, 0.0, 3.141592653589793]],
    "repetitions": 1,
    "duration": 1.0,
    "methods": ["mpc", "sql"],
    "horizons": [{"name": "short", "horizon": 2}]
  }
})";

fs::path write_config(const fs::path& dir, const char* text) {
  const fs::path p = dir / "config.json";
  std::ofstream out(p);
  out << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("run produces manifest, episode logs, report and plot data") {
  TempDir tmp("rlmpc_cli_run");
  const fs::path config = write_config(tmp.path, kQuickConfig);
  cli::RunOptions opts;
  opts.config = config;
  opts.out = tmp.path / "out";
  REQUIRE(cli::cmd_run(opts) == 0);

  CHECK(fs::exists(opts.out / "manifest.json"));
  CHECK(fs::exists(opts.out / "report.json"));
  CHECK(fs::exists(opts.out / "effective_config.json"));
  CHECK(fs::exists(opts.out / "episodes" / "short_mpc_pose0_rep0.csv"));
  CHECK(fs::exists(opts.out / "episodes" / "short_sql_pose0_rep0.csv"));
  CHECK(fs::exists(opts.out / "plots" / "short_distance_to_goal.csv"));

  // Every produced file is listed in the manifest.
  const json manifest = json::parse(slurp(opts.out / "manifest.json"));
  std::size_t disk_files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(opts.out)) {
    if (!entry.is_regular_file()) continue;
    ++disk_files;
    const std::string rel = fs::relative(entry.path(), opts.out).generic_string();
    bool listed = false;
    for (const auto& f : manifest.at("files")) listed |= (f.get<std::string>() == rel);
    CHECK_MESSAGE(listed, "not in manifest: ", rel);
  }
  CHECK(disk_files == manifest.at("files").size());
}

TEST_CASE("identical runs are byte-identical apart from the manifest timestamp") {
  TempDir tmp("rlmpc_cli_det");
  const fs::path config = write_config(tmp.path, kQuickConfig);
  cli::RunOptions a, b;
  a.config = b.config = config;
  a.out = tmp.path / "a";
  b.out = tmp.path / "b";
  a.jobs = 1;
  b.jobs = 2;  // worker count must not change results
  REQUIRE(cli::cmd_run(a) == 0);
  REQUIRE(cli::cmd_run(b) == 0);

  for (const char* rel :
       {"episodes/short_mpc_pose0_rep0.csv", "episodes/short_sql_pose0_rep0.csv", "report.json",
        "effective_config.json", "plots/short_distance_to_goal.csv",
        "plots/short_trajectories.csv"}) {
    CHECK_MESSAGE(slurp(a.out / rel) == slurp(b.out / rel), "differs: ", rel);
  }
}

TEST_CASE("report regenerates the identical report from persisted logs") {
  TempDir tmp("rlmpc_cli_report");
  const fs::path config = write_config(tmp.path, kQuickConfig);
  cli::RunOptions run;
  run.config = config;
  run.out = tmp.path / "out";
  REQUIRE(cli::cmd_run(run) == 0);

  const std::string original = slurp(run.out / "report.json");
  fs::remove(run.out / "report.json");
  REQUIRE(cli::cmd_report({run.out}) == 0);
  CHECK(slurp(run.out / "report.json") == original);
}

TEST_CASE("report skips corrupt logs and fails only when none are readable") {
  TempDir tmp("rlmpc_cli_corrupt");
  const fs::path config = write_config(tmp.path, kQuickConfig);
  cli::RunOptions run;
  run.config = config;
  run.out = tmp.path / "out";
  REQUIRE(cli::cmd_run(run) == 0);

  std::ofstream(run.out / "episodes" / "broken.csv") << "not,a,log\n";
  CHECK(cli::cmd_report({run.out}) == 0);  // valid subset still reports

  TempDir empty("rlmpc_cli_empty");
  fs::create_directories(empty.path / "episodes");
  CHECK(cli::cmd_report({empty.path}) == 1);
  CHECK(cli::cmd_report({empty.path / "missing"}) == 1);
}

TEST_CASE("validate exit codes") {
  TempDir tmp("rlmpc_cli_validate");
  const fs::path good = write_config(tmp.path, kQuickConfig);
  CHECK(cli::cmd_validate({good}) == 0);

  const fs::path unknown = tmp.path / "unknown.json";
  std::ofstream(unknown) << R"({"experiment": {"duraton": 1}})";
  CHECK(cli::cmd_validate({unknown}) == 2);

  const fs::path bad_delta = tmp.path / "bad_delta.json";
  std::ofstream(bad_delta) << R"({"common": {"delta": -0.1}})";
  CHECK(cli::cmd_validate({bad_delta}) == 2);

  const fs::path syntax = tmp.path / "syntax.json";
  std::ofstream(syntax) << "{ not json";
  CHECK(cli::cmd_validate({syntax}) == 2);

  CHECK(cli::cmd_validate({tmp.path / "missing.json"}) == 1);
}

TEST_CASE("run accepts --set overrides and a seed") {
  TempDir tmp("rlmpc_cli_set");
  const fs::path config = write_config(tmp.path, kQuickConfig);
  cli::RunOptions opts;
  opts.config = config;
  opts.out = tmp.path / "out";
  opts.seed = 99;
  opts.overrides = {"experiment.duration=0.5"};
  REQUIRE(cli::cmd_run(opts) == 0);
  const json eff = json::parse(slurp(opts.out / "effective_config.json"));
  CHECK(eff.at("experiment").at("seed").get<std::uint64_t>() == 99);
  CHECK(eff.at("experiment").at("duration").get<double>() == 0.5);

  cli::RunOptions bad = opts;
  bad.overrides = {"experiment.duration=-3"};
  CHECK(cli::cmd_run(bad) == 2);
}

TEST_CASE("episode CSV round-trips exactly") {
  TempDir tmp("rlmpc_csv_roundtrip");
  const fs::path config = write_config(tmp.path, kQuickConfig);
  cli::RunOptions run;
  run.config = config;
  run.out = tmp.path / "out";
  REQUIRE(cli::cmd_run(run) == 0);

  const fs::path file = run.out / "episodes" / "short_sql_pose0_rep0.csv";
  const EpisodeBundle loaded = read_episode_csv(file);
  CHECK(loaded.log.method == Method::sql);
  CHECK(loaded.log.setting == "short");
  CHECK(loaded.log.horizon == 2);
  CHECK(loaded.delta == 0.1);
  REQUIRE(loaded.log.records.size() == 10);

  // Writing the loaded bundle back reproduces the file byte for byte.
  const fs::path copy = tmp.path / "copy.csv";
  write_episode_csv(copy, loaded);
  CHECK(slurp(copy) == slurp(file));
}
