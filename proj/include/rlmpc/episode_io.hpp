#pragma once

// Persistence formats: per-episode CSV logs (self-describing, 17 significant
// digits so doubles round-trip exactly), the aggregate report JSON, tidy
// plot-data CSVs, and the run manifest.

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rlmpc/harness.hpp"

namespace rlmpc {

/// Shortest text that parses back to the identical double (%.17g).
std::string format_double(double v);

/// One persisted episode together with the controller/experiment settings it
/// was produced under; everything a report needs is recoverable from this.
struct EpisodeBundle {
  EpisodeLog log;
  double delta = 0.1;
  double gamma = 1.0;
  std::array<double, 5> cost_diag = {1.0, 1.0, 0.02, 0.01, 0.001};
  std::size_t buffer_size = 20;
  double v_max = 0.22;
  double omega_max = 2.48;
  double success_radius = 0.05;
  double success_heading = 0.1;
  std::string plant_integrator = "euler";
  double duration = 30.0;
};

EpisodeBundle make_bundle(const ExperimentConfig& cfg, const ControllerSpec& spec,
                          EpisodeLog log);

/// Canonical episode file name: <setting>_<method>_pose<p>_rep<r>.csv
std::string episode_filename(const EpisodeLog& log);

/// Writes header comments plus rows
/// t,x,y,theta,v,omega,running_cost,accumulated_cost. Throws IoError.
void write_episode_csv(const std::filesystem::path& path, const EpisodeBundle& bundle);

/// Parses an episode file; accumulated cost and time-to-goal are recomputed
/// from the persisted rows. Throws IoError on unreadable files and
/// InvalidInput on malformed content.
EpisodeBundle read_episode_csv(const std::filesystem::path& path);

/// Deterministic ordering used for reports and plot files:
/// (setting, method, pose, repetition).
void sort_bundles(std::vector<EpisodeBundle>& bundles);

/// Aggregate report over any number of horizon settings. Bundles must be
/// sorted; the result depends only on them, so a report regenerated from
/// persisted logs is identical to the original.
nlohmann::json build_report(std::span<const EpisodeBundle> bundles);

/// Four tidy plot-data files per horizon setting present in the bundles:
/// distance-to-goal, heading, accumulated cost (all vs t) and x-y
/// trajectories. Returns the paths written, relative to dir.
std::vector<std::string> write_plot_files(const std::filesystem::path& dir,
                                          std::span<const EpisodeBundle> bundles);

nlohmann::json build_manifest(std::uint64_t config_hash, std::span<const std::string> files);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace rlmpc
