#include "rlmpc/episode_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "rlmpc/error.hpp"
#include "rlmpc/version.hpp"

namespace rlmpc {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

EpisodeBundle make_bundle(const ExperimentConfig& cfg, const ControllerSpec& spec,
                          EpisodeLog log) {
  EpisodeBundle b;
  b.log = std::move(log);
  b.delta = spec.delta;
  b.gamma = spec.gamma;
  b.cost_diag = spec.cost.diag;
  b.buffer_size = spec.buffer_size;
  b.v_max = spec.bounds.v_max;
  b.omega_max = spec.bounds.omega_max;
  b.success_radius = cfg.success_radius;
  b.success_heading = cfg.success_heading;
  b.plant_integrator = std::string(plant_integrator_name(cfg.plant));
  b.duration = cfg.duration;
  return b;
}

std::string episode_filename(const EpisodeLog& log) {
  std::ostringstream name;
  name << log.setting << "_" << method_name(log.method) << "_pose" << log.pose_index << "_rep"
       << log.repetition << ".csv";
  return name.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

namespace {

std::string triple(double a, double b, double c) {
  return format_double(a) + " " + format_double(b) + " " + format_double(c);
}

}  // namespace

void write_episode_csv(const std::filesystem::path& path, const EpisodeBundle& b) {
  std::ostringstream out;
  const EpisodeLog& log = b.log;
  out << "# " << kToolName << " episode log v1\n";
  out << "# method: " << method_name(log.method) << "\n";
  out << "# setting: " << log.setting << "\n";
  out << "# horizon: " << log.horizon << "\n";
  out << "# pose_index: " << log.pose_index << "\n";
  out << "# repetition: " << log.repetition << "\n";
  out << "# seed: " << log.seed << "\n";
  out << "# start: " << triple(log.start.x, log.start.y, log.start.theta) << "\n";
  out << "# goal: " << triple(log.goal.x, log.goal.y, log.goal.theta) << "\n";
  out << "# delta: " << format_double(b.delta) << "\n";
  out << "# gamma: " << format_double(b.gamma) << "\n";
  out << "# cost_diag:";
  for (double r : b.cost_diag) out << " " << format_double(r);
  out << "\n";
  out << "# buffer_size: " << b.buffer_size << "\n";
  out << "# v_max: " << format_double(b.v_max) << "\n";
  out << "# omega_max: " << format_double(b.omega_max) << "\n";
  out << "# success_radius: " << format_double(b.success_radius) << "\n";
  out << "# success_heading: " << format_double(b.success_heading) << "\n";
  out << "# plant_integrator: " << b.plant_integrator << "\n";
  out << "# duration: " << format_double(b.duration) << "\n";
  out << "# failed: " << (log.failed ? 1 : 0) << "\n";
  out << "# final_state: " << triple(log.final_state.x, log.final_state.y, log.final_state.theta)
      << "\n";
  out << "t,x,y,theta,v,omega,running_cost,accumulated_cost\n";
  double cost_sum = 0.0;
  for (const StageRecord& r : log.records) {
    cost_sum += r.cost;
    out << format_double(r.time) << "," << format_double(r.state.x) << ","
        << format_double(r.state.y) << "," << format_double(r.state.theta) << ","
        << format_double(r.action.v) << "," << format_double(r.action.omega) << ","
        << format_double(r.cost) << "," << format_double(b.delta * cost_sum) << "\n";
  }
  write_text(path, out.str());
}

namespace {

double parse_double(const std::string& text, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || end == nullptr) {
    throw InvalidInput(where + ": bad number '" + text + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::size_t begin = 0;
  while (true) {
    const std::size_t pos = line.find(sep, begin);
    parts.push_back(line.substr(begin, pos - begin));
    if (pos == std::string::npos) break;
    begin = pos + 1;
  }
  return parts;
}

}  // namespace

EpisodeBundle read_episode_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open episode log: " + path.string());
  const std::string where = path.filename().string();

  std::map<std::string, std::string> meta;
  std::string line;
  bool header_seen = false;
  EpisodeBundle b;
  EpisodeLog& log = b.log;
  log.records.clear();

  double cost_check = 0.0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::size_t colon = line.find(':');
      if (colon == std::string::npos) continue;  // banner line
      std::string key = line.substr(2, colon - 2);
      std::string value = line.substr(colon + 1);
      if (!value.empty() && value.front() == ' ') value.erase(0, 1);
      meta[key] = value;
      continue;
    }
    if (!header_seen) {
      if (line != "t,x,y,theta,v,omega,running_cost,accumulated_cost") {
        throw InvalidInput(where + ": unexpected column header '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    const std::vector<std::string> cols = split(line, ',');
    if (cols.size() != 8) throw InvalidInput(where + ": expected 8 columns");
    StageRecord r;
    r.time = parse_double(cols[0], where);
    r.state = {parse_double(cols[1], where), parse_double(cols[2], where),
               parse_double(cols[3], where)};
    r.action = {parse_double(cols[4], where), parse_double(cols[5], where)};
    r.cost = parse_double(cols[6], where);
    cost_check = parse_double(cols[7], where);
    log.records.push_back(r);
  }
  if (!header_seen) throw InvalidInput(where + ": no column header found");
  (void)cost_check;

  const auto need = [&](const std::string& key) -> const std::string& {
    const auto it = meta.find(key);
    if (it == meta.end()) throw InvalidInput(where + ": missing '# " + key + ":' header");
    return it->second;
  };
  const auto as_triple = [&](const std::string& text) {
    const std::vector<std::string> parts = split(text, ' ');
    if (parts.size() != 3) throw InvalidInput(where + ": expected three numbers");
    return std::array<double, 3>{parse_double(parts[0], where), parse_double(parts[1], where),
                                 parse_double(parts[2], where)};
  };

  log.method = parse_method(need("method"));
  log.setting = need("setting");
  log.horizon = static_cast<int>(parse_double(need("horizon"), where));
  log.pose_index = static_cast<int>(parse_double(need("pose_index"), where));
  log.repetition = static_cast<int>(parse_double(need("repetition"), where));
  log.seed = std::strtoull(need("seed").c_str(), nullptr, 10);
  const auto start = as_triple(need("start"));
  log.start = {start[0], start[1], start[2], Frame::world};
  const auto goal = as_triple(need("goal"));
  log.goal = {goal[0], goal[1], goal[2], Frame::world};
  b.delta = parse_double(need("delta"), where);
  b.gamma = parse_double(need("gamma"), where);
  {
    const std::vector<std::string> parts = split(need("cost_diag"), ' ');
    if (parts.size() != 5) throw InvalidInput(where + ": cost_diag needs 5 entries");
    for (std::size_t i = 0; i < 5; ++i) b.cost_diag[i] = parse_double(parts[i], where);
  }
  b.buffer_size = static_cast<std::size_t>(parse_double(need("buffer_size"), where));
  b.v_max = parse_double(need("v_max"), where);
  b.omega_max = parse_double(need("omega_max"), where);
  b.success_radius = parse_double(need("success_radius"), where);
  b.success_heading = parse_double(need("success_heading"), where);
  b.plant_integrator = need("plant_integrator");
  b.duration = parse_double(need("duration"), where);
  log.failed = need("failed") == "1";
  const auto fin = as_triple(need("final_state"));
  log.final_state = {fin[0], fin[1], fin[2]};

  // Derived metrics come from the rows, not the header.
  log.accumulated = accumulated_cost(log.records, b.delta);
  log.time_to_goal = std::numeric_limits<double>::infinity();
  for (const StageRecord& r : log.records) {
    if (std::hypot(r.state.x, r.state.y) <= b.success_radius &&
        std::abs(r.state.theta) <= b.success_heading) {
      log.time_to_goal = r.time;
      break;
    }
  }
  return b;
}

void sort_bundles(std::vector<EpisodeBundle>& bundles) {
  std::sort(bundles.begin(), bundles.end(), [](const EpisodeBundle& a, const EpisodeBundle& c) {
    const auto key = [](const EpisodeBundle& e) {
      return std::tuple(e.log.setting, static_cast<int>(e.log.method), e.log.pose_index,
                        e.log.repetition);
    };
    return key(a) < key(c);
  });
}

namespace {

json cell_json(const CellStats& cell, const Pose& start) {
  json c{{"method", std::string(method_name(cell.method))},
         {"pose_index", cell.pose_index},
         {"start", json::array({start.x, start.y, start.theta})},
         {"repetitions", cell.repetitions},
         {"completed", cell.completed},
         {"mean_accumulated_cost", cell.mean_cost},
         {"min_accumulated_cost", cell.min_cost},
         {"max_accumulated_cost", cell.max_cost},
         {"success_rate", cell.success_rate}};
  if (std::isfinite(cell.mean_time_to_goal)) {
    c["mean_time_to_goal"] = cell.mean_time_to_goal;
  } else {
    c["mean_time_to_goal"] = nullptr;  // JSON cannot carry infinity
  }
  return c;
}

}  // namespace

json build_report(std::span<const EpisodeBundle> bundles) {
  std::vector<std::string> settings;
  for (const EpisodeBundle& b : bundles) {
    if (std::find(settings.begin(), settings.end(), b.log.setting) == settings.end()) {
      settings.push_back(b.log.setting);
    }
  }
  std::sort(settings.begin(), settings.end());

  json out{{"tool", std::string(kToolName)}, {"version", std::string(kToolVersion)}};
  out["settings"] = json::array();
  for (const std::string& name : settings) {
    std::vector<EpisodeLog> logs;
    json echo_methods = json::object();
    int horizon = 0;
    for (const EpisodeBundle& b : bundles) {
      if (b.log.setting != name) continue;
      logs.push_back(b.log);
      horizon = b.log.horizon;
      const std::string m(method_name(b.log.method));
      if (!echo_methods.contains(m)) {
        echo_methods[m] = json{{"delta", b.delta},
                               {"gamma", b.gamma},
                               {"cost_diag", b.cost_diag},
                               {"buffer_size", b.buffer_size},
                               {"horizon", b.log.horizon}};
      }
    }
    const std::vector<CellStats> cells = aggregate(logs);
    json cell_array = json::array();
    for (const CellStats& cell : cells) {
      const auto it = std::find_if(logs.begin(), logs.end(), [&](const EpisodeLog& l) {
        return l.method == cell.method && l.pose_index == cell.pose_index;
      });
      cell_array.push_back(cell_json(cell, it->start));
    }
    out["settings"].push_back(json{{"name", name},
                                   {"horizon", horizon},
                                   {"config_echo", echo_methods},
                                   {"cells", cell_array}});
  }
  return out;
}

std::vector<std::string> write_plot_files(const std::filesystem::path& dir,
                                          std::span<const EpisodeBundle> bundles) {
  std::vector<std::string> settings;
  for (const EpisodeBundle& b : bundles) {
    if (std::find(settings.begin(), settings.end(), b.log.setting) == settings.end()) {
      settings.push_back(b.log.setting);
    }
  }
  std::sort(settings.begin(), settings.end());

  std::vector<std::string> written;
  for (const std::string& name : settings) {
    std::ostringstream dist, heading, acc, traj;
    dist << "method,pose,rep,t,distance_to_goal\n";
    heading << "method,pose,rep,t,heading\n";
    acc << "method,pose,rep,t,accumulated_cost\n";
    traj << "method,pose,rep,t,x,y\n";
    for (const EpisodeBundle& b : bundles) {
      if (b.log.setting != name) continue;
      const std::string tag = std::string(method_name(b.log.method)) + "," +
                              std::to_string(b.log.pose_index) + "," +
                              std::to_string(b.log.repetition) + ",";
      double cost_sum = 0.0;
      for (const StageRecord& r : b.log.records) {
        cost_sum += r.cost;
        const std::string t = format_double(r.time);
        dist << tag << t << "," << format_double(std::hypot(r.state.x, r.state.y)) << "\n";
        heading << tag << t << "," << format_double(r.state.theta) << "\n";
        acc << tag << t << "," << format_double(b.delta * cost_sum) << "\n";
        traj << tag << t << "," << format_double(r.state.x) << "," << format_double(r.state.y)
             << "\n";
      }
    }
    const std::array<std::pair<std::string, std::ostringstream*>, 4> files = {
        {{name + "_distance_to_goal.csv", &dist},
         {name + "_heading.csv", &heading},
         {name + "_accumulated_cost.csv", &acc},
         {name + "_trajectories.csv", &traj}}};
    for (const auto& [filename, stream] : files) {
      write_text(dir / filename, stream->str());
      written.push_back(filename);
    }
  }
  return written;
}

json build_manifest(std::uint64_t config_hash, std::span<const std::string> files) {
  std::vector<std::string> sorted(files.begin(), files.end());
  std::sort(sorted.begin(), sorted.end());
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(config_hash));
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char stamp[64];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return json{{"tool", std::string(kToolName)},
              {"version", std::string(kToolVersion)},
              {"created", stamp},
              {"config_hash", hash},
              {"files", sorted}};
}

}  // namespace rlmpc
