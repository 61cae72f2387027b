#include "rlmpc/config.hpp"

#include <fstream>

#include "rlmpc/error.hpp"

namespace rlmpc {

using nlohmann::json;

namespace {

[[noreturn]] void bad_key(const std::string& section, const std::string& key) {
  throw InvalidConfig("unknown key '" + key + "' in section '" + section + "'");
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw InvalidConfig(where + ": expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw InvalidConfig(where + ": expected an integer");
  return v.get<int>();
}

std::uint64_t as_uint(const json& v, const std::string& where) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw InvalidConfig(where + ": expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw InvalidConfig(where + ": expected a string");
  return v.get<std::string>();
}

Pose as_pose(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) {
    throw InvalidConfig(where + ": expected [x, y, theta]");
  }
  return {as_number(v[0], where), as_number(v[1], where), as_number(v[2], where), Frame::world};
}

void apply_spec_section(ControllerSpec& spec, const json& sec, const std::string& section) {
  if (!sec.is_object()) throw InvalidConfig("section '" + section + "' must be an object");
  for (const auto& [key, value] : sec.items()) {
    const std::string where = section + "." + key;
    if (key == "delta") {
      spec.delta = as_number(value, where);
    } else if (key == "gamma") {
      spec.gamma = as_number(value, where);
    } else if (key == "cost_diag") {
      if (!value.is_array() || value.size() != 5) {
        throw InvalidConfig(where + ": expected 5 weights for (x, y, theta, v, omega)");
      }
      for (std::size_t i = 0; i < 5; ++i) spec.cost.diag[i] = as_number(value[i], where);
    } else if (key == "buffer_size") {
      const int m = as_int(value, where);
      if (m < 1) throw InvalidConfig(where + ": must be >= 1");
      spec.buffer_size = static_cast<std::size_t>(m);
    } else if (key == "v_max") {
      spec.bounds.v_max = as_number(value, where);
    } else if (key == "omega_max") {
      spec.bounds.omega_max = as_number(value, where);
    } else if (key == "critic_weight_cap") {
      spec.critic_weight_cap = as_number(value, where);
    } else if (key == "critic_cross_cap") {
      spec.critic_cross_cap = as_number(value, where);
    } else if (key == "optimizer_max_evals") {
      spec.optimizer.max_evaluations = as_int(value, where);
    } else if (key == "optimizer_tolerance") {
      spec.optimizer.tolerance = as_number(value, where);
    } else {
      bad_key(section, key);
    }
  }
}

void apply_experiment_section(ExperimentConfig& cfg, const json& sec) {
  const std::string section = "experiment";
  if (!sec.is_object()) throw InvalidConfig("section 'experiment' must be an object");
  for (const auto& [key, value] : sec.items()) {
    const std::string where = section + "." + key;
    if (key == "starts") {
      if (!value.is_array() || value.empty()) {
        throw InvalidConfig(where + ": expected a non-empty array of poses");
      }
      cfg.starts.clear();
      for (const auto& p : value) cfg.starts.push_back(as_pose(p, where));
    } else if (key == "goal") {
      cfg.goal = as_pose(value, where);
    } else if (key == "repetitions") {
      cfg.repetitions = as_int(value, where);
    } else if (key == "duration") {
      cfg.duration = as_number(value, where);
    } else if (key == "success_radius") {
      cfg.success_radius = as_number(value, where);
    } else if (key == "success_heading") {
      cfg.success_heading = as_number(value, where);
    } else if (key == "seed") {
      cfg.seed = as_uint(value, where);
    } else if (key == "plant_integrator") {
      cfg.plant = parse_plant_integrator(as_string(value, where));
    } else if (key == "actuation_noise") {
      cfg.actuation_noise = as_number(value, where);
    } else if (key == "init_jitter") {
      cfg.init_jitter = as_number(value, where);
    } else if (key == "methods") {
      if (!value.is_array() || value.empty()) {
        throw InvalidConfig(where + ": expected a non-empty array of method names");
      }
      cfg.methods.clear();
      for (const auto& m : value) cfg.methods.push_back(parse_method(as_string(m, where)));
    } else if (key == "horizons") {
      if (!value.is_array() || value.empty()) {
        throw InvalidConfig(where + ": expected a non-empty array of horizon settings");
      }
      cfg.horizons.clear();
      for (const auto& h : value) {
        if (!h.is_object()) throw InvalidConfig(where + ": each setting must be an object");
        HorizonSetting setting;
        for (const auto& [hk, hv] : h.items()) {
          if (hk == "name") {
            setting.name = as_string(hv, where + ".name");
          } else if (hk == "horizon") {
            setting.horizon = as_int(hv, where + ".horizon");
          } else {
            bad_key(where, hk);
          }
        }
        if (setting.name.empty()) throw InvalidConfig(where + ": setting name required");
        cfg.horizons.push_back(setting);
      }
    } else {
      bad_key(section, key);
    }
  }
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw InvalidConfig("config root must be an object");
  ExperimentConfig cfg = default_experiment();
  for (const auto& [key, value] : doc.items()) {
    if (key != "experiment" && key != "common" && key != "mpc" && key != "rql" && key != "sql") {
      bad_key("(root)", key);
    }
    (void)value;
  }
  if (doc.contains("experiment")) apply_experiment_section(cfg, doc.at("experiment"));
  if (doc.contains("common")) {
    apply_spec_section(cfg.mpc_spec, doc.at("common"), "common");
    apply_spec_section(cfg.rql_spec, doc.at("common"), "common");
    apply_spec_section(cfg.sql_spec, doc.at("common"), "common");
  }
  if (doc.contains("mpc")) apply_spec_section(cfg.mpc_spec, doc.at("mpc"), "mpc");
  if (doc.contains("rql")) apply_spec_section(cfg.rql_spec, doc.at("rql"), "rql");
  if (doc.contains("sql")) apply_spec_section(cfg.sql_spec, doc.at("sql"), "sql");
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidConfig(std::string("config parse error: ") + e.what());
  }
  return parse_config(doc);
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw InvalidConfig("override must look like section.key=value: '" + assignment + "'");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);

  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;  // unquoted strings (e.g. plant_integrator=euler)
  }

  json* node = &doc;
  std::size_t begin = 0;
  while (true) {
    const std::size_t dot = path.find('.', begin);
    const std::string part = path.substr(begin, dot - begin);
    if (part.empty()) throw InvalidConfig("bad override path: '" + path + "'");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    node = &(*node)[part];
    begin = dot + 1;
  }
}

namespace {

json spec_json(const ControllerSpec& spec) {
  return json{{"delta", spec.delta},
              {"gamma", spec.gamma},
              {"cost_diag", spec.cost.diag},
              {"buffer_size", spec.buffer_size},
              {"critic_weight_cap", spec.critic_weight_cap},
              {"critic_cross_cap", spec.critic_cross_cap},
              {"v_max", spec.bounds.v_max},
              {"omega_max", spec.bounds.omega_max},
              {"optimizer_max_evals", spec.optimizer.max_evaluations},
              {"optimizer_tolerance", spec.optimizer.tolerance}};
}

json pose_json(const Pose& p) { return json::array({p.x, p.y, p.theta}); }

}  // namespace

json effective_config(const ExperimentConfig& cfg) {
  json starts = json::array();
  for (const Pose& p : cfg.starts) starts.push_back(pose_json(p));
  json methods = json::array();
  for (Method m : cfg.methods) methods.push_back(std::string(method_name(m)));
  json horizons = json::array();
  for (const HorizonSetting& h : cfg.horizons) {
    horizons.push_back(json{{"name", h.name}, {"horizon", h.horizon}});
  }
  return json{{"experiment",
               {{"starts", starts},
                {"goal", pose_json(cfg.goal)},
                {"repetitions", cfg.repetitions},
                {"duration", cfg.duration},
                {"success_radius", cfg.success_radius},
                {"success_heading", cfg.success_heading},
                {"seed", cfg.seed},
                {"plant_integrator", std::string(plant_integrator_name(cfg.plant))},
                {"actuation_noise", cfg.actuation_noise},
                {"init_jitter", cfg.init_jitter},
                {"methods", methods},
                {"horizons", horizons}}},
              {"mpc", spec_json(cfg.mpc_spec)},
              {"rql", spec_json(cfg.rql_spec)},
              {"sql", spec_json(cfg.sql_spec)}};
}

std::uint64_t config_hash(const json& effective) {
  const std::string text = effective.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace rlmpc
