#include "cise/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace cise {
namespace {

std::string trim(const std::string& s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double to_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(value.c_str(), &end);
  if (errno != 0 || value.empty() || end != value.c_str() + value.size()) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
  return v;
}

long to_int(const std::string& key, const std::string& value) {
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(value.c_str(), &end, 10);
  if (errno != 0 || value.empty() || end != value.c_str() + value.size()) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (errno != 0 || value.empty() || value[0] == '-' || end != value.c_str() + value.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(key + ": expected true/false, got '" + value + "'");
}

void check(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());

  RunConfig cfg;
  bool has_mass = false;
  bool has_length = false;
  bool has_gravity = false;

  // One handler per recognized section.key; anything else is rejected.
  using Handler = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Handler> handlers = {
      {"system.name", [&](const std::string&, const std::string& v) { cfg.system_name = v; }},
      {"system.u_min", [&](const std::string& k, const std::string& v) { cfg.u_min = to_double(k, v); }},
      {"system.u_max", [&](const std::string& k, const std::string& v) { cfg.u_max = to_double(k, v); }},
      {"system.mass",
       [&](const std::string& k, const std::string& v) {
         cfg.mass = to_double(k, v);
         has_mass = true;
       }},
      {"system.length",
       [&](const std::string& k, const std::string& v) {
         cfg.length = to_double(k, v);
         has_length = true;
       }},
      {"system.gravity",
       [&](const std::string& k, const std::string& v) {
         cfg.gravity = to_double(k, v);
         has_gravity = true;
       }},
      {"safe_set.x1_min",
       [&](const std::string& k, const std::string& v) { cfg.safe_box.lo.x() = to_double(k, v); }},
      {"safe_set.x1_max",
       [&](const std::string& k, const std::string& v) { cfg.safe_box.hi.x() = to_double(k, v); }},
      {"safe_set.x2_min",
       [&](const std::string& k, const std::string& v) { cfg.safe_box.lo.y() = to_double(k, v); }},
      {"safe_set.x2_max",
       [&](const std::string& k, const std::string& v) { cfg.safe_box.hi.y() = to_double(k, v); }},
      {"curve.n",
       [&](const std::string& k, const std::string& v) { cfg.n = static_cast<int>(to_int(k, v)); }},
      {"curve.beta", [&](const std::string& k, const std::string& v) { cfg.beta = to_double(k, v); }},
      {"curve.lipschitz_mode",
       [&](const std::string& k, const std::string& v) {
         if (v == "sound") {
           cfg.lipschitz_mode = LipschitzMode::sound;
         } else if (v == "paper") {
           cfg.lipschitz_mode = LipschitzMode::paper;
         } else {
           throw ConfigError(k + ": expected sound or paper, got '" + v + "'");
         }
       }},
      {"expansion.k_n", [&](const std::string& k, const std::string& v) { cfg.k_n = to_double(k, v); }},
      {"expansion.k_c", [&](const std::string& k, const std::string& v) { cfg.k_c = to_double(k, v); }},
      {"expansion.gamma",
       [&](const std::string& k, const std::string& v) { cfg.gamma = to_double(k, v); }},
      {"expansion.dt", [&](const std::string& k, const std::string& v) { cfg.dt = to_double(k, v); }},
      {"expansion.max_steps",
       [&](const std::string& k, const std::string& v) {
         cfg.max_steps = static_cast<int>(to_int(k, v));
       }},
      {"expansion.convergence_tol",
       [&](const std::string& k, const std::string& v) { cfg.convergence_tol = to_double(k, v); }},
      {"expansion.q_weight",
       [&](const std::string& k, const std::string& v) { cfg.q_weight = to_double(k, v); }},
      {"expansion.init_p11",
       [&](const std::string& k, const std::string& v) { cfg.init_p(0, 0) = to_double(k, v); }},
      {"expansion.init_p12",
       [&](const std::string& k, const std::string& v) {
         cfg.init_p(0, 1) = cfg.init_p(1, 0) = to_double(k, v);
       }},
      {"expansion.init_p22",
       [&](const std::string& k, const std::string& v) { cfg.init_p(1, 1) = to_double(k, v); }},
      {"expansion.init_level",
       [&](const std::string& k, const std::string& v) { cfg.init_level = to_double(k, v); }},
      {"expansion.snapshot_every",
       [&](const std::string& k, const std::string& v) {
         cfg.snapshot_every = static_cast<int>(to_int(k, v));
       }},
      {"expansion.enforce_containment",
       [&](const std::string& k, const std::string& v) { cfg.enforce_containment = to_bool(k, v); }},
      {"expansion.containment_margin",
       [&](const std::string& k, const std::string& v) { cfg.containment_margin = to_double(k, v); }},
      {"filter.gamma",
       [&](const std::string& k, const std::string& v) { cfg.filter_gamma = to_double(k, v); }},
      {"filter.k_s", [&](const std::string& k, const std::string& v) { cfg.k_s = to_double(k, v); }},
      {"filter.dt_sim",
       [&](const std::string& k, const std::string& v) { cfg.dt_sim = to_double(k, v); }},
      {"filter.horizon",
       [&](const std::string& k, const std::string& v) { cfg.horizon = to_double(k, v); }},
      {"filter.trajectories",
       [&](const std::string& k, const std::string& v) {
         cfg.trajectories = static_cast<int>(to_int(k, v));
       }},
      {"filter.seed", [&](const std::string& k, const std::string& v) { cfg.seed = to_u64(k, v); }},
      {"kernel.resolution",
       [&](const std::string& k, const std::string& v) {
         cfg.resolution = static_cast<int>(to_int(k, v));
       }},
      {"kernel.input_samples",
       [&](const std::string& k, const std::string& v) {
         cfg.input_samples = static_cast<int>(to_int(k, v));
       }},
      {"kernel.dt_k", [&](const std::string& k, const std::string& v) { cfg.dt_k = to_double(k, v); }},
  };

  std::string section;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t comment = line.find_first_of(";#");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(where + ": key '" + key + "' outside any section");
    const std::string full = section + "." + key;
    const auto it = handlers.find(full);
    if (it == handlers.end()) throw ConfigError(where + ": unknown key '" + full + "'");
    try {
      it->second(full, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }

  check(cfg.system_name == "double_integrator" || cfg.system_name == "inverted_pendulum",
        "system.name: unknown system '" + cfg.system_name + "'");
  if (cfg.system_name != "inverted_pendulum" && (has_mass || has_length || has_gravity)) {
    throw ConfigError("system.mass/length/gravity only apply to inverted_pendulum");
  }
  check(cfg.safe_box.lo.x() < cfg.safe_box.hi.x() && cfg.safe_box.lo.y() < cfg.safe_box.hi.y(),
        "safe_set: box must have positive extent");
  check(cfg.n >= 4, "curve.n: need at least 4 control points");
  check(cfg.beta >= 0.0 && cfg.beta <= 1.0, "curve.beta: must lie in [0, 1]");
  check(cfg.k_n >= 0.0 && cfg.k_c >= 0.0, "expansion.k_n/k_c: must be non-negative");
  check(cfg.gamma > 0.0, "expansion.gamma: must be positive");
  check(cfg.dt > 0.0, "expansion.dt: must be positive");
  check(cfg.max_steps >= 1, "expansion.max_steps: must be at least 1");
  check(cfg.convergence_tol > 0.0, "expansion.convergence_tol: must be positive");
  check(cfg.q_weight > 0.0, "expansion.q_weight: must be positive");
  check(cfg.init_p(0, 0) > 0.0 &&
            cfg.init_p(0, 0) * cfg.init_p(1, 1) - cfg.init_p(0, 1) * cfg.init_p(0, 1) > 0.0,
        "expansion.init_p: matrix must be positive definite");
  check(cfg.init_level > 0.0, "expansion.init_level: must be positive");
  check(cfg.snapshot_every >= 0, "expansion.snapshot_every: must be non-negative");
  check(cfg.containment_margin >= 0.0, "expansion.containment_margin: must be non-negative");
  check(cfg.filter_gamma > 0.0, "filter.gamma: must be positive");
  check(cfg.k_s > 0.0, "filter.k_s: must be positive");
  check(cfg.dt_sim > 0.0, "filter.dt_sim: must be positive");
  check(cfg.horizon > 0.0, "filter.horizon: must be positive");
  check(cfg.trajectories >= 1, "filter.trajectories: must be at least 1");
  check(cfg.resolution >= 20, "kernel.resolution: need at least 20 cells per axis");
  check(cfg.input_samples >= 9, "kernel.input_samples: need at least 9 samples");
  check(cfg.dt_k > 0.0, "kernel.dt_k: must be positive");
  return cfg;
}

SystemModel configured_system(const RunConfig& cfg) {
  SystemParams params;
  if (cfg.mass) params.mass = *cfg.mass;
  if (cfg.length) params.length = *cfg.length;
  if (cfg.gravity) params.gravity = *cfg.gravity;
  if (cfg.u_min) params.u_min = VectorXd::Constant(1, *cfg.u_min);
  if (cfg.u_max) params.u_max = VectorXd::Constant(1, *cfg.u_max);
  try {
    return make_system(cfg.system_name, params);
  } catch (const ContractError& e) {
    throw ConfigError(std::string("system: ") + e.what());
  }
}

ExpansionConfig expansion_config(const RunConfig& cfg) {
  ExpansionConfig ec;
  ec.k_n = cfg.k_n;
  ec.k_c = cfg.k_c;
  ec.gamma = cfg.gamma;
  ec.dt = cfg.dt;
  ec.max_steps = cfg.max_steps;
  ec.convergence_tol = cfg.convergence_tol;
  ec.q_weight = cfg.q_weight;
  ec.init.P = cfg.init_p;
  ec.init.level = cfg.init_level;
  ec.init.n = cfg.n;
  ec.beta = cfg.beta;
  ec.eval.mode = cfg.lipschitz_mode;
  ec.enforce_containment = cfg.enforce_containment;
  ec.containment_margin = cfg.containment_margin;
  ec.safe_box = cfg.safe_box;
  return ec;
}

}  // namespace cise
