#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "cise/dynamics.hpp"
#include "cise/expansion.hpp"

namespace cise {

// Everything a run needs, parsed from an INI-style config file.  Optional
// fields fall back to the model or module defaults when absent.
struct RunConfig {
  // [system]
  std::string system_name = "double_integrator";
  std::optional<double> u_min;
  std::optional<double> u_max;
  std::optional<double> mass;
  std::optional<double> length;
  std::optional<double> gravity;

  // [safe_set]
  StateBox safe_box{Vector2d(-1.0, -2.5), Vector2d(1.0, 2.5)};

  // [curve]
  int n = 50;
  double beta = 0.5;
  LipschitzMode lipschitz_mode = LipschitzMode::sound;

  // [expansion]
  double k_n = 1.0;
  double k_c = 1.0;
  double gamma = 1.0;
  double dt = 0.01;
  int max_steps = 100000;
  double convergence_tol = 1e-4;
  double q_weight = 1.0;
  Matrix2d init_p = (Matrix2d() << 1.0, 0.5, 0.5, 1.0).finished();
  double init_level = 0.01;
  int snapshot_every = 0;  // 0 disables intermediate boundary snapshots
  bool enforce_containment = true;
  double containment_margin = 0.01;

  // [filter]
  double filter_gamma = 1.0;
  double k_s = 1e3;
  double dt_sim = 1e-3;
  double horizon = 5.0;
  int trajectories = 100;
  std::uint64_t seed = 0;

  // [kernel]
  int resolution = 200;
  int input_samples = 21;
  double dt_k = 0.05;
};

// Parses `path`.  Unknown sections or keys, malformed lines, and values that
// fail validation all raise ConfigError.
RunConfig load_config(const std::filesystem::path& path);

// Instantiates the system named by the config with its parameter overrides.
SystemModel configured_system(const RunConfig& cfg);

// Assembles the expansion configuration from the run-level fields.
ExpansionConfig expansion_config(const RunConfig& cfg);

}  // namespace cise
