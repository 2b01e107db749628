#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "avgschro/distributions.hpp"
#include "avgschro/grid.hpp"
#include "avgschro/hum.hpp"

namespace avgschro {

/// Config file syntax error carrying the offending line number.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& message, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_number(line) {}
  int line_number;
};

enum class BackendKind { spectral, mc_fd, both };

struct ExperimentConfig {
  // [problem]
  double length = 1.0;
  double control_lo = 0.25;
  double control_hi = 0.75;
  double horizon = 0.4;
  std::string initial = "sin_pi";  // preset name or "file:<path>"

  // [distribution]
  DistributionSpec distribution = DistributionSpec::normal(0.0, 1.0);

  // [discretization]
  int nx = 40;
  int nt = 80;
  int n_modes = 0;  // 0 means nx-1

  // [ensemble]
  int samples = 50;
  std::uint64_t seed = 19;

  // [hum]
  double tol = 1e-5;
  int k_max = 100;
  std::string z_guess = "sin_pi";  // "sin_pi" or "zero"

  // [backend]
  BackendKind backend = BackendKind::mc_fd;
  int threads = 1;

  // [probes]
  std::vector<std::string> probes;

  void validate() const;  // throws std::invalid_argument on bad combinations
};

/// Parses the sectioned key = value format. Unknown sections or keys and
/// malformed lines raise ConfigError with the line number.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Built-in experiment presets "test1" (normal law) and "test2" (standard
/// Cauchy, T = 0.2).
ExperimentConfig preset_config(const std::string& name);

/// Serialization of a config in the same file format.
std::string config_to_text(const ExperimentConfig& config);

/// The initial/guess field named by `name` on the grid interior.
StateField named_field(const std::string& name, const SpatialGrid& grid);

}  // namespace avgschro
