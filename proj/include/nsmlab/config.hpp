#pragma once

// Run configuration: flat "section.key = value" text, strict keys.

#include <numbers>
#include <string>
#include <vector>

#include "nsmlab/limit_harness.hpp"

namespace nsmlab {

enum class Mode { Simulate, Sweep, Mms, Report };
const char* to_string(Mode m);

struct RunConfig {
  int nx = 64;
  int ny = 64;
  double lx = 4 * std::numbers::pi;
  double ly = 4 * std::numbers::pi;

  double mu = 0.1;
  double lambda = 0.0;
  double kappa = 1.0;
  double cv = 1.0;
  double rgas = 1.0;
  double epsilon = 0.1;  // single-run value used by simulate
  Scheme scheme = Scheme::Imex1;

  TimeStepPolicy dt;
  double t_end = 0.5;

  std::vector<double> epsilons{0.2, 0.1, 0.05, 0.025};
  ProfileSpec ic;

  std::string directory = "nsmlab_out";
  int precision = 17;
  Mode mode = Mode::Sweep;

  bool operator==(const RunConfig&) const = default;
};

/// Parses config text. Missing keys keep their defaults; unknown or repeated
/// keys, malformed values and constraint violations raise ConfigError with
/// the offending line.
RunConfig parse_config_text(const std::string& text);

/// Reads and parses a file; the name "default" yields the built-in defaults.
RunConfig parse_config(const std::string& path);

/// Every key in canonical order; parse_config_text(emit_config(c)) == c.
std::string emit_config(const RunConfig& c);

/// Re-checks all constraints (line 0 in the error).
void validate(const RunConfig& c);

/// "0.2,0.1,0.05" -> {0.2, 0.1, 0.05}; ConfigError on malformed items.
std::vector<double> parse_number_list(const std::string& text);

Gridd make_grid(const RunConfig& c);
NsmParams make_params(const RunConfig& c, double epsilon);

}  // namespace nsmlab
