#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bridgelab/empirics.hpp"
#include "bridgelab/risk.hpp"
#include "bridgelab/state_evolution.hpp"

namespace bridgelab {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Config file rejected; message carries the offending field path.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct McConfig {
  int n = 2000;
  int p = 1000;
  std::vector<std::uint64_t> seeds;
  double fista_tol = 1e-9;
  int max_iter = 50000;
  bool scaled = false;
};

struct ExperimentConfig {
  std::optional<SignalDistribution> dist;
  std::vector<double> q_grid;
  std::vector<double> delta_grid;
  std::vector<double> sigma_w_grid;
  std::vector<double> lambda_grid;
  QuadratureConfig quadrature;
  double fp_tol = 1e-12;
  ChiSearchConfig chi_search;
  McConfig mc;
  bool scaled = false;  // model flag for the state-evolution subcommands
};

// Parses and validates a config document; throws config_error with a
// field-path diagnostic on malformed input.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

SignalDistribution dist_from_json_text(const std::string& json_text);

struct RunReport {
  int exit_code = 0;
  std::vector<std::string> failures;
  double wall_seconds = 0.0;
};

// Subcommands: amse, expand, qstar, mc, phase, prox-selftest. Each writes a
// CSV artifact plus <out>.manifest.json and returns the process exit code
// (0 clean, 1 with per-point failures, 2 on config errors).
int run_subcommand(const std::string& name, const std::string& config_path,
                   const std::string& out_path, int threads, std::ostream& log);

// The prox property battery behind `prox-selftest`; returns false on any
// violated identity and writes a short report to `log`.
bool prox_selftest(std::ostream& log);

}  // namespace bridgelab
