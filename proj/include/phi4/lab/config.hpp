#pragma once

// Experiment configuration: a flat key = value file with [solver],
// [experiment] and [output] sections. Unknown keys are rejected.

#include "phi4/solvers.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace phi4::lab {

enum class ExperimentKind {
  kSimulate,
  kTailSweep,
  kMomentScaling,
  kShiftedFit,
  kModeLdp,
  kScalingCheck,
  kBesovVerify,
  kRateEval,
};

std::string to_string(ExperimentKind kind);
ExperimentKind kind_from_string(const std::string& s);

/// Invalid or missing configuration; `field` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  std::optional<ExperimentKind> kind;

  // [solver]
  int n_modes = 64;
  std::optional<int> n_phys;
  double horizon = 1.0;
  int steps = 100;
  Scheme scheme = Scheme::kExponentialEuler;
  bool dealias = true;

  // [experiment]
  std::vector<double> epsilons;
  std::optional<double> delta;
  /// delta = median: the median of the sup norm at the largest eps.
  bool delta_from_median = false;
  double alpha = 0.05;
  double beta = 0.1;
  double beta_prime = 0.1;
  long replicas = 1000;
  std::uint64_t seed = 1;
  std::string u0 = "smooth";  // smooth | zero | rough | stationary
  double u0_amplitude = 0.5;
  double rho = 0.5;
  int mode = 1;
  std::vector<int> moments{1, 2, 4, 8, 16};
  int bootstrap = 200;
  double significance = 0.01;
  int ks_modes = 8;
  int ks_times = 4;
  double control_drift = 2.0;
  /// Repeat tail sweeps at half the time step.
  bool mesh_check = true;

  // [output]
  std::filesystem::path output_dir = "phi4-out";

  /// The text the configuration was parsed from, kept for manifests.
  std::string source;

  TorusGrid grid() const;
  SolverConfig solver(double epsilon) const;
  /// Checks the fields a given experiment needs; throws ConfigError.
  void require_for(ExperimentKind kind) const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace phi4::lab
