#pragma once

// Monte Carlo experiments over eps sweeps. Every experiment is a pure
// function of its configuration: replica r always draws from the Philox
// stream keyed by (seed, r), results are stored by replica index and reduced
// in index order, so the worker count never changes a bit of the output.

#include "phi4/besov.hpp"
#include "phi4/lab/config.hpp"
#include "phi4/solvers.hpp"
#include "phi4/stats.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace phi4::lab {

/// The experiment ran but produced no usable result.
class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Human-readable statement of how replica streams are keyed.
extern const char* const kSeedRule;

struct TailEstimate {
  double epsilon = 0;
  double delta = 0;
  long hits = 0;
  long replicas = 0;
  double p_hat = 0;
  double ci_low = 0;
  double ci_high = 0;
  /// eps log p_hat, or eps log(3 / replicas) when censored.
  double eps_log_p = 0;
  bool censored = false;
};

TailEstimate make_tail_estimate(double epsilon, double delta, long hits, long replicas);

/// Measurement of replica `replica` at sweep index `eps_index`; nothing when
/// the replica was aborted.
using ReplicaMetric = std::function<std::optional<double>(std::size_t eps_index, std::uint32_t replica)>;

struct TailSweep {
  double delta = 0;
  std::vector<TailEstimate> rows;
  std::vector<long> aborts;
  /// Per eps, the non-aborted metric values in replica order.
  std::vector<std::vector<double>> samples;
  /// Same sweep and delta at step h/2 (independent noise); empty when
  /// mesh_check is off.
  std::vector<TailEstimate> half_mesh_rows;
  std::vector<long> half_mesh_aborts;
};

/// Counts metric > delta per eps. Without a delta, the median metric at the
/// first (largest) eps is used.
TailSweep tail_sweep(const std::vector<double>& epsilons, long replicas, std::optional<double> delta,
                     const ReplicaMetric& metric);

/// Initial datum named by cfg.u0 (smooth, zero, rough). Stationary starts are
/// drawn per replica by the experiments that support them.
SpectralField initial_field(const ExperimentConfig& cfg, const TorusGrid& grid);

struct ShiftedMeasure {
  bool aborted = false;
  /// sup over stored slices of ||v(t)||_{-1/2-alpha}.
  double sup_hoelder = 0;
  double sup_l2 = 0;
  /// sup_t ||v(t)||_{L6}^6 and eps int_0^T ||Z(s)||_{Linf}^8 ds (trapezoidal).
  double sup_l6_pow6 = 0;
  double z8_integral = 0;
  double stability = 0;
};

struct ShiftedMeasureOptions {
  bool hoelder = true;
  bool energy = false;
  double alpha = 0.05;
};

ShiftedMeasure measure_shifted(const SpectralField& u0, const SolverConfig& cfg, const NoiseStream& stream,
                               const ShiftedMeasureOptions& options, const DyadicPartition* partition);

/// eps log P(sup_t ||u_eps - Z_eps||_{-1/2-alpha} > delta) over cfg.epsilons.
TailSweep estimate_tail(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Mode-level large deviations of x_eps(t) = z0 + sqrt(eps) W(t).

/// P(|A| > rho) for A ~ N(0, eps T): 2 Q(rho / sqrt(eps T)).
double mode_tail_probability(double rho, double epsilon, double horizon);
/// eps log of the same probability, stable deep in the tail.
double mode_tail_eps_log(double rho, double epsilon, double horizon);

struct ModeLdpRow {
  double epsilon = 0;
  double closed_form_p = 0;
  double closed_form_eps_log_p = 0;
  TailEstimate mc;
  bool closed_form_in_ci = false;
};

struct ModeLdpReport {
  double rho = 0;
  double horizon = 0;
  int mode = 1;
  /// -rho^2 / (2T), the rate-function prediction.
  double prediction = 0;
  std::vector<ModeLdpRow> rows;
};

/// Estimates eps log P(|<x_eps(T) - z0, cos(pi k .)>| > rho) by Monte Carlo and
/// in closed form.
ModeLdpReport mode_ldp_check(double rho, double horizon, const std::vector<double>& epsilons, int mode,
                             long replicas, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Moment scaling of the stochastic convolution.

struct MomentRow {
  double epsilon = 0;
  int p = 1;
  /// (E X^p)^{1/p} for X = sup_t ||Z(t)||_{Linf}.
  double moment = 0;
  double stderr_ = 0;
};

struct MomentFit {
  bool stationary = false;
  std::vector<double> epsilons;
  std::vector<double> mean_sup;
  stats::LinearFit fit{};
  /// Replicate-bootstrap standard error of the slope.
  double slope_stderr = 0;
  std::vector<MomentRow> moments;
  /// Per eps, (E|X|^p)^{1/p} / (sqrt(p) (E X^2)^{1/2}) for the cosine amplitude
  /// X of mode cfg.mode at time T, p in {2, 4, 8, 16}.
  std::vector<std::vector<double>> growth;
  /// Worst max/min of the growth ratios over eps.
  double growth_spread = 0;
};

/// Fits log E sup_t ||Z||_{Linf} against log eps. u0 = "stationary" starts
/// each replica from the stationary law; anything else starts Zbar at 0.
MomentFit moment_scaling_fit(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Magnitude of the shifted component and the L6 energy inequality.

struct ShiftedFitRow {
  double epsilon = 0;
  double mean_sup_l2 = 0;
  /// max over replicas of sup_t ||v||_6^6 / (eps int ||Z||_inf^8).
  double max_energy_ratio = 0;
  long aborts = 0;
  double max_stability = 0;
};

struct ShiftedFit {
  std::vector<ShiftedFitRow> rows;
  stats::LinearFit fit{};
  double slope_stderr = 0;
  double max_energy_ratio = 0;
};

ShiftedFit shifted_magnitude_fit(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Brownian scaling: u(eps t) versus u_eps(t).

struct KsRow {
  int mode = 1;
  char component = 'c';  // 'c' cosine, 's' sine amplitude
  double time = 0;        // time of the scaled equation
  double statistic = 0;
  double p_value = 1;
  bool rejected = false;
};

struct ScalingReport {
  double epsilon = 0;
  std::vector<KsRow> rows;
  double pass_rate = 0;
  std::vector<KsRow> control_rows;
  /// Every k = 1 comparison of the drift-modified control rejects.
  bool control_rejected = false;
};

inline constexpr long kMinScalingReplicas = 10000;

ScalingReport scaling_law_check(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Littlewood-Paley and Besov verification sweeps.

/// c_k = (1 + |k|)^{-decay} xi_k with standard complex Gaussian xi_k.
SpectralField gaussian_field(const TorusGrid& grid, double decay, const NoiseStream& stream);

struct BesovRow {
  int n_modes = 0;
  int j_max = 0;
  double unity_defect = 0;
  double far_overlap = 0;
  double support_leak = 0;
  double embedding_max_ratio = 0;
  double schauder_max_ratio = 0;
};

/// Partition checks plus empirical embedding (alpha 0.5, B_{2,2} -> C) and
/// Schauder (alpha -0.6, delta 1) constants at N/2, N, 2N.
std::vector<BesovRow> besov_verify(const ExperimentConfig& cfg);

}  // namespace phi4::lab
