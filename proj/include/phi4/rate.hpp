#pragma once

// The Gaussian action I^{z0}(g) = inf (1/2) int_0^T ||h'(t)||_{L2}^2 dt over
// absolutely continuous paths from z0, evaluated on sampled trajectories.
// The nonlinear drift does not enter: the nonlinear dynamics share this rate.

#include "phi4/besov.hpp"
#include "phi4/spectral.hpp"

#include <limits>
#include <span>

namespace phi4 {

struct RateResult {
  /// +inf exactly when the path does not start at z0.
  double value = std::numeric_limits<double>::infinity();
  bool admissible = false;
  /// max_{s<t} ||g(t) - g(s)||_{L2} / |t - s|^{1/2}; bounded by sqrt(2 value).
  double holder_constant = 0;
};

/// Start-point tolerance 1e-9 (1 + ||z0||_{L2}).
double admissibility_tolerance(const SpectralField& z0);

/// Exact infimum over paths through the samples: the piecewise-linear
/// interpolant, (1/2) sum_i ||g_{i+1} - g_i||^2 / h.
RateResult rate_functional(const Trajectory& g, const SpectralField& z0);

/// inf { I^{z0}(g) : g(T) = y } = ||y - z0||^2 / (2T).
double endpoint_rate(const SpectralField& z0, const SpectralField& y, double horizon);

/// Straight path z0 -> y sampled on `steps` intervals.
Trajectory linear_path(const SpectralField& z0, const SpectralField& y, double horizon, int steps);

struct ModulusReport {
  /// max ||g(t) - g(s)||_{-1/2-alpha} / ((2r)^{1/2} |t - s|^{1/2}).
  double max_ratio = 0;
  long pairs = 0;
};

/// Equicontinuity constant of a sampled level set {I <= r}. Every path must
/// have rate at most r.
ModulusReport level_set_modulus(std::span<const Trajectory> paths, double level, double alpha,
                                const DyadicPartition& partition);

}  // namespace phi4
