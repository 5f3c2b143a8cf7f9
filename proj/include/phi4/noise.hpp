#pragma once

// Cylindrical Wiener process on L2(T) in Fourier form, and the exact
// Ornstein-Uhlenbeck stepping of the stochastic convolution
//   Zbar(t) = sqrt(eps) int_0^t e^{eps (t-s) Delta} dW(s).
//
// Each mode k >= 1 carries two real amplitudes (cosine and sine); the complex
// coefficient is c_k = (A_k - i B_k) / sqrt(2). The k-th standard normal pair
// at a given step is the single source of randomness for every solver, so
// schemes driven by the same stream see the same noise.

#include "phi4/random.hpp"
#include "phi4/spectral.hpp"

#include <vector>

namespace phi4 {

/// Brownian increment over dt: cosine and sine amplitudes ~ N(0, dt), c_0 = 0.
SpectralField wiener_increment(const NoiseStream& stream, double dt, const TorusGrid& grid);

/// Variance of one real amplitude of Zbar_eps(t) in mode k:
/// (1 - exp(-2 eps lambda_k t)) / (2 lambda_k).
double ou_variance(double epsilon, int k, double t);

/// Per-mode one-step propagator of dZ = eps Delta Z dt + sqrt(eps) dW.
class OuPropagator {
 public:
  /// `rate` multiplies the drift, i.e. the generator is rate * eps * Delta.
  OuPropagator(const TorusGrid& grid, double epsilon, double h, double rate = 1.0);

  double decay(int k) const { return decay_[std::abs(k)]; }
  /// Standard deviation of one real amplitude of the one-step increment.
  double increment_std(int k) const { return std_[std::abs(k)]; }

  /// Z <- decay * Z + eta, with eta built from the stream's normals at its
  /// current step.
  void step(SpectralField::Coeffs& coeffs, const NoiseStream& stream) const;

 private:
  int n_modes_;
  std::vector<double> decay_;
  std::vector<double> std_;
};

/// Zbar_eps on t_i = i T / steps, exact in law at every mesh point.
Trajectory stochastic_convolution(NoiseStream stream, double epsilon, double horizon, int steps,
                                  const TorusGrid& grid);

}  // namespace phi4
