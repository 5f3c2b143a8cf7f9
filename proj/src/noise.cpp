#include "phi4/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace phi4 {

SpectralField wiener_increment(const NoiseStream& stream, double dt, const TorusGrid& grid) {
  if (!(dt > 0)) throw std::invalid_argument("wiener_increment: dt must be positive");
  SpectralField dw(grid, true);
  const double s = std::sqrt(dt / 2);
  for (int k = 1; k <= grid.n_modes(); ++k) {
    const auto [a, b] = stream.normal_pair(std::uint32_t(k));
    dw.set_mode(k, {s * a, -s * b});
  }
  return dw;
}

double ou_variance(double epsilon, int k, double t) {
  if (k == 0) return 0;
  const double lambda = laplacian_eigenvalue(k);
  return -std::expm1(-2 * epsilon * lambda * t) / (2 * lambda);
}

OuPropagator::OuPropagator(const TorusGrid& grid, double epsilon, double h, double rate)
    : n_modes_(grid.n_modes()), decay_(grid.n_modes() + 1), std_(grid.n_modes() + 1) {
  if (!(epsilon >= 0) || !(h > 0) || !(rate > 0))
    throw std::invalid_argument("OuPropagator: need eps >= 0, h > 0, rate > 0");
  decay_[0] = 1;
  std_[0] = 0;
  for (int k = 1; k <= n_modes_; ++k) {
    const double lambda = laplacian_eigenvalue(k);
    decay_[k] = std::exp(-rate * epsilon * lambda * h);
    // eps * int_0^h exp(-2 rate eps lambda s) ds, with the eps -> 0 limit eps h.
    const double x = 2 * rate * epsilon * lambda * h;
    const double var = x > 1e-12 ? -std::expm1(-x) / (2 * rate * lambda) : epsilon * h;
    std_[k] = std::sqrt(var);
  }
}

void OuPropagator::step(SpectralField::Coeffs& c, const NoiseStream& stream) const {
  const int n = n_modes_;
  const double inv_sqrt2 = 1 / std::sqrt(2.0);
  for (int k = 1; k <= n; ++k) {
    const auto [a, b] = stream.normal_pair(std::uint32_t(k));
    const double s = std_[k] * inv_sqrt2;
    const std::complex<double> z = decay_[k] * c[n + k] + std::complex<double>(s * a, -s * b);
    c[n + k] = z;
    c[n - k] = std::conj(z);
  }
  c[n] = decay_[0] * c[n];
}

Trajectory stochastic_convolution(NoiseStream stream, double epsilon, double horizon, int steps,
                                  const TorusGrid& grid) {
  if (!(epsilon > 0)) throw std::invalid_argument("stochastic_convolution: eps must be positive");
  if (steps < 1 || !(horizon > 0)) throw std::invalid_argument("stochastic_convolution: need steps >= 1, T > 0");
  const OuPropagator ou(grid, epsilon, horizon / steps);
  std::vector<SpectralField> states;
  states.reserve(steps + 1);
  SpectralField::Coeffs c = SpectralField::Coeffs::Zero(grid.size());
  states.emplace_back(grid, c, true);
  for (int i = 0; i < steps; ++i) {
    ou.step(c, stream);
    stream.advance();
    states.emplace_back(grid, c, true);
  }
  return Trajectory(horizon, std::move(states));
}

}  // namespace phi4
