#include "phi4/rate.hpp"

#include <cmath>
#include <stdexcept>

namespace phi4 {

double admissibility_tolerance(const SpectralField& z0) { return 1e-9 * (1 + l2_norm(z0)); }

RateResult rate_functional(const Trajectory& g, const SpectralField& z0) {
  if (g.size() < 2) throw std::invalid_argument("rate_functional: mesh too coarse (single sample)");
  RateResult r;
  if (l2_norm(g.front() - z0) > admissibility_tolerance(z0)) return r;
  r.admissible = true;
  const double h = g.step_size();
  double acc = 0;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) acc += (g[i + 1].coeffs() - g[i].coeffs()).squaredNorm();
  r.value = 0.5 * acc / h;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j)
      r.holder_constant = std::max(r.holder_constant, (g[j].coeffs() - g[i].coeffs()).norm() /
                                                          std::sqrt(g.time(j) - g.time(i)));
  return r;
}

double endpoint_rate(const SpectralField& z0, const SpectralField& y, double horizon) {
  if (!(horizon > 0)) throw std::invalid_argument("endpoint_rate: T must be positive");
  return (y.coeffs() - z0.coeffs()).squaredNorm() / (2 * horizon);
}

Trajectory linear_path(const SpectralField& z0, const SpectralField& y, double horizon, int steps) {
  if (steps < 1) throw std::invalid_argument("linear_path: steps must be >= 1");
  std::vector<SpectralField> states;
  states.reserve(steps + 1);
  for (int i = 0; i <= steps; ++i) {
    const double s = double(i) / steps;
    states.push_back(z0 + s * (y - z0));
  }
  return Trajectory(horizon, std::move(states));
}

ModulusReport level_set_modulus(std::span<const Trajectory> paths, double level, double alpha,
                                const DyadicPartition& partition) {
  if (paths.empty()) throw std::invalid_argument("level_set_modulus: empty input");
  if (!(level > 0)) throw std::invalid_argument("level_set_modulus: level must be positive");
  ModulusReport report;
  const double scale = std::sqrt(2 * level);
  for (const auto& g : paths) {
    const RateResult rate = rate_functional(g, g.front());
    if (rate.value > level * (1 + 1e-9)) throw std::invalid_argument("level_set_modulus: path above the level");
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = i + 1; j < g.size(); ++j) {
        const double d = hoelder_norm(g[j] - g[i], -0.5 - alpha, partition);
        report.max_ratio = std::max(report.max_ratio, d / (scale * std::sqrt(g.time(j) - g.time(i))));
        ++report.pairs;
      }
  }
  return report;
}

}  // namespace phi4
