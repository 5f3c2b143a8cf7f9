#pragma once

// Littlewood-Paley calculus on the discrete frequency grid |k| <= N.

#include "phi4/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace phi4 {

struct BesovIndex {
  double alpha = 0;
  double p = std::numeric_limits<double>::infinity();
  double q = std::numeric_limits<double>::infinity();

  BesovIndex() = default;
  BesovIndex(double alpha_, double p_, double q_) : alpha(alpha_), p(p_), q(q_) {
    if (!(p >= 1) || !(q >= 1)) throw std::invalid_argument("BesovIndex: p and q must lie in [1, inf]");
  }
  /// The Hoelder-Besov space C^alpha = B^alpha_{inf,inf}.
  static BesovIndex hoelder(double alpha) {
    const double inf = std::numeric_limits<double>::infinity();
    return {alpha, inf, inf};
  }
};

/// Dyadic partition of unity (chi, theta) tabulated on the grid.
///
/// chi is a smooth radial bump equal to 1 on |z| <= 3/4 and vanishing for
/// |z| >= 4/3; theta(z) = chi(z/2) - chi(z) lives on 3/4 <= |z| <= 8/3. The
/// telescoping sum chi + sum_{j<=J} theta(2^{-j} .) = chi(2^{-J-1} .) makes
/// the unity identity hold on the grid once 2^{J+1} 3/4 >= N.
class DyadicPartition {
 public:
  static constexpr double kInner = 3.0 / 4.0;
  static constexpr double kOuter = 4.0 / 3.0;

  explicit DyadicPartition(const TorusGrid& grid) : grid_(grid) {
    const int n = grid.n_modes();
    if (n < 2) throw std::invalid_argument("DyadicPartition: need n_modes >= 2 to host an annulus");
    j_max_ = 0;
    while (kInner * std::ldexp(1.0, j_max_ + 1) < n) ++j_max_;
    windows_.resize(j_max_ + 2, grid.size());
    for (int k = -n; k <= n; ++k) {
      windows_(0, k + n) = chi(k);
      for (int j = 0; j <= j_max_; ++j) windows_(j + 1, k + n) = theta(std::ldexp(double(k), -j));
    }
  }

  /// Smooth step: 0 for t <= 0, 1 for t >= 1.
  static double smooth_step(double t) {
    if (t <= 0) return 0;
    if (t >= 1) return 1;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
  }
  static double chi(double z) { return 1.0 - smooth_step((std::abs(z) - kInner) / (kOuter - kInner)); }
  static double theta(double z) { return chi(z / 2) - chi(z); }

  const TorusGrid& grid() const { return grid_; }
  int j_max() const { return j_max_; }
  /// Levels -1..j_max.
  int level_count() const { return j_max_ + 2; }

  /// Window of level j (j = -1 is chi) evaluated at grid frequency k.
  double window(int j, int k) const {
    check_level(j);
    return windows_(j + 1, k + grid_.n_modes());
  }

  /// max_k |chi(k) + sum_j theta(2^{-j} k) - 1|.
  double unity_defect() const {
    return (windows_.colwise().sum().array() - 1.0).abs().maxCoeff();
  }

  /// Largest product of windows whose levels differ by more than one.
  double far_overlap() const {
    double worst = 0;
    for (int i = 0; i < level_count(); ++i)
      for (int j = i + 2; j < level_count(); ++j)
        worst = std::max(worst, (windows_.row(i).array() * windows_.row(j).array()).abs().maxCoeff());
    return worst;
  }

  /// Largest tabulated value outside the declared supports.
  double support_leak() const {
    const int n = grid_.n_modes();
    double worst = 0;
    for (int k = -n; k <= n; ++k) {
      if (std::abs(k) >= kOuter) worst = std::max(worst, std::abs(windows_(0, k + n)));
      for (int j = 0; j <= j_max_; ++j) {
        const double z = std::abs(std::ldexp(double(k), -j));
        if (z <= kInner || z >= 2 * kOuter) worst = std::max(worst, std::abs(windows_(j + 1, k + n)));
      }
    }
    return worst;
  }

  void check_level(int j) const {
    if (j < -1 || j > j_max_) throw std::out_of_range("DyadicPartition: level out of range");
  }

 private:
  TorusGrid grid_;
  int j_max_ = 0;
  Eigen::MatrixXd windows_;
};

/// Delta_j f.
template <typename Scalar>
BasicSpectralField<Scalar> lp_block(BasicSpectralField<Scalar> f, int j, const DyadicPartition& partition) {
  partition.check_level(j);
  if (!(f.grid() == partition.grid())) throw std::invalid_argument("lp_block: grid mismatch");
  return f.apply_multiplier([&](int k) { return partition.window(j, k); });
}

/// ||Delta_j f||_{L^p} for every level j = -1..j_max.
template <typename Scalar>
std::vector<Scalar> block_norms(const BasicSpectralField<Scalar>& f, double p, const DyadicPartition& partition) {
  std::vector<Scalar> norms;
  norms.reserve(partition.level_count());
  for (int j = -1; j <= partition.j_max(); ++j)
    norms.push_back(quadrature_lp_norm(to_physical(lp_block(f, j, partition)), p));
  return norms;
}

/// Weighted l^q sum of already computed block norms.
template <typename Scalar>
Scalar besov_from_blocks(const std::vector<Scalar>& norms, double alpha, double q) {
  Scalar acc = 0;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    const int j = int(i) - 1;
    const Scalar term = std::exp2(Scalar(j * alpha)) * norms[i];
    if (std::isinf(q))
      acc = std::max(acc, term);
    else
      acc += std::pow(term, Scalar(q));
  }
  return std::isinf(q) ? acc : std::pow(acc, Scalar(1) / Scalar(q));
}

template <typename Scalar>
Scalar besov_norm(const BasicSpectralField<Scalar>& f, const BesovIndex& idx, const DyadicPartition& partition) {
  return besov_from_blocks(block_norms(f, idx.p, partition), idx.alpha, idx.q);
}

/// ||f||_alpha, the C^alpha norm.
template <typename Scalar>
Scalar hoelder_norm(const BasicSpectralField<Scalar>& f, double alpha, const DyadicPartition& partition) {
  return besov_norm(f, BesovIndex::hoelder(alpha), partition);
}

struct RatioReport {
  double max_ratio = 0;
  std::vector<double> ratios;
  int skipped = 0;
};

/// ||f||_{B^{alpha - (1/p1 - 1/p2)}_{p2,q2}} / ||f||_{B^alpha_{p1,q1}}, or
/// nothing when the denominator vanishes.
template <typename Scalar>
std::optional<double> embedding_ratio(const BasicSpectralField<Scalar>& f, double alpha, double p1, double q1,
                                      double p2, double q2, const DyadicPartition& partition) {
  if (!(p1 <= p2) || !(q1 <= q2)) throw std::invalid_argument("embedding_ratio: need p1 <= p2 and q1 <= q2");
  const double shift = 1.0 / p1 - 1.0 / p2;
  const double den = besov_norm(f, BesovIndex(alpha, p1, q1), partition);
  if (den == 0) return std::nullopt;
  return besov_norm(f, BesovIndex(alpha - shift, p2, q2), partition) / den;
}

template <typename Scalar>
RatioReport verify_embedding(std::span<const BasicSpectralField<Scalar>> fields, double alpha, double p1,
                             double q1, double p2, double q2, const DyadicPartition& partition) {
  RatioReport report;
  for (const auto& f : fields) {
    if (auto r = embedding_ratio(f, alpha, p1, q1, p2, q2, partition)) {
      report.ratios.push_back(*r);
      report.max_ratio = std::max(report.max_ratio, *r);
    } else {
      ++report.skipped;
    }
  }
  return report;
}

/// sup_t t^{delta/2} ||e^{t Delta} f||_{alpha+delta} / ||f||_alpha.
template <typename Scalar>
double schauder_ratio(const BasicSpectralField<Scalar>& f, double alpha, double delta, std::span<const double> times,
                      const DyadicPartition& partition) {
  if (!(delta >= 0)) throw std::invalid_argument("schauder_ratio: delta must be nonnegative");
  const double den = hoelder_norm(f, alpha, partition);
  if (den == 0) throw std::invalid_argument("schauder_ratio: ||f||_alpha vanishes");
  double worst = 0;
  for (double t : times) {
    if (!(t > 0)) throw std::invalid_argument("schauder_ratio: times must be positive");
    const double num = hoelder_norm(heat_semigroup(f, t), alpha + delta, partition);
    worst = std::max(worst, std::pow(t, delta / 2) * num / den);
  }
  return worst;
}

template <typename Scalar>
RatioReport verify_schauder(std::span<const BasicSpectralField<Scalar>> fields, double alpha, double delta,
                            std::span<const double> times, const DyadicPartition& partition) {
  RatioReport report;
  for (const auto& f : fields) {
    const double r = schauder_ratio(f, alpha, delta, times, partition);
    report.ratios.push_back(r);
    report.max_ratio = std::max(report.max_ratio, r);
  }
  return report;
}

}  // namespace phi4
