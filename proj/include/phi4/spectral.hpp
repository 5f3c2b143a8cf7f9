#pragma once

// Torus geometry and truncated Fourier fields on T = R / 2Z.
//
// A field is stored through its coefficients c_k, |k| <= N, in the
// orthonormal basis e_k(x) = 2^{-1/2} exp(i pi k x). Physical samples live on
// the uniform nodes x_m = 2m / M, m = 0..M-1.

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace phi4 {

class TorusGrid {
 public:
  static constexpr double kPeriod = 2.0;

  TorusGrid(int n_modes, int n_phys) : n_modes_(n_modes), n_phys_(n_phys) {
    if (n_modes < 1) throw std::invalid_argument("TorusGrid: n_modes must be positive");
    if (n_phys < 2 * n_modes + 2)
      throw std::invalid_argument("TorusGrid: n_phys must be >= 2 n_modes + 2");
    if (n_phys % 2 != 0) throw std::invalid_argument("TorusGrid: n_phys must be even");
  }

  explicit TorusGrid(int n_modes) : TorusGrid(n_modes, dealiased_size(n_modes)) {}

  /// Smallest power of two that can host cubic products of degree-N fields.
  static int dealiased_size(int n_modes) {
    int m = 2;
    while (m < 3 * n_modes + 1) m *= 2;
    return m;
  }

  int n_modes() const { return n_modes_; }
  int n_phys() const { return n_phys_; }
  /// Number of stored coefficients, 2N + 1.
  int size() const { return 2 * n_modes_ + 1; }
  bool dealias_capable() const { return n_phys_ >= 3 * n_modes_ + 1; }
  double node(int m) const { return kPeriod * m / n_phys_; }
  double node_weight() const { return kPeriod / n_phys_; }

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

 private:
  int n_modes_;
  int n_phys_;
};

/// Eigenvalue of -Delta on e_k.
inline double laplacian_eigenvalue(int k) {
  return std::numbers::pi * std::numbers::pi * double(k) * double(k);
}

template <typename Scalar>
class BasicSpectralField {
 public:
  using RealScalar = Scalar;
  using Complex = std::complex<Scalar>;
  using Coeffs = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  explicit BasicSpectralField(const TorusGrid& grid, bool mean_zero = true)
      : grid_(grid), coeffs_(Coeffs::Zero(grid.size())), mean_zero_(mean_zero) {}

  /// Takes coefficients ordered k = -N..N. Near-Hermitian input is
  /// symmetrized; anything further off is rejected.
  BasicSpectralField(const TorusGrid& grid, Coeffs coeffs, bool mean_zero)
      : grid_(grid), coeffs_(std::move(coeffs)), mean_zero_(mean_zero) {
    if (coeffs_.size() != grid.size())
      throw std::invalid_argument("SpectralField: coefficient count does not match grid");
    Scalar scale = Scalar(1);
    for (Eigen::Index i = 0; i < coeffs_.size(); ++i) scale = std::max(scale, std::abs(coeffs_[i]));
    if (hermitian_defect() > Scalar(1e-9) * scale)
      throw std::invalid_argument("SpectralField: coefficients are not Hermitian");
    if (mean_zero_ && std::abs(coeffs_[n_modes()]) > Scalar(1e-12) * scale)
      throw std::invalid_argument("SpectralField: mean_zero field with nonzero c_0");
    symmetrize();
  }

  const TorusGrid& grid() const { return grid_; }
  int n_modes() const { return grid_.n_modes(); }
  bool mean_zero() const { return mean_zero_; }
  const Coeffs& coeffs() const { return coeffs_; }

  Complex coeff(int k) const { return coeffs_[index(k)]; }

  /// Sets c_k and c_{-k} = conj(c_k).
  void set_mode(int k, Complex value) {
    if (k == 0) {
      if (mean_zero_ && value != Complex(0))
        throw std::invalid_argument("SpectralField: cannot set c_0 on a mean_zero field");
      coeffs_[index(0)] = Complex(value.real(), 0);
      return;
    }
    coeffs_[index(k)] = value;
    coeffs_[index(-k)] = std::conj(value);
  }

  Scalar hermitian_defect() const {
    Scalar d = 0;
    for (int k = 0; k <= n_modes(); ++k)
      d = std::max(d, std::abs(coeffs_[index(-k)] - std::conj(coeffs_[index(k)])));
    return d;
  }

  BasicSpectralField& operator+=(const BasicSpectralField& o) {
    check_same_grid(o);
    coeffs_ += o.coeffs_;
    mean_zero_ = mean_zero_ && o.mean_zero_;
    return *this;
  }
  BasicSpectralField& operator-=(const BasicSpectralField& o) {
    check_same_grid(o);
    coeffs_ -= o.coeffs_;
    mean_zero_ = mean_zero_ && o.mean_zero_;
    return *this;
  }
  BasicSpectralField& operator*=(Scalar s) {
    coeffs_ *= s;
    return *this;
  }

  friend BasicSpectralField operator+(BasicSpectralField a, const BasicSpectralField& b) { return a += b; }
  friend BasicSpectralField operator-(BasicSpectralField a, const BasicSpectralField& b) { return a -= b; }
  friend BasicSpectralField operator*(Scalar s, BasicSpectralField a) { return a *= s; }
  friend BasicSpectralField operator*(BasicSpectralField a, Scalar s) { return a *= s; }
  friend BasicSpectralField operator-(BasicSpectralField a) { return a *= Scalar(-1); }

  /// Applies a real multiplier m(|k|) to every coefficient.
  template <typename Fn>
  BasicSpectralField& apply_multiplier(Fn&& m) {
    for (int k = -n_modes(); k <= n_modes(); ++k) coeffs_[index(k)] *= Scalar(m(k));
    return *this;
  }

  void check_same_grid(const BasicSpectralField& o) const {
    if (!(grid_ == o.grid_)) throw std::invalid_argument("SpectralField: grid mismatch");
  }

  Eigen::Index index(int k) const {
    if (k < -n_modes() || k > n_modes()) throw std::out_of_range("SpectralField: mode out of range");
    return k + n_modes();
  }

 private:
  void symmetrize() {
    for (int k = 1; k <= n_modes(); ++k) {
      Complex c = Scalar(0.5) * (coeffs_[index(k)] + std::conj(coeffs_[index(-k)]));
      coeffs_[index(k)] = c;
      coeffs_[index(-k)] = std::conj(c);
    }
    coeffs_[index(0)] = mean_zero_ ? Complex(0) : Complex(coeffs_[index(0)].real(), 0);
  }

  TorusGrid grid_;
  Coeffs coeffs_;
  bool mean_zero_;
};

using SpectralField = BasicSpectralField<double>;

template <typename Scalar>
using PhysicalSamples = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

namespace detail {

template <typename Scalar>
Eigen::FFT<Scalar>& fft_engine() {
  struct Engine {
    Engine() {
      fft.SetFlag(Eigen::FFT<Scalar>::Unscaled);
      fft.SetFlag(Eigen::FFT<Scalar>::HalfSpectrum);
    }
    Eigen::FFT<Scalar> fft;
  };
  thread_local Engine engine;
  return engine.fft;
}

}  // namespace detail

/// Evaluates sum_k c_k e_k(x_m) at the grid nodes.
template <typename Scalar>
PhysicalSamples<Scalar> to_physical(const BasicSpectralField<Scalar>& f) {
  const int n = f.n_modes();
  const int m = f.grid().n_phys();
  std::vector<std::complex<Scalar>> half(m / 2 + 1, std::complex<Scalar>(0));
  for (int k = 0; k <= n; ++k) half[k] = f.coeff(k);
  PhysicalSamples<Scalar> out(m);
  detail::fft_engine<Scalar>().inv(out.data(), half.data(), m);
  out *= Scalar(1) / std::sqrt(Scalar(2));
  return out;
}

/// Projects physical samples onto the modes |k| <= N of the grid.
template <typename Scalar>
BasicSpectralField<Scalar> to_spectral(const PhysicalSamples<Scalar>& samples, const TorusGrid& grid,
                                       bool mean_zero = true) {
  const int m = grid.n_phys();
  if (samples.size() != m) throw std::invalid_argument("to_spectral: sample count does not match grid");
  std::vector<std::complex<Scalar>> half(m / 2 + 1);
  detail::fft_engine<Scalar>().fwd(half.data(), samples.data(), m);
  BasicSpectralField<Scalar> f(grid, mean_zero);
  const Scalar scale = std::sqrt(Scalar(2)) / Scalar(m);
  for (int k = mean_zero ? 1 : 0; k <= grid.n_modes(); ++k) f.set_mode(k, scale * half[k]);
  return f;
}

template <typename Scalar>
BasicSpectralField<Scalar> laplacian(BasicSpectralField<Scalar> f) {
  return f.apply_multiplier([](int k) { return -laplacian_eigenvalue(k); });
}

/// e^{t Delta} f.
template <typename Scalar>
BasicSpectralField<Scalar> heat_semigroup(BasicSpectralField<Scalar> f, double t) {
  if (!(t >= 0)) throw std::invalid_argument("heat_semigroup: negative time");
  return f.apply_multiplier([t](int k) { return std::exp(-t * laplacian_eigenvalue(k)); });
}

template <typename Scalar>
Scalar l2_norm(const BasicSpectralField<Scalar>& f) {
  return f.coeffs().norm();
}

template <typename Scalar>
Scalar l2_inner(const BasicSpectralField<Scalar>& f, const BasicSpectralField<Scalar>& g) {
  f.check_same_grid(g);
  return f.coeffs().dot(g.coeffs()).real();
}

/// Trapezoidal L^p norm of physical samples on the period-2 torus.
template <typename Scalar>
Scalar quadrature_lp_norm(const PhysicalSamples<Scalar>& samples, double p) {
  if (std::isinf(p)) return samples.cwiseAbs().maxCoeff();
  const Scalar w = Scalar(TorusGrid::kPeriod) / Scalar(samples.size());
  if (p == 2) return std::sqrt(w * samples.squaredNorm());
  return std::pow(w * samples.cwiseAbs().array().pow(Scalar(p)).sum(), Scalar(1) / Scalar(p));
}

/// Grid maximum of |f|.
template <typename Scalar>
Scalar sup_norm(const BasicSpectralField<Scalar>& f) {
  return to_physical(f).cwiseAbs().maxCoeff();
}

/// Coefficient on cos(pi k x), an L2-normalized real basis function.
template <typename Scalar>
Scalar cosine_amplitude(const BasicSpectralField<Scalar>& f, int k) {
  return std::sqrt(Scalar(2)) * f.coeff(k).real();
}

/// Coefficient on sin(pi k x).
template <typename Scalar>
Scalar sine_amplitude(const BasicSpectralField<Scalar>& f, int k) {
  return -std::sqrt(Scalar(2)) * f.coeff(k).imag();
}

/// Field A cos(pi k x) + B sin(pi k x).
template <typename Scalar = double>
BasicSpectralField<Scalar> real_mode(const TorusGrid& grid, int k, Scalar cos_amp, Scalar sin_amp = 0) {
  BasicSpectralField<Scalar> f(grid, k != 0);
  f.set_mode(k, std::complex<Scalar>(cos_amp, -sin_amp) / std::sqrt(Scalar(2)));
  return f;
}

/// Time-indexed fields on the uniform mesh t_i = i T / (n - 1).
template <typename Scalar>
class BasicTrajectory {
 public:
  using Field = BasicSpectralField<Scalar>;

  BasicTrajectory(double horizon, std::vector<Field> states) : horizon_(horizon), states_(std::move(states)) {
    if (states_.empty()) throw std::invalid_argument("Trajectory: no states");
    if (!(horizon_ >= 0)) throw std::invalid_argument("Trajectory: negative horizon");
    if (states_.size() > 1 && !(horizon_ > 0))
      throw std::invalid_argument("Trajectory: horizon must be positive");
    for (const auto& s : states_) states_.front().check_same_grid(s);
  }

  double horizon() const { return horizon_; }
  std::size_t size() const { return states_.size(); }
  int steps() const { return int(states_.size()) - 1; }
  double step_size() const { return steps() > 0 ? horizon_ / steps() : 0.0; }
  double time(std::size_t i) const { return steps() > 0 ? horizon_ * double(i) / steps() : 0.0; }
  const TorusGrid& grid() const { return states_.front().grid(); }

  const Field& operator[](std::size_t i) const { return states_[i]; }
  const Field& front() const { return states_.front(); }
  const Field& back() const { return states_.back(); }
  const std::vector<Field>& states() const { return states_; }

 private:
  double horizon_;
  std::vector<Field> states_;
};

using Trajectory = BasicTrajectory<double>;

}  // namespace phi4
