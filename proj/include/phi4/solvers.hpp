#pragma once

// Galerkin time integration of
//   du = eps Delta u dt - eps u^3 dt + sqrt(eps) dW,    u(0) = u0,
// through the split u = Z + v: Z solves the linear equation exactly in law,
// and v solves the random PDE dv = eps Delta v dt - eps (v + Z)^3 dt, v(0) = 0,
// by exponential Euler. A semi-implicit direct scheme on the same noise
// serves as a cross-check.

#include "phi4/noise.hpp"
#include "phi4/random.hpp"
#include "phi4/spectral.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace phi4 {

enum class Scheme { kExponentialEuler, kSemiImplicit };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct SolverConfig {
  double epsilon = 1.0;
  double horizon = 1.0;
  int steps = 100;
  TorusGrid grid{64};
  Scheme scheme = Scheme::kExponentialEuler;
  bool dealias = true;
  /// Multiplies the whole drift eps Delta u - eps u^3. Used by negative controls.
  double drift_factor = 1.0;
  /// Coefficient of the cubic; 0 gives the linear equation.
  double cubic = 1.0;

  double step_size() const { return horizon / steps; }
  void validate() const;
};

/// Replica aborted by the blow-up guard.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, int step) : std::runtime_error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

inline constexpr double kBlowUpThreshold = 1e6;

struct InitialData {
  InitialData(SpectralField u0_, double beta_) : u0(std::move(u0_)), beta(beta_) {
    if (!(beta > 0 && beta < 0.25)) throw std::invalid_argument("InitialData: regularity beta must lie in (0, 1/4)");
  }
  SpectralField u0;
  /// u0 is declared to lie in C^{-beta}.
  double beta;
};

/// amplitude * (e_1 + e_{-1}).
InitialData smooth_initial_data(const TorusGrid& grid, double amplitude, double beta = 0.05);

/// Synthetic C^{-beta} data, c_k = |k|^{beta - 1/2} xi_k with standard complex
/// Gaussian xi_k.
InitialData rough_initial_data(const TorusGrid& grid, double beta, const NoiseStream& stream);

/// Draw from the mode-wise stationary law of the linear flow: each real
/// amplitude ~ N(0, 1 / (2 lambda_k)), independent of eps.
SpectralField stationary_sample(const TorusGrid& grid, const NoiseStream& stream);

struct SolverDiagnostics {
  /// max over steps of eps h ||u||_inf^2.
  double stability_indicator = 0;
  int steps_taken = 0;
};

/// Projection of w^3 onto the modes 1 <= |k| <= N (0 <= |k| when the mean is
/// kept), formed in physical space on the dealiased grid.
class CubicProjector {
 public:
  CubicProjector(const TorusGrid& grid, bool dealias);

  /// out = P(in^3). Returns the grid max of |in|.
  double apply(const SpectralField::Coeffs& in, SpectralField::Coeffs& out, bool mean_zero);

  int quadrature_size() const { return m_; }

 private:
  int n_;
  int m_;
  std::vector<std::complex<double>> half_;
  std::vector<double> phys_;
};

/// Advances Z and v in lockstep on one noise stream.
class DecomposedStepper {
 public:
  DecomposedStepper(const SpectralField& u0, const SolverConfig& cfg, NoiseStream stream);

  /// One time step; throws BlowUpError when ||Z + v||_inf exceeds the guard.
  void step();

  int step_index() const { return step_; }
  double time() const { return step_ * cfg_.step_size(); }
  SpectralField linear() const { return {cfg_.grid, z_, mean_zero_}; }
  SpectralField shifted() const { return {cfg_.grid, v_, mean_zero_}; }
  SpectralField full() const { return {cfg_.grid, z_ + v_, mean_zero_}; }
  const SpectralField::Coeffs& linear_coeffs() const { return z_; }
  const SpectralField::Coeffs& shifted_coeffs() const { return v_; }
  const SolverDiagnostics& diagnostics() const { return diag_; }

 private:
  SolverConfig cfg_;
  NoiseStream stream_;
  OuPropagator ou_;
  CubicProjector cubic_;
  std::vector<double> heat_;
  bool mean_zero_;
  int step_ = 0;
  SpectralField::Coeffs z_, v_, w_, cube_;
  SolverDiagnostics diag_;
};

/// Z_eps(t) = e^{eps t Delta} u0 + Zbar_eps(t).
Trajectory solve_linear(const SpectralField& u0, const SolverConfig& cfg, const NoiseStream& stream);

/// v_eps driven by the stored linear path `z` (same grid and mesh as cfg).
Trajectory solve_shifted(const Trajectory& z, const SolverConfig& cfg, SolverDiagnostics* diag = nullptr);

/// u_eps = Z_eps + v_eps on one stream.
Trajectory solve_phi4_scaled(const SpectralField& u0, const SolverConfig& cfg, const NoiseStream& stream,
                             SolverDiagnostics* diag = nullptr);

/// The unscaled equation du = Delta u dt - u^3 dt + dW on [0, horizon].
Trajectory solve_phi4_unscaled(const SpectralField& u0, double horizon, int steps, const TorusGrid& grid,
                               const NoiseStream& stream);

/// Semi-implicit Euler for u directly: implicit eps Delta, explicit cubic,
/// increments sqrt(eps) dW from the same normals as the split scheme.
Trajectory solve_phi4_direct(const SpectralField& u0, const SolverConfig& cfg, const NoiseStream& stream,
                             SolverDiagnostics* diag = nullptr);

}  // namespace phi4
