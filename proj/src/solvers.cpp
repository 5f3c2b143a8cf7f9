#include "phi4/solvers.hpp"

#include <cmath>
#include <sstream>

namespace phi4 {

std::string to_string(Scheme s) {
  return s == Scheme::kExponentialEuler ? "exponential-euler" : "semi-implicit";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "exponential-euler") return Scheme::kExponentialEuler;
  if (s == "semi-implicit") return Scheme::kSemiImplicit;
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

void SolverConfig::validate() const {
  if (!(epsilon >= 0) || !std::isfinite(epsilon)) throw std::invalid_argument("SolverConfig: epsilon must be >= 0");
  if (!(horizon > 0)) throw std::invalid_argument("SolverConfig: horizon must be positive");
  if (steps < 1) throw std::invalid_argument("SolverConfig: steps must be >= 1");
  if (!(drift_factor > 0)) throw std::invalid_argument("SolverConfig: drift_factor must be positive");
  if (dealias && !grid.dealias_capable())
    throw std::invalid_argument("SolverConfig: dealiasing needs n_phys >= 3 n_modes + 1");
}

InitialData smooth_initial_data(const TorusGrid& grid, double amplitude, double beta) {
  SpectralField u0(grid, true);
  u0.set_mode(1, amplitude);
  return {std::move(u0), beta};
}

InitialData rough_initial_data(const TorusGrid& grid, double beta, const NoiseStream& stream) {
  SpectralField u0(grid, true);
  for (int k = 1; k <= grid.n_modes(); ++k) {
    const auto [a, b] = stream.normal_pair(std::uint32_t(k));
    const double scale = std::pow(double(k), beta - 0.5) / std::sqrt(2.0);
    u0.set_mode(k, {scale * a, -scale * b});
  }
  return {std::move(u0), beta};
}

SpectralField stationary_sample(const TorusGrid& grid, const NoiseStream& stream) {
  SpectralField z(grid, true);
  for (int k = 1; k <= grid.n_modes(); ++k) {
    const auto [a, b] = stream.normal_pair(std::uint32_t(k));
    const double s = std::sqrt(1.0 / (2 * laplacian_eigenvalue(k))) / std::sqrt(2.0);
    z.set_mode(k, {s * a, -s * b});
  }
  return z;
}

CubicProjector::CubicProjector(const TorusGrid& grid, bool dealias)
    : n_(grid.n_modes()), m_(dealias ? grid.n_phys() : 2 * grid.n_modes() + 2) {
  half_.resize(m_ / 2 + 1);
  phys_.resize(m_);
}

double CubicProjector::apply(const SpectralField::Coeffs& in, SpectralField::Coeffs& out, bool mean_zero) {
  auto& fft = detail::fft_engine<double>();
  std::fill(half_.begin(), half_.end(), std::complex<double>(0));
  for (int k = 0; k <= n_; ++k) half_[k] = in[n_ + k];
  fft.inv(phys_.data(), half_.data(), m_);
  const double to_phys = 1 / std::sqrt(2.0);
  double sup = 0;
  for (double& x : phys_) {
    x *= to_phys;
    if (!(std::abs(x) <= sup)) sup = std::isfinite(x) ? std::abs(x) : INFINITY;
    x = x * x * x;
  }
  fft.fwd(half_.data(), phys_.data(), m_);
  const double to_spec = std::sqrt(2.0) / m_;
  out.resize(2 * n_ + 1);
  for (int k = 1; k <= n_; ++k) {
    const std::complex<double> c = to_spec * half_[k];
    out[n_ + k] = c;
    out[n_ - k] = std::conj(c);
  }
  out[n_] = mean_zero ? std::complex<double>(0) : std::complex<double>(to_spec * half_[0].real());
  return sup;
}

namespace {

std::vector<double> heat_multipliers(const SolverConfig& cfg) {
  const int n = cfg.grid.n_modes();
  std::vector<double> m(2 * n + 1);
  for (int k = -n; k <= n; ++k)
    m[n + k] = std::exp(-cfg.drift_factor * cfg.epsilon * laplacian_eigenvalue(k) * cfg.step_size());
  return m;
}

void guard(double sup, int step) {
  if (!(sup <= kBlowUpThreshold)) {
    std::ostringstream msg;
    msg << "blow-up guard: ||u||_inf = " << sup << " at step " << step;
    throw BlowUpError(msg.str(), step);
  }
}

// v <- e^{eps h Delta} (v - h eps P((v + z)^3)); shared by the lockstep and the
// stored-path integrators so that both produce identical bits.
struct ShiftedUpdate {
  const SolverConfig& cfg;
  const std::vector<double>& heat;
  CubicProjector& cubic;
  bool mean_zero;

  void operator()(SpectralField::Coeffs& v, const SpectralField::Coeffs& z, SpectralField::Coeffs& w,
                  SpectralField::Coeffs& cube, int step, SolverDiagnostics& diag) const {
    w = z + v;
    const double sup = cubic.apply(w, cube, mean_zero);
    guard(sup, step);
    const double h = cfg.step_size();
    diag.stability_indicator = std::max(diag.stability_indicator, cfg.epsilon * h * sup * sup);
    const double coef = h * cfg.epsilon * cfg.drift_factor * cfg.cubic;
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = heat[i] * (v[i] - coef * cube[i]);
    ++diag.steps_taken;
  }
};

}  // namespace

DecomposedStepper::DecomposedStepper(const SpectralField& u0, const SolverConfig& cfg, NoiseStream stream)
    : cfg_(cfg),
      stream_(stream),
      ou_(cfg.grid, cfg.epsilon, cfg.step_size(), cfg.drift_factor),
      cubic_(cfg.grid, cfg.dealias),
      heat_(heat_multipliers(cfg)),
      mean_zero_(u0.mean_zero()) {
  cfg_.validate();
  if (!(u0.grid() == cfg.grid)) throw std::invalid_argument("DecomposedStepper: u0 grid mismatch");
  z_ = u0.coeffs();
  v_ = SpectralField::Coeffs::Zero(cfg.grid.size());
}

void DecomposedStepper::step() {
  ShiftedUpdate{cfg_, heat_, cubic_, mean_zero_}(v_, z_, w_, cube_, step_, diag_);
  ou_.step(z_, stream_);
  stream_.advance();
  ++step_;
}

Trajectory solve_linear(const SpectralField& u0, const SolverConfig& cfg, const NoiseStream& stream) {
  cfg.validate();
  if (!(u0.grid() == cfg.grid)) throw std::invalid_argument("solve_linear: u0 grid mismatch");
  const OuPropagator ou(cfg.grid, cfg.epsilon, cfg.step_size(), cfg.drift_factor);
  NoiseStream s = stream;
  SpectralField::Coeffs z = u0.coeffs();
  std::vector<SpectralField> states;
  states.reserve(cfg.steps + 1);
  states.push_back(u0);
  for (int i = 0; i < cfg.steps; ++i) {
    ou.step(z, s);
    s.advance();
    states.emplace_back(cfg.grid, z, u0.mean_zero());
  }
  return Trajectory(cfg.horizon, std::move(states));
}

Trajectory solve_shifted(const Trajectory& z, const SolverConfig& cfg, SolverDiagnostics* diag) {
  cfg.validate();
  if (!(z.grid() == cfg.grid) || z.steps() != cfg.steps || std::abs(z.horizon() - cfg.horizon) > 0)
    throw std::invalid_argument("solve_shifted: linear path does not match the solver mesh");
  const bool mean_zero = z.front().mean_zero();
  const auto heat = heat_multipliers(cfg);
  CubicProjector cubic(cfg.grid, cfg.dealias);
  const ShiftedUpdate update{cfg, heat, cubic, mean_zero};
  SolverDiagnostics local;
  SpectralField::Coeffs v = SpectralField::Coeffs::Zero(cfg.grid.size()), w, cube;
  std::vector<SpectralField> states;
  states.reserve(cfg.steps + 1);
  states.emplace_back(cfg.grid, v, mean_zero);
  for (int i = 0; i < cfg.steps; ++i) {
    update(v, z[i].coeffs(), w, cube, i, local);
    states.emplace_back(cfg.grid, v, mean_zero);
  }
  if (diag) *diag = local;
  return Trajectory(cfg.horizon, std::move(states));
}

Trajectory solve_phi4_scaled(const SpectralField& u0, const SolverConfig& cfg, const NoiseStream& stream,
                             SolverDiagnostics* diag) {
  DecomposedStepper stepper(u0, cfg, stream);
  std::vector<SpectralField> states;
  states.reserve(cfg.steps + 1);
  states.push_back(stepper.full());
  for (int i = 0; i < cfg.steps; ++i) {
    stepper.step();
    states.push_back(stepper.full());
  }
  if (diag) *diag = stepper.diagnostics();
  return Trajectory(cfg.horizon, std::move(states));
}

Trajectory solve_phi4_unscaled(const SpectralField& u0, double horizon, int steps, const TorusGrid& grid,
                               const NoiseStream& stream) {
  SolverConfig cfg;
  cfg.epsilon = 1.0;
  cfg.horizon = horizon;
  cfg.steps = steps;
  cfg.grid = grid;
  return solve_phi4_scaled(u0, cfg, stream);
}

Trajectory solve_phi4_direct(const SpectralField& u0, const SolverConfig& cfg, const NoiseStream& stream,
                             SolverDiagnostics* diag) {
  cfg.validate();
  if (cfg.scheme != Scheme::kSemiImplicit) throw std::invalid_argument("solve_phi4_direct: needs the semi-implicit scheme");
  if (!(u0.grid() == cfg.grid)) throw std::invalid_argument("solve_phi4_direct: u0 grid mismatch");
  const int n = cfg.grid.n_modes();
  const double h = cfg.step_size();
  const bool mean_zero = u0.mean_zero();
  std::vector<double> inv_implicit(2 * n + 1);
  for (int k = -n; k <= n; ++k)
    inv_implicit[n + k] = 1 / (1 + cfg.drift_factor * cfg.epsilon * laplacian_eigenvalue(k) * h);
  CubicProjector cubic(cfg.grid, cfg.dealias);
  SolverDiagnostics local;
  NoiseStream s = stream;
  SpectralField::Coeffs u = u0.coeffs(), cube;
  const double coef = h * cfg.epsilon * cfg.drift_factor * cfg.cubic;
  const double noise_scale = std::sqrt(cfg.epsilon * h / 2);
  std::vector<SpectralField> states;
  states.reserve(cfg.steps + 1);
  states.push_back(u0);
  for (int i = 0; i < cfg.steps; ++i) {
    const double sup = cubic.apply(u, cube, mean_zero);
    guard(sup, i);
    local.stability_indicator = std::max(local.stability_indicator, cfg.epsilon * h * sup * sup);
    for (int k = 0; k <= n; ++k) {
      std::complex<double> dw(0);
      if (k > 0) {
        const auto [a, b] = s.normal_pair(std::uint32_t(k));
        dw = {noise_scale * a, -noise_scale * b};
      }
      const std::complex<double> next = inv_implicit[n + k] * (u[n + k] - coef * cube[n + k] + dw);
      u[n + k] = next;
      u[n - k] = std::conj(next);
    }
    if (mean_zero) u[n] = 0;
    s.advance();
    ++local.steps_taken;
    states.emplace_back(cfg.grid, u, mean_zero);
  }
  if (diag) *diag = local;
  return Trajectory(cfg.horizon, std::move(states));
}

}  // namespace phi4
