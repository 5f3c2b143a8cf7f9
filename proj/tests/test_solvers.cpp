#include <doctest.h>

#include "phi4/solvers.hpp"

#include <numbers>

using namespace phi4;

namespace {

SolverConfig config(double eps, double T, int steps, int n = 16) {
  SolverConfig c;
  c.epsilon = eps;
  c.horizon = T;
  c.steps = steps;
  c.grid = TorusGrid(n);
  return c;
}

double max_diff(const SpectralField& a, const SpectralField& b) {
  return (a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff();
}

// Brute-force P(w^3) by triple convolution of coefficients (truncated to |k| <= N).
SpectralField::Coeffs cube_by_convolution(const SpectralField& w, bool mean_zero) {
  const int n = w.n_modes();
  SpectralField::Coeffs out = SpectralField::Coeffs::Zero(2 * n + 1);
  const double scale = 0.5;  // e_a e_b e_c = 2^{-3/2} e^{i pi (a+b+c) x} = (1/2) e_{a+b+c}
  for (int a = -n; a <= n; ++a)
    for (int b = -n; b <= n; ++b)
      for (int c = -n; c <= n; ++c) {
        const int k = a + b + c;
        if (std::abs(k) <= n) out[n + k] += scale * w.coeff(a) * w.coeff(b) * w.coeff(c);
      }
  if (mean_zero) out[n] = 0;
  return out;
}

}  // namespace

TEST_CASE("config validation") {
  auto c = config(0.5, 1, 10);
  CHECK_NOTHROW(c.validate());
  c.steps = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = config(-0.1, 1, 10);
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = config(0.1, 1, 10);
  c.grid = TorusGrid(16, 40);
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.dealias = false;
  CHECK_NOTHROW(c.validate());
  CHECK(scheme_from_string(to_string(Scheme::kSemiImplicit)) == Scheme::kSemiImplicit);
  CHECK_THROWS(scheme_from_string("rk4"));
  CHECK_THROWS_AS(smooth_initial_data(TorusGrid(4), 1.0, 0.3), std::invalid_argument);
}

TEST_CASE("dealiased cubic equals exact convolution") {
  const TorusGrid grid(6);
  SpectralField w(grid, false);
  const NoiseStream s(4, 0, StreamTag::kSynthetic);
  for (int k = 0; k <= 6; ++k) {
    const auto [a, b] = s.normal_pair(std::uint32_t(k));
    w.set_mode(k, k == 0 ? std::complex<double>(a) : std::complex<double>(a, b));
  }
  CubicProjector exact(grid, true);
  SpectralField::Coeffs out;
  const double sup = exact.apply(w.coeffs(), out, false);
  CHECK((out - cube_by_convolution(w, false)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(sup == doctest::Approx(to_physical(w).cwiseAbs().maxCoeff()));
  exact.apply(w.coeffs(), out, true);
  CHECK(out[6] == std::complex<double>(0));
  // Without padding the top modes are polluted by aliases.
  CubicProjector aliased(grid, false);
  aliased.apply(w.coeffs(), out, false);
  CHECK((out - cube_by_convolution(w, false)).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("linear limit and frozen limit") {
  const auto u0 = smooth_initial_data(TorusGrid(16), 0.5).u0;
  auto c = config(0.3, 0.5, 40);
  c.cubic = 0;
  const NoiseStream s(21, 4);
  const auto u = solve_phi4_scaled(u0, c, s);
  const auto z = solve_linear(u0, c, s);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(max_diff(u[i], z[i]) == 0);

  const auto frozen = solve_phi4_scaled(u0, config(0.0, 1.0, 10), s);
  CHECK(max_diff(frozen.back(), u0) == 0);

  const auto quiet = solve_phi4_scaled(SpectralField(TorusGrid(16), true), config(0.5, 1.0, 10), NoiseStream::silent());
  CHECK(l2_norm(quiet.back()) == 0);
}

TEST_CASE("odd symmetry without noise") {
  const auto u0 = smooth_initial_data(TorusGrid(16), 0.8).u0;
  const auto c = config(0.7, 1.0, 50);
  const auto plus = solve_phi4_scaled(u0, c, NoiseStream::silent());
  const auto minus = solve_phi4_scaled(-u0, c, NoiseStream::silent());
  CHECK(l2_norm(plus.back() + minus.back()) < 1e-15);
}

TEST_CASE("spatially constant data follows the cubic ODE at first order") {
  // u' = -eps u^3 from u(0) = a: u(t) = a / sqrt(1 + 2 eps a^2 t).
  const TorusGrid grid(4);
  SpectralField u0(grid, false);
  const double a = 1.5, eps = 0.8, T = 1.0;
  u0.set_mode(0, a * std::sqrt(2.0));
  const double exact = a / std::sqrt(1 + 2 * eps * a * a * T);
  double prev = 0;
  for (int steps : {50, 100, 200, 400}) {
    const auto u = solve_phi4_scaled(u0, config(eps, T, steps, 4), NoiseStream::silent());
    const double err = std::abs(u.back().coeff(0).real() / std::sqrt(2.0) - exact);
    if (prev > 0) CHECK(prev / err == doctest::Approx(2.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("decomposition: stepper, stored-path solver and their sum agree") {
  const auto u0 = smooth_initial_data(TorusGrid(16), 0.5).u0;
  const auto c = config(0.25, 1.0, 60);
  const NoiseStream s(77, 2);
  const auto u = solve_phi4_scaled(u0, c, s);
  const auto z = solve_linear(u0, c, s);
  const auto v = solve_shifted(z, c);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(max_diff(u[i], z[i] + v[i]) < 1e-12);
  DecomposedStepper stepper(u0, c, s);
  for (int i = 0; i < 10; ++i) stepper.step();
  CHECK(max_diff(stepper.shifted(), v[10]) == 0);
  CHECK(max_diff(stepper.linear(), z[10]) == 0);
  CHECK(stepper.time() == doctest::Approx(10.0 / 60));
  auto bad = c;
  bad.steps = 30;
  CHECK_THROWS_AS(solve_shifted(z, bad), std::invalid_argument);
}

TEST_CASE("mild form residual of the shifted equation") {
  // v(t) = -eps int_0^t e^{eps (t-s) Delta} P((v + Z)^3)(s) ds, checked by a
  // left-point quadrature on the solver's own mesh.
  const auto u0 = smooth_initial_data(TorusGrid(16), 0.5).u0;
  const auto c = config(0.5, 0.5, 200);
  const auto z = solve_linear(u0, c, NoiseStream(5, 1));
  const auto v = solve_shifted(z, c);
  CubicProjector cubic(c.grid, true);
  const double h = c.step_size();
  SpectralField acc(c.grid, true);
  SpectralField::Coeffs cube;
  const int n = c.steps;
  for (int i = 0; i < n; ++i) {
    cubic.apply((v[i] + z[i]).coeffs(), cube, true);
    const double lag = c.epsilon * (n - i) * h;
    acc += heat_semigroup(SpectralField(c.grid, cube, true), lag) * (-c.epsilon * h);
  }
  CHECK(l2_norm(acc - v.back()) < 1e-10 + 1e-9 * l2_norm(v.back()) + 1e-12);
}

TEST_CASE("direct semi-implicit scheme converges to the split scheme") {
  const auto u0 = smooth_initial_data(TorusGrid(8), 0.5).u0;
  const NoiseStream s(13, 0);
  double prev = INFINITY;
  for (int steps : {20, 80, 320}) {
    auto c = config(0.1, 0.5, steps, 8);
    c.scheme = Scheme::kSemiImplicit;
    // Same normals enter both schemes only on a common mesh: compare against
    // the split scheme on the same mesh, the gap must shrink as h does.
    const auto d = solve_phi4_direct(u0, c, s);
    const auto u = solve_phi4_scaled(u0, c, s);
    const double gap = l2_norm(d.back() - u.back());
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 0.02);
  CHECK_THROWS_AS(solve_phi4_direct(u0, config(0.1, 0.5, 10, 8), s), std::invalid_argument);
}

TEST_CASE("Brownian scaling is exact under matched meshes") {
  const auto u0 = smooth_initial_data(TorusGrid(8), 0.5).u0;
  const double eps = 0.25;
  const NoiseStream s(3, 9);
  const auto slow = solve_phi4_scaled(u0, config(eps, 1.0, 40, 8), s);
  const auto fast = solve_phi4_unscaled(u0, eps * 1.0, 40, TorusGrid(8), s);
  for (std::size_t i = 0; i < slow.size(); ++i) CHECK(max_diff(slow[i], fast[i]) < 1e-12);
}

TEST_CASE("blow-up guard and stability diagnostics") {
  const TorusGrid grid(8);
  const auto big = smooth_initial_data(grid, 2e6).u0;
  try {
    solve_phi4_scaled(big, config(0.1, 1.0, 10, 8), NoiseStream(1, 0));
    FAIL("expected BlowUpError");
  } catch (const BlowUpError& e) {
    CHECK(e.step() == 0);
  }
  SolverDiagnostics diag;
  solve_phi4_scaled(smooth_initial_data(grid, 1.0).u0, config(0.1, 1.0, 10, 8), NoiseStream(1, 0), &diag);
  CHECK(diag.steps_taken == 10);
  CHECK(diag.stability_indicator > 0);
  CHECK(diag.stability_indicator < 0.1);
}

TEST_CASE("initial data generators") {
  const TorusGrid grid(32);
  const auto rough = rough_initial_data(grid, 0.2, NoiseStream(1, 0, StreamTag::kInitialData));
  CHECK(rough.beta == 0.2);
  CHECK(rough.u0.mean_zero());
  // Stationary law: amplitude variance 1 / (2 lambda_k).
  std::vector<double> a;
  for (std::uint32_t r = 0; r < 20000; ++r)
    a.push_back(cosine_amplitude(stationary_sample(grid, NoiseStream(2, r, StreamTag::kInitialData)), 2));
  double m2 = 0;
  for (double x : a) m2 += x * x;
  CHECK(m2 / a.size() == doctest::Approx(1 / (2 * laplacian_eigenvalue(2))).epsilon(0.04));
}
