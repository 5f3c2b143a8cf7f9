#include <doctest.h>

#include "phi4/noise.hpp"
#include "phi4/random.hpp"
#include "phi4/stats.hpp"

#include <numbers>

using namespace phi4;
using std::numbers::pi;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using C = PhiloxCounter;
  CHECK(philox4x32_10(C{0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("normal and uniform draws") {
  std::vector<double> xs, us;
  const NoiseStream s(2024, 3);
  for (std::uint32_t d = 0; d < 50000; ++d) {
    const auto n = s.normal_pair(d);
    xs.insert(xs.end(), n.begin(), n.end());
    const auto u = s.uniform_pair(d);
    for (double v : u) {
      CHECK_FALSE((v <= 0 || v > 1));
      us.push_back(v);
    }
  }
  // 1e5 draws: mean sd 0.0032, variance sd 0.0045.
  CHECK(std::abs(stats::mean(xs)) < 0.015);
  CHECK(std::abs(stats::variance(xs) - 1) < 0.02);
  CHECK(std::abs(stats::mean(us) - 0.5) < 0.005);
  // Stream keys separate purposes, replicas and steps.
  CHECK(s.normal_pair(0) != s.with_tag(StreamTag::kBootstrap).normal_pair(0));
  CHECK(s.normal_pair(0) != NoiseStream(2024, 4).normal_pair(0));
  CHECK(s.normal_pair(0) != s.at_step(1).normal_pair(0));
  CHECK(s.normal_pair(7) == NoiseStream(2024, 3).normal_pair(7));
  CHECK(NoiseStream::silent().normal_pair(5) == std::array<double, 2>{0.0, 0.0});
}

TEST_CASE("Wiener increments") {
  const TorusGrid grid(4);
  std::vector<double> a1, b1, a2;
  for (std::uint32_t r = 0; r < 40000; ++r) {
    const auto dw = wiener_increment(NoiseStream(11, r), 0.25, grid);
    CHECK(dw.coeff(0) == std::complex<double>(0));
    a1.push_back(cosine_amplitude(dw, 1));
    b1.push_back(sine_amplitude(dw, 1));
    a2.push_back(cosine_amplitude(dw, 2));
  }
  CHECK(stats::variance(a1) == doctest::Approx(0.25).epsilon(0.03));
  CHECK(stats::variance(b1) == doctest::Approx(0.25).epsilon(0.03));
  double c12 = 0, cab = 0;
  for (std::size_t i = 0; i < a1.size(); ++i) {
    c12 += a1[i] * a2[i];
    cab += a1[i] * b1[i];
  }
  // Correlations of independent amplitudes: sd 1 / sqrt(4e4) = 0.005.
  CHECK(std::abs(c12 / a1.size() / 0.25) < 0.025);
  CHECK(std::abs(cab / a1.size() / 0.25) < 0.025);
  CHECK_THROWS_AS(wiener_increment(NoiseStream(1, 0), 0.0, grid), std::invalid_argument);
}

TEST_CASE("OU variance closed form") {
  // k = 1, eps = 0.1, t = 1: (1 - e^{-0.2 pi^2}) / (2 pi^2).
  const double expect = (1 - std::exp(-0.2 * pi * pi)) / (2 * pi * pi);
  CHECK(ou_variance(0.1, 1, 1.0) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(ou_variance(0.1, 1, 1.0) == doctest::Approx(0.0436).epsilon(2e-3));
  CHECK(ou_variance(0.3, 2, 0.0) == 0);
  CHECK(ou_variance(1.0, 0, 1.0) == 0);
  // Stationary limit 1 / (2 lambda).
  CHECK(ou_variance(1.0, 3, 100.0) == doctest::Approx(1 / (2 * 9 * pi * pi)));
  // Small eps t: variance ~ eps t.
  CHECK(ou_variance(1e-9, 2, 1.0) == doctest::Approx(1e-9).epsilon(1e-6));
}

TEST_CASE("composed exact steps match the analytic variance and a fine Euler-Maruyama recursion") {
  const TorusGrid grid(8);
  const double eps = 0.5, T = 1.0;
  const int steps = 50;
  const OuPropagator ou(grid, eps, T / steps);
  for (int k = 1; k <= 8; ++k) {
    double var = 0;
    for (int i = 0; i < steps; ++i) var = ou.decay(k) * ou.decay(k) * var + ou.increment_std(k) * ou.increment_std(k);
    CHECK(var == doctest::Approx(ou_variance(eps, k, T)).epsilon(1e-12));
    // Euler-Maruyama on a 1000x finer mesh: Var <- (1 - eps lambda h)^2 Var + eps h.
    const int fine = steps * 1000;
    const double h = T / fine, lam = laplacian_eigenvalue(k);
    double em = 0;
    for (int i = 0; i < fine; ++i) em = (1 - eps * lam * h) * (1 - eps * lam * h) * em + eps * h;
    CHECK(std::abs(em / var - 1) < 5e-3);
  }
  CHECK_THROWS_AS(OuPropagator(grid, -1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(OuPropagator(grid, 1, 0), std::invalid_argument);
  // eps = 0 freezes the flow.
  const OuPropagator frozen(grid, 0.0, 0.1);
  CHECK(frozen.decay(3) == 1);
  CHECK(frozen.increment_std(3) == 0);
}

TEST_CASE("stochastic convolution Monte Carlo variance") {
  const TorusGrid grid(4);
  const double eps = 0.2;
  std::vector<double> a;
  for (std::uint32_t r = 0; r < 20000; ++r)
    a.push_back(cosine_amplitude(stochastic_convolution(NoiseStream(8, r), eps, 0.5, 5, grid).back(), 2));
  CHECK(stats::variance(a) == doctest::Approx(ou_variance(eps, 2, 0.5)).epsilon(0.04));
  const auto path = stochastic_convolution(NoiseStream(8, 0), eps, 0.5, 5, grid);
  CHECK(path.steps() == 5);
  CHECK(l2_norm(path.front()) == 0);
  CHECK_THROWS_AS(stochastic_convolution(NoiseStream(8, 0), 0.0, 0.5, 5, grid), std::invalid_argument);
}

TEST_CASE("mode amplitude moments grow like sqrt(p)") {
  // X = cosine amplitude of mode 1 after 10 exact OU steps; (E|X|^p)^{1/p}/sqrt(p)
  // must stay within a factor 1.2 over p = 2, 4, 8, 16 (Gaussian value 1.141).
  const TorusGrid grid(2);
  const OuPropagator ou(grid, 0.1, 0.1);
  const std::uint32_t n = 1000000;
  std::array<double, 4> sum{};
  for (std::uint32_t r = 0; r < n; ++r) {
    const NoiseStream s(4242, r);
    double x = 0;
    for (std::uint32_t i = 0; i < 10; ++i) x = ou.decay(1) * x + ou.increment_std(1) * s.normal_pair(i)[0];
    const double a = x * x;
    sum[0] += a;
    sum[1] += a * a;
    sum[2] += a * a * a * a;
    sum[3] += std::pow(a, 8);
  }
  std::vector<double> ratio;
  for (int j = 0; j < 4; ++j) {
    const double p = 2 << j;
    ratio.push_back(std::pow(sum[j] / n, 1 / p) / std::sqrt(p));
  }
  const double spread = *std::max_element(ratio.begin(), ratio.end()) / *std::min_element(ratio.begin(), ratio.end());
  CAPTURE(spread);
  CHECK(spread <= 1.2);
  CHECK(spread == doctest::Approx(1.141).epsilon(0.03));
}
