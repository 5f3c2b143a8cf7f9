#include "phi4/lab/experiments.hpp"

#include "phi4/noise.hpp"
#include "phi4/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace phi4::lab {

const char* const kSeedRule =
    "replica r at every eps draws Philox4x32-10 with key = (seed lo, seed hi) and counter = "
    "(draw, step, r, tag); tag 0 noise, 1 initial data, 2 synthetic, 3 bootstrap. The same (seed, r) is "
    "reused across the eps sweep (common random numbers). scaling-check offsets the replica index by "
    "1e6 per arm.";

TailEstimate make_tail_estimate(double epsilon, double delta, long hits, long replicas) {
  if (replicas < 1) throw std::invalid_argument("make_tail_estimate: replicas must be >= 1");
  if (hits < 0 || hits > replicas) throw std::invalid_argument("make_tail_estimate: hits out of range");
  TailEstimate t;
  t.epsilon = epsilon;
  t.delta = delta;
  t.hits = hits;
  t.replicas = replicas;
  t.p_hat = double(hits) / double(replicas);
  const auto ci = stats::clopper_pearson(hits, replicas, 0.95);
  t.ci_low = std::min(ci.low, t.p_hat);
  t.ci_high = std::max(ci.high, t.p_hat);
  t.censored = hits == 0;
  t.eps_log_p = epsilon * std::log(t.censored ? 3.0 / double(replicas) : t.p_hat);
  return t;
}

TailSweep tail_sweep(const std::vector<double>& epsilons, long replicas, std::optional<double> delta,
                     const ReplicaMetric& metric) {
  if (epsilons.empty()) throw std::invalid_argument("tail_sweep: empty eps list");
  if (replicas < 1) throw std::invalid_argument("tail_sweep: replicas must be >= 1");
  TailSweep out;
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    std::vector<std::optional<double>> values(static_cast<std::size_t>(replicas));
    parallel_for(values.size(), [&](std::size_t r) { values[r] = metric(e, std::uint32_t(r)); });
    std::vector<double> kept;
    kept.reserve(values.size());
    for (const auto& v : values)
      if (v) kept.push_back(*v);
    const long aborts = replicas - long(kept.size());
    if (kept.empty())
      throw ExperimentError("every replica aborted at eps = " + std::to_string(epsilons[e]));
    if (e == 0 && !delta) {
      delta = stats::median(kept);
      if (!(*delta > 0)) throw ExperimentError("median threshold is not positive");
    }
    const long hits = long(std::count_if(kept.begin(), kept.end(), [&](double v) { return v > *delta; }));
    // Aborted replicas are counted in the denominator as non-events.
    out.rows.push_back(make_tail_estimate(epsilons[e], *delta, hits, replicas));
    out.aborts.push_back(aborts);
    out.samples.push_back(std::move(kept));
  }
  out.delta = *delta;
  return out;
}

SpectralField initial_field(const ExperimentConfig& cfg, const TorusGrid& grid) {
  if (cfg.u0 == "smooth") return smooth_initial_data(grid, cfg.u0_amplitude, cfg.beta).u0;
  if (cfg.u0 == "zero") return SpectralField(grid, true);
  if (cfg.u0 == "rough")
    return rough_initial_data(grid, cfg.beta, NoiseStream(cfg.seed, 0, StreamTag::kInitialData)).u0;
  throw ConfigError("experiment.u0", "'" + cfg.u0 + "' is not a fixed initial datum");
}

namespace {

double lp6_pow6(const PhysicalSamples<double>& x) {
  return TorusGrid::kPeriod / double(x.size()) * x.array().pow(6).sum();
}

}  // namespace

ShiftedMeasure measure_shifted(const SpectralField& u0, const SolverConfig& cfg, const NoiseStream& stream,
                               const ShiftedMeasureOptions& options, const DyadicPartition* partition) {
  if (options.hoelder && !partition) throw std::invalid_argument("measure_shifted: Hoelder norm needs a partition");
  ShiftedMeasure m;
  DecomposedStepper stepper(u0, cfg, stream);
  const double h = cfg.step_size();
  double prev_z8 = 0;
  if (options.energy) prev_z8 = std::pow(sup_norm(stepper.linear()), 8);
  try {
    for (int i = 0; i < cfg.steps; ++i) {
      stepper.step();
      const SpectralField v = stepper.shifted();
      m.sup_l2 = std::max(m.sup_l2, l2_norm(v));
      if (options.hoelder) m.sup_hoelder = std::max(m.sup_hoelder, hoelder_norm(v, -0.5 - options.alpha, *partition));
      if (options.energy) {
        m.sup_l6_pow6 = std::max(m.sup_l6_pow6, lp6_pow6(to_physical(v)));
        const double z8 = std::pow(sup_norm(stepper.linear()), 8);
        m.z8_integral += cfg.epsilon * h * (prev_z8 + z8) / 2;
        prev_z8 = z8;
      }
    }
  } catch (const BlowUpError&) {
    m.aborted = true;
  }
  m.stability = stepper.diagnostics().stability_indicator;
  return m;
}

TailSweep estimate_tail(const ExperimentConfig& cfg) {
  cfg.require_for(ExperimentKind::kTailSweep);
  const TorusGrid grid = cfg.grid();
  const SpectralField u0 = initial_field(cfg, grid);
  const DyadicPartition partition(grid);
  ShiftedMeasureOptions opts;
  opts.alpha = cfg.alpha;
  std::optional<double> delta;
  if (!cfg.delta_from_median) delta = cfg.delta;
  auto sweep_at = [&](int steps, std::optional<double> threshold) {
    return tail_sweep(cfg.epsilons, cfg.replicas, threshold, [&](std::size_t e, std::uint32_t r) -> std::optional<double> {
      SolverConfig s = cfg.solver(cfg.epsilons[e]);
      s.steps = steps;
      const auto m = measure_shifted(u0, s, NoiseStream(cfg.seed, r), opts, &partition);
      if (m.aborted) return std::nullopt;
      return m.sup_hoelder;
    });
  };
  TailSweep out = sweep_at(cfg.steps, delta);
  if (cfg.mesh_check) {
    auto half = sweep_at(2 * cfg.steps, out.delta);
    out.half_mesh_rows = std::move(half.rows);
    out.half_mesh_aborts = std::move(half.aborts);
  }
  return out;
}

// ---------------------------------------------------------------------------

double mode_tail_probability(double rho, double epsilon, double horizon) {
  if (rho < 0) throw std::invalid_argument("mode_tail_probability: rho must be nonnegative");
  if (!(epsilon > 0) || !(horizon > 0)) throw std::invalid_argument("mode_tail_probability: need eps, T > 0");
  return std::min(1.0, 2 * stats::normal_upper_tail(rho / std::sqrt(epsilon * horizon)));
}

double mode_tail_eps_log(double rho, double epsilon, double horizon) {
  if (rho < 0) throw std::invalid_argument("mode_tail_eps_log: rho must be nonnegative");
  if (!(epsilon > 0) || !(horizon > 0)) throw std::invalid_argument("mode_tail_eps_log: need eps, T > 0");
  if (rho == 0) return 0;
  return epsilon * (std::log(2.0) + stats::log_normal_upper_tail(rho / std::sqrt(epsilon * horizon)));
}

ModeLdpReport mode_ldp_check(double rho, double horizon, const std::vector<double>& epsilons, int mode,
                             long replicas, std::uint64_t seed) {
  if (rho < 0) throw std::invalid_argument("mode_ldp_check: rho must be nonnegative");
  if (mode == 0) throw std::invalid_argument("mode_ldp_check: mode must be nonzero");
  if (!(horizon > 0)) throw std::invalid_argument("mode_ldp_check: T must be positive");
  if (replicas < 1) throw std::invalid_argument("mode_ldp_check: replicas must be >= 1");
  ModeLdpReport report;
  report.rho = rho;
  report.horizon = horizon;
  report.mode = mode;
  report.prediction = -rho * rho / (2 * horizon);
  // <x_eps(T) - z0, e> for the real unit mode e = cos(pi k .) is sqrt(eps) W_k(T),
  // one Gaussian draw per replica. Replica r uses the cosine normal of mode |k|
  // at step 0, exactly as a one-step wiener_increment would.
  const auto k = std::uint32_t(std::abs(mode));
  for (double eps : epsilons) {
    if (!(eps > 0)) throw std::invalid_argument("mode_ldp_check: eps must be positive");
    std::vector<char> hit(static_cast<std::size_t>(replicas), 0);
    const double scale = std::sqrt(eps * horizon);
    parallel_for(hit.size(), [&](std::size_t r) {
      const double a = NoiseStream(seed, std::uint32_t(r)).normal_pair(k)[0];
      hit[r] = std::abs(scale * a) > rho;
    });
    const long hits = std::accumulate(hit.begin(), hit.end(), 0L);
    ModeLdpRow row;
    row.epsilon = eps;
    row.closed_form_p = mode_tail_probability(rho, eps, horizon);
    row.closed_form_eps_log_p = mode_tail_eps_log(rho, eps, horizon);
    row.mc = make_tail_estimate(eps, rho, hits, replicas);
    row.closed_form_in_ci = row.mc.ci_low <= row.closed_form_p && row.closed_form_p <= row.mc.ci_high;
    report.rows.push_back(row);
  }
  return report;
}

// ---------------------------------------------------------------------------

namespace {

void check_fit_grid(const std::vector<double>& eps) {
  if (eps.size() < 4) throw std::invalid_argument("scaling fit: need at least 4 eps values");
  if (std::log10(eps.front() / eps.back()) < 1.0 - 1e-12)
    throw std::invalid_argument("scaling fit: eps values must span at least one decade");
}

double moment(std::span<const double> xs, int p) {
  double acc = 0;
  for (double x : xs) acc += std::pow(std::abs(x), p);
  return std::pow(acc / double(xs.size()), 1.0 / p);
}

// Bootstrap resample b of n items: index i maps to floor(u n) with u uniform
// from the bootstrap stream keyed by (seed, b, column).
std::vector<std::size_t> resample(std::uint64_t seed, int b, std::uint32_t column, std::size_t n) {
  const NoiseStream s = NoiseStream(seed, std::uint32_t(b), StreamTag::kBootstrap).at_step(column);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; i += 2) {
    const auto u = s.uniform_pair(std::uint32_t(i / 2));
    idx[i] = std::min(n - 1, std::size_t(u[0] * double(n)));
    if (i + 1 < n) idx[i + 1] = std::min(n - 1, std::size_t(u[1] * double(n)));
  }
  return idx;
}

// OLS of log mean(samples) on log eps plus the bootstrap stderr of the slope.
std::pair<stats::LinearFit, double> loglog_fit(const std::vector<double>& eps,
                                               const std::vector<std::vector<double>>& samples,
                                               std::uint64_t seed, int bootstrap) {
  std::vector<double> x, y;
  for (std::size_t e = 0; e < eps.size(); ++e) {
    const double m = stats::mean(samples[e]);
    if (!(m > 0)) throw ExperimentError("scaling fit: nonpositive mean at eps = " + std::to_string(eps[e]));
    x.push_back(std::log(eps[e]));
    y.push_back(std::log(m));
  }
  const auto fit = stats::least_squares(x, y);
  if (!std::isfinite(fit.slope)) throw ExperimentError("scaling fit: degenerate fit");
  if (bootstrap < 2) return {fit, fit.slope_stderr};
  std::vector<double> slopes(static_cast<std::size_t>(bootstrap));
  parallel_for(slopes.size(), [&](std::size_t b) {
    std::vector<double> yb(eps.size());
    for (std::size_t e = 0; e < eps.size(); ++e) {
      const auto idx = resample(seed, int(b), std::uint32_t(e), samples[e].size());
      double acc = 0;
      for (auto i : idx) acc += samples[e][i];
      yb[e] = std::log(acc / double(idx.size()));
    }
    slopes[b] = stats::least_squares(x, yb).slope;
  });
  return {fit, std::sqrt(stats::variance(slopes))};
}

}  // namespace

MomentFit moment_scaling_fit(const ExperimentConfig& cfg) {
  cfg.require_for(ExperimentKind::kMomentScaling);
  check_fit_grid(cfg.epsilons);
  const TorusGrid grid = cfg.grid();
  MomentFit out;
  out.stationary = cfg.u0 == "stationary";
  out.epsilons = cfg.epsilons;
  const std::size_t n = std::size_t(cfg.replicas);
  std::vector<std::vector<double>> sups(cfg.epsilons.size()), amps(cfg.epsilons.size());
  for (std::size_t e = 0; e < cfg.epsilons.size(); ++e) {
    const double eps = cfg.epsilons[e];
    std::vector<double> sup(n), amp(n);
    const OuPropagator ou(grid, eps, cfg.horizon / cfg.steps);
    parallel_for(n, [&](std::size_t r) {
      NoiseStream s(cfg.seed, std::uint32_t(r));
      SpectralField::Coeffs z = SpectralField::Coeffs::Zero(grid.size());
      if (out.stationary)
        z = stationary_sample(grid, NoiseStream(cfg.seed, std::uint32_t(r), StreamTag::kInitialData)).coeffs();
      double m = sup_norm(SpectralField(grid, z, true));
      for (int i = 0; i < cfg.steps; ++i) {
        ou.step(z, s);
        s.advance();
        m = std::max(m, sup_norm(SpectralField(grid, z, true)));
      }
      sup[r] = m;
      amp[r] = std::sqrt(2.0) * z[grid.n_modes() + cfg.mode].real();
    });
    sups[e] = std::move(sup);
    amps[e] = std::move(amp);
  }
  for (const auto& s : sups) out.mean_sup.push_back(stats::mean(s));
  std::tie(out.fit, out.slope_stderr) = loglog_fit(cfg.epsilons, sups, cfg.seed, cfg.bootstrap);

  for (std::size_t e = 0; e < cfg.epsilons.size(); ++e) {
    for (int p : cfg.moments) {
      MomentRow row;
      row.epsilon = cfg.epsilons[e];
      row.p = p;
      row.moment = moment(sups[e], p);
      if (cfg.bootstrap >= 2) {
        std::vector<double> reps(static_cast<std::size_t>(cfg.bootstrap));
        parallel_for(reps.size(), [&](std::size_t b) {
          const auto idx = resample(cfg.seed, int(b), std::uint32_t(e), n);
          double acc = 0;
          for (auto i : idx) acc += std::pow(sups[e][i], p);
          reps[b] = std::pow(acc / double(n), 1.0 / p);
        });
        row.stderr_ = std::sqrt(stats::variance(reps));
      }
      out.moments.push_back(row);
    }
    const double second = moment(amps[e], 2);
    std::vector<double> g;
    for (int p : {2, 4, 8, 16}) g.push_back(moment(amps[e], p) / (std::sqrt(double(p)) * second));
    out.growth_spread = std::max(out.growth_spread, *std::max_element(g.begin(), g.end()) /
                                                        *std::min_element(g.begin(), g.end()));
    out.growth.push_back(std::move(g));
  }
  return out;
}

// ---------------------------------------------------------------------------

ShiftedFit shifted_magnitude_fit(const ExperimentConfig& cfg) {
  cfg.require_for(ExperimentKind::kShiftedFit);
  check_fit_grid(cfg.epsilons);
  const TorusGrid grid = cfg.grid();
  const SpectralField u0 = initial_field(cfg, grid);
  ShiftedMeasureOptions opts;
  opts.hoelder = false;
  opts.energy = true;
  ShiftedFit out;
  std::vector<std::vector<double>> l2(cfg.epsilons.size());
  for (std::size_t e = 0; e < cfg.epsilons.size(); ++e) {
    const SolverConfig scfg = cfg.solver(cfg.epsilons[e]);
    std::vector<ShiftedMeasure> ms(static_cast<std::size_t>(cfg.replicas));
    parallel_for(ms.size(), [&](std::size_t r) {
      ms[r] = measure_shifted(u0, scfg, NoiseStream(cfg.seed, std::uint32_t(r)), opts, nullptr);
    });
    ShiftedFitRow row;
    row.epsilon = cfg.epsilons[e];
    for (const auto& m : ms) {
      if (m.aborted) {
        ++row.aborts;
        continue;
      }
      l2[e].push_back(m.sup_l2);
      if (m.z8_integral > 0) row.max_energy_ratio = std::max(row.max_energy_ratio, m.sup_l6_pow6 / m.z8_integral);
      row.max_stability = std::max(row.max_stability, m.stability);
    }
    if (l2[e].empty()) throw ExperimentError("every replica aborted at eps = " + std::to_string(row.epsilon));
    row.mean_sup_l2 = stats::mean(l2[e]);
    out.max_energy_ratio = std::max(out.max_energy_ratio, row.max_energy_ratio);
    out.rows.push_back(row);
  }
  std::tie(out.fit, out.slope_stderr) = loglog_fit(cfg.epsilons, l2, cfg.seed, cfg.bootstrap);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Real amplitudes (cos then sin for k = 1..K) at the sample times of each replica.
// Layout: [time][2 (k - 1) + component][replica].
using AmplitudeTable = std::vector<std::vector<std::vector<double>>>;

AmplitudeTable sample_amplitudes(const ExperimentConfig& cfg, const SolverConfig& scfg, const SpectralField& u0,
                                 std::uint32_t replica_offset, long* aborts) {
  const int times = cfg.ks_times, modes = cfg.ks_modes;
  const std::size_t n = std::size_t(cfg.replicas);
  AmplitudeTable table(std::size_t(times), std::vector<std::vector<double>>(2 * std::size_t(modes), std::vector<double>(n)));
  std::vector<char> aborted(n, 0);
  const int stride = scfg.steps / times;
  parallel_for(n, [&](std::size_t r) {
    DecomposedStepper stepper(u0, scfg, NoiseStream(cfg.seed, replica_offset + std::uint32_t(r)));
    try {
      for (int t = 0; t < times; ++t) {
        for (int i = 0; i < stride; ++i) stepper.step();
        const SpectralField u = stepper.full();
        for (int k = 1; k <= modes; ++k) {
          table[t][2 * (k - 1)][r] = cosine_amplitude(u, k);
          table[t][2 * (k - 1) + 1][r] = sine_amplitude(u, k);
        }
      }
    } catch (const BlowUpError&) {
      aborted[r] = 1;
    }
  });
  *aborts = std::accumulate(aborted.begin(), aborted.end(), 0L);
  return table;
}

std::vector<KsRow> compare(const AmplitudeTable& a, const AmplitudeTable& b, const ExperimentConfig& cfg,
                           double time_step) {
  std::vector<KsRow> rows;
  for (std::size_t t = 0; t < a.size(); ++t)
    for (std::size_t c = 0; c < a[t].size(); ++c) {
      const auto ks = stats::ks_two_sample(a[t][c], b[t][c]);
      KsRow row;
      row.mode = int(c / 2) + 1;
      row.component = c % 2 == 0 ? 'c' : 's';
      row.time = time_step * double(t + 1);
      row.statistic = ks.statistic;
      row.p_value = ks.p_value;
      row.rejected = ks.p_value < cfg.significance;
      rows.push_back(row);
    }
  return rows;
}

}  // namespace

ScalingReport scaling_law_check(const ExperimentConfig& cfg) {
  cfg.require_for(ExperimentKind::kScalingCheck);
  if (cfg.replicas < kMinScalingReplicas)
    throw ExperimentError("undersampled: scaling-check needs at least " + std::to_string(kMinScalingReplicas) +
                          " replicas");
  if (cfg.ks_modes > cfg.n_modes) throw ConfigError("experiment.ks_modes", "exceeds n_modes");
  if (cfg.ks_times < 1 || cfg.steps % cfg.ks_times != 0)
    throw ConfigError("experiment.ks_times", "must be positive and divide solver.steps");
  const TorusGrid grid = cfg.grid();
  const SpectralField u0 = initial_field(cfg, grid);
  const double eps = cfg.epsilons.front();
  ScalingReport report;
  report.epsilon = eps;

  // u(eps t): the unscaled equation on [0, eps T] with the same step count.
  SolverConfig unscaled = cfg.solver(1.0);
  unscaled.horizon = eps * cfg.horizon;
  const SolverConfig scaled = cfg.solver(eps);
  SolverConfig control = scaled;
  control.drift_factor = cfg.control_drift;

  constexpr std::uint32_t kArm = 1000000;
  long aborts = 0;
  const auto ref = sample_amplitudes(cfg, unscaled, u0, 0, &aborts);
  long a2 = 0, a3 = 0;
  const auto test = sample_amplitudes(cfg, scaled, u0, kArm, &a2);
  const auto ctrl = sample_amplitudes(cfg, control, u0, 2 * kArm, &a3);
  if (aborts + a2 + a3 > 0) throw ExperimentError("scaling-check: blow-up guard fired");

  const double dt = cfg.horizon / cfg.ks_times;
  report.rows = compare(ref, test, cfg, dt);
  report.control_rows = compare(ref, ctrl, cfg, dt);
  const auto passed = std::count_if(report.rows.begin(), report.rows.end(), [](const KsRow& r) { return !r.rejected; });
  report.pass_rate = double(passed) / double(report.rows.size());
  report.control_rejected = true;
  for (const auto& r : report.control_rows)
    if (r.mode == 1 && !r.rejected) report.control_rejected = false;
  return report;
}

// ---------------------------------------------------------------------------

SpectralField gaussian_field(const TorusGrid& grid, double decay, const NoiseStream& stream) {
  SpectralField f(grid, true);
  for (int k = 1; k <= grid.n_modes(); ++k) {
    const auto [a, b] = stream.normal_pair(std::uint32_t(k));
    const double s = std::pow(1.0 + k, -decay) / std::sqrt(2.0);
    f.set_mode(k, {s * a, -s * b});
  }
  return f;
}

std::vector<BesovRow> besov_verify(const ExperimentConfig& cfg) {
  std::vector<BesovRow> rows;
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> times{1e-4, 1e-3, 1e-2, 1e-1};
  const long count = std::min<long>(cfg.replicas, 200);
  for (int n : {std::max(2, cfg.n_modes / 2), cfg.n_modes, 2 * cfg.n_modes}) {
    const TorusGrid grid(n);
    const DyadicPartition partition(grid);
    BesovRow row;
    row.n_modes = n;
    row.j_max = partition.j_max();
    row.unity_defect = partition.unity_defect();
    row.far_overlap = partition.far_overlap();
    row.support_leak = partition.support_leak();
    std::vector<SpectralField> fields;
    for (long r = 0; r < count; ++r)
      fields.push_back(gaussian_field(grid, 0.5 + 0.5 * double(r % 4),
                                      NoiseStream(cfg.seed, std::uint32_t(r), StreamTag::kSynthetic)));
    const std::span<const SpectralField> view(fields);
    row.embedding_max_ratio = verify_embedding(view, 0.5, 2.0, 2.0, inf, inf, partition).max_ratio;
    row.schauder_max_ratio = verify_schauder(view, -0.6, 1.0, std::span<const double>(times), partition).max_ratio;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace phi4::lab
