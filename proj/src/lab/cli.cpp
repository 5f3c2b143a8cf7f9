#include "phi4/lab/cli.hpp"

#include "phi4/lab/config.hpp"
#include "phi4/lab/csv.hpp"
#include "phi4/lab/experiments.hpp"
#include "phi4/lab/manifest.hpp"
#include "phi4/lab/report.hpp"
#include "phi4/parallel.hpp"
#include "phi4/rate.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <functional>
#include <iostream>
#include <optional>

namespace phi4::lab {

namespace {

struct Options {
  std::string config;
  std::string manifest;
  std::string out;
  std::string trajectory;
  std::string z0;
  std::string dir;
};

// Per-run outputs: file name -> contents, plus abort counts.
struct RunOutput {
  std::map<std::string, std::string> files;
  std::map<std::string, long> aborts;
  std::string message;
};

std::string eps_key(double eps) { return "eps=" + format_double(eps); }

SpectralField start_field(const ExperimentConfig& cfg, const TorusGrid& grid) {
  if (cfg.u0 == "stationary") return stationary_sample(grid, NoiseStream(cfg.seed, 0, StreamTag::kInitialData));
  return initial_field(cfg, grid);
}

RunOutput run_simulate(const ExperimentConfig& cfg) {
  cfg.require_for(ExperimentKind::kSimulate);
  const double eps = cfg.epsilons.front();
  const SolverConfig scfg = cfg.solver(eps);
  const SpectralField u0 = start_field(cfg, scfg.grid);
  const NoiseStream stream(cfg.seed, 0);
  SolverDiagnostics diag;
  RunOutput out;
  const Trajectory u = scfg.scheme == Scheme::kSemiImplicit ? solve_phi4_direct(u0, scfg, stream, &diag)
                                                            : solve_phi4_scaled(u0, scfg, stream, &diag);
  out.files["trajectory.csv"] = trajectory_csv(u);
  out.files["trajectory_linear.csv"] = trajectory_csv(solve_linear(u0, scfg, stream));
  out.aborts[eps_key(eps)] = 0;
  out.message = "simulated " + std::to_string(scfg.steps) + " steps, stability indicator " +
                format_double(diag.stability_indicator);
  return out;
}

RunOutput run_besov(const ExperimentConfig& cfg) {
  cfg.require_for(ExperimentKind::kBesovVerify);
  RunOutput out;
  const auto rows = besov_verify(cfg);
  out.files["besov.csv"] = besov_csv(rows);
  double defect = 0;
  for (const auto& r : rows) defect = std::max(defect, r.unity_defect);
  out.message = "max partition-of-unity defect " + format_double(defect);
  return out;
}

RunOutput run_rate(const ExperimentConfig& cfg, const Options& opt) {
  if (opt.trajectory.empty()) throw ConfigError("--trajectory", "rate needs a trajectory CSV");
  if (!std::filesystem::exists(opt.trajectory)) throw ConfigError("--trajectory", "no such file " + opt.trajectory);
  if (!opt.z0.empty() && !std::filesystem::exists(opt.z0)) throw ConfigError("--z0", "no such file " + opt.z0);
  const auto n_phys = cfg.n_phys;
  const Trajectory g = parse_trajectory_csv(read_file(opt.trajectory), n_phys);
  SpectralField z0 = g.front();
  if (!opt.z0.empty()) z0 = parse_trajectory_csv(read_file(opt.z0), n_phys).front();
  const RateResult r = rate_functional(g, z0);
  RunOutput out;
  out.files["rate.csv"] = "horizon,steps,n_modes,value,admissible,holder_constant\n" + format_double(g.horizon()) +
                          "," + std::to_string(g.steps()) + "," + std::to_string(g.grid().n_modes()) + "," +
                          format_double(r.value) + "," + (r.admissible ? "1" : "0") + "," +
                          format_double(r.holder_constant) + "\n";
  out.message = "I = " + format_double(r.value);
  return out;
}

RunOutput run_mode_ldp(const ExperimentConfig& cfg) {
  cfg.require_for(ExperimentKind::kModeLdp);
  if (cfg.rho < 0) throw ConfigError("experiment.rho", "must be nonnegative");
  const auto report = mode_ldp_check(cfg.rho, cfg.horizon, cfg.epsilons, cfg.mode, cfg.replicas, cfg.seed);
  RunOutput out;
  out.files["mode_ldp.csv"] = mode_ldp_csv(report);
  out.message = "prediction " + format_double(report.prediction);
  return out;
}

RunOutput run_tail(const ExperimentConfig& cfg) {
  const auto sweep = estimate_tail(cfg);
  RunOutput out;
  out.files["tail.csv"] = tail_csv(sweep.rows, sweep.half_mesh_rows);
  for (std::size_t e = 0; e < sweep.rows.size(); ++e) out.aborts[eps_key(sweep.rows[e].epsilon)] = sweep.aborts[e];
  for (std::size_t e = 0; e < sweep.half_mesh_aborts.size(); ++e)
    out.aborts[eps_key(sweep.rows[e].epsilon) + ",h/2"] = sweep.half_mesh_aborts[e];
  out.message = "delta " + format_double(sweep.delta);
  return out;
}

RunOutput run_moment(const ExperimentConfig& cfg) {
  const auto fit = moment_scaling_fit(cfg);
  RunOutput out;
  out.files["moments.csv"] = moments_csv(fit);
  out.files["moment_fit.csv"] = moment_fit_csv(fit);
  out.message = "slope " + format_double(fit.fit.slope) + " +- " + format_double(fit.slope_stderr);
  return out;
}

RunOutput run_shifted(const ExperimentConfig& cfg) {
  const auto fit = shifted_magnitude_fit(cfg);
  RunOutput out;
  out.files["shifted.csv"] = shifted_csv(fit);
  for (const auto& r : fit.rows) out.aborts[eps_key(r.epsilon)] = r.aborts;
  out.message = "slope " + format_double(fit.fit.slope) + " +- " + format_double(fit.slope_stderr);
  return out;
}

RunOutput run_scaling(const ExperimentConfig& cfg) {
  const auto report = scaling_law_check(cfg);
  RunOutput out;
  out.files["scaling.csv"] = scaling_csv(report);
  out.aborts["all arms"] = 0;
  out.message = "pass rate " + format_double(report.pass_rate) + ", control " +
                (report.control_rejected ? "rejected" : "not rejected");
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Small-noise experiments for the stochastic Allen-Cahn (Phi^4_1) equation on the torus", "phi4"};
  app.require_subcommand(1);
  Options opt;

  using Runner = std::function<RunOutput(const ExperimentConfig&, const Options&)>;
  std::map<CLI::App*, std::pair<std::string, Runner>> runners;
  auto add = [&](const std::string& name, const std::string& help, Runner run) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto* cfg = sub->add_option("--config", opt.config, "Experiment configuration file");
    auto* man = sub->add_option("--manifest", opt.manifest, "Replay the run recorded in a manifest");
    cfg->excludes(man);
    sub->add_option("--out", opt.out, "Output directory (overrides output.dir)");
    runners[sub] = {name, std::move(run)};
    return sub;
  };
  auto wrap = [](RunOutput (*f)(const ExperimentConfig&)) {
    return Runner([f](const ExperimentConfig& c, const Options&) { return f(c); });
  };
  add("simulate", "Dump one trajectory of u and of its linear part", wrap(run_simulate));
  add("besov", "Partition-of-unity, embedding and Schauder checks", wrap(run_besov));
  CLI::App* rate = add("rate", "Evaluate the rate functional on a trajectory CSV", run_rate);
  rate->add_option("--trajectory", opt.trajectory, "Trajectory CSV (time,k,re,im)");
  rate->add_option("--z0", opt.z0, "CSV whose first slice is the start point (default: the path's own start)");
  add("mode-ldp", "Mode-level Gaussian tail versus the rate prediction", wrap(run_mode_ldp));
  add("ldp-sweep", "Tail probabilities of sup_t ||u - Z|| over an eps sweep", wrap(run_tail));
  add("moment-fit", "Moment scaling of the stochastic convolution", wrap(run_moment));
  add("shifted-fit", "Magnitude of the shifted component and the L6 energy ratio", wrap(run_shifted));
  add("scaling-check", "KS comparison of u(eps t) with u_eps(t)", wrap(run_scaling));
  CLI::App* report = app.add_subcommand("report", "Aggregate CSVs of a run directory into SVG plots and summary.md");
  report->add_option("--dir", opt.dir, "Run directory")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (report->parsed()) {
      for (const auto& f : build_report(opt.dir)) out << "wrote " << (std::filesystem::path(opt.dir) / f).string() << "\n";
      return kExitOk;
    }
    CLI::App* sub = app.get_subcommands().front();
    const auto& [name, runner] = runners.at(sub);

    std::optional<RunManifest> reference;
    ExperimentConfig cfg;
    Options run_opt = opt;
    if (!opt.manifest.empty()) {
      reference = manifest_from_json(read_file(opt.manifest));
      if (reference->command != name)
        throw ConfigError("--manifest", "manifest records '" + reference->command + "', not '" + name + "'");
      cfg = parse_config(reference->config);
      if (auto it = reference->options.find("trajectory"); it != reference->options.end()) run_opt.trajectory = it->second;
      if (auto it = reference->options.find("z0"); it != reference->options.end()) run_opt.z0 = it->second;
    } else if (!opt.config.empty()) {
      cfg = load_config(opt.config);
    } else if (name != "besov" && name != "rate") {
      throw ConfigError("--config", "a configuration file is required");
    }
    const std::filesystem::path dir = opt.out.empty() ? cfg.output_dir : std::filesystem::path(opt.out);

    const auto start = std::chrono::steady_clock::now();
    RunOutput result = runner(cfg, run_opt);
    RunManifest manifest;
    manifest.command = name;
    if (!run_opt.trajectory.empty()) manifest.options["trajectory"] = run_opt.trajectory;
    if (!run_opt.z0.empty()) manifest.options["z0"] = run_opt.z0;
    manifest.config = cfg.source;
    manifest.seed_rule = kSeedRule;
    manifest.threads = worker_count();
    manifest.aborts = result.aborts;
    for (const auto& [file, text] : result.files) {
      write_file(dir / file, text);
      manifest.digests[file] = sha256_hex(text);
      out << "wrote " << (dir / file).string() << "\n";
    }
    manifest.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_file(dir / "manifest.json", to_json(manifest));
    out << "wrote " << (dir / "manifest.json").string() << "\n";
    if (!result.message.empty()) out << result.message << "\n";
    if (reference) {
      const auto bad = digest_mismatches(*reference, manifest);
      if (!bad.empty()) {
        for (const auto& f : bad) err << "error: digest mismatch for " << f << "\n";
        return kExitFailure;
      }
      out << "replay reproduced " << reference->digests.size() << " file digest(s)\n";
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const BlowUpError& e) {
    err << "experiment failed: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "experiment failed: " << e.what() << "\n";
    return kExitFailure;
  }
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace phi4::lab
