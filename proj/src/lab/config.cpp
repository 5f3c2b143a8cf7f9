#include "phi4/lab/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace phi4::lab {
namespace {

const std::map<std::string, ExperimentKind>& kind_names() {
  static const std::map<std::string, ExperimentKind> names{
      {"simulate", ExperimentKind::kSimulate},          {"tail-sweep", ExperimentKind::kTailSweep},
      {"moment-scaling", ExperimentKind::kMomentScaling}, {"shifted-fit", ExperimentKind::kShiftedFit},
      {"mode-ldp", ExperimentKind::kModeLdp},           {"scaling-check", ExperimentKind::kScalingCheck},
      {"besov-verify", ExperimentKind::kBesovVerify},   {"rate-eval", ExperimentKind::kRateEval},
  };
  return names;
}

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"solver", {"n_modes", "n_phys", "horizon", "steps", "scheme", "dealias"}},
      {"experiment",
       {"kind", "epsilons", "delta", "alpha", "beta", "beta_prime", "replicas", "seed", "u0", "u0_amplitude", "rho",
        "mode", "moments", "bootstrap", "significance", "ks_modes", "ks_times", "control_drift",
        "mesh_check"}},
      {"output", {"dir"}},
  };
  return keys;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

template <typename T>
T parse_number(const std::string& field, const std::string& raw) {
  std::istringstream in(trim(raw));
  T value;
  in >> value;
  if (in.fail() || !in.eof()) throw ConfigError(field, "cannot parse '" + raw + "'");
  return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& field, const std::string& raw) {
  std::vector<T> out;
  std::istringstream in(raw);
  for (std::string item; std::getline(in, item, ',');) out.push_back(parse_number<T>(field, item));
  if (out.empty()) throw ConfigError(field, "empty list");
  return out;
}

bool parse_bool(const std::string& field, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "true" || v == "on" || v == "1") return true;
  if (v == "false" || v == "off" || v == "0") return false;
  throw ConfigError(field, "expected true or false, got '" + raw + "'");
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [name, k] : kind_names())
    if (k == kind) return name;
  return "unknown";
}

ExperimentKind kind_from_string(const std::string& s) {
  const auto it = kind_names().find(s);
  if (it == kind_names().end()) throw ConfigError("experiment.kind", "unknown experiment kind '" + s + "'");
  return it->second;
}

TorusGrid ExperimentConfig::grid() const {
  try {
    return n_phys ? TorusGrid(n_modes, *n_phys) : TorusGrid(n_modes);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("solver.n_phys", e.what());
  }
}

SolverConfig ExperimentConfig::solver(double epsilon) const {
  SolverConfig cfg;
  cfg.epsilon = epsilon;
  cfg.horizon = horizon;
  cfg.steps = steps;
  cfg.grid = grid();
  cfg.scheme = scheme;
  cfg.dealias = dealias;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("solver", e.what());
  }
  return cfg;
}

void ExperimentConfig::require_for(ExperimentKind k) const {
  if (kind && *kind != k)
    throw ConfigError("experiment.kind", "config is for '" + to_string(*kind) + "', not '" + to_string(k) + "'");
  const bool needs_eps = k != ExperimentKind::kBesovVerify && k != ExperimentKind::kRateEval;
  if (needs_eps && epsilons.empty()) throw ConfigError("experiment.epsilons", "missing epsilon list");
  if (k == ExperimentKind::kTailSweep && !delta && !delta_from_median)
    throw ConfigError("experiment.delta", "missing threshold delta");
  if (!(horizon > 0)) throw ConfigError("solver.horizon", "must be positive");
  if (steps < 1) throw ConfigError("solver.steps", "must be >= 1");
  if (n_modes < 1) throw ConfigError("solver.n_modes", "must be >= 1");
  grid();
}

ExperimentConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", std::string("malformed config: ") + e.what());
  }

  ExperimentConfig cfg;
  cfg.source = text;
  for (const auto& [section, body] : tree) {
    const auto allowed = allowed_keys().find(section);
    if (allowed == allowed_keys().end())
      throw ConfigError(section, "unknown section or key outside a section");
    for (const auto& [key, node] : body) {
      const std::string field = section + "." + key;
      if (!allowed->second.contains(key)) throw ConfigError(field, "unknown key");
      const std::string value = trim(node.get_value<std::string>());
      if (field == "solver.n_modes") cfg.n_modes = parse_number<int>(field, value);
      else if (field == "solver.n_phys") cfg.n_phys = parse_number<int>(field, value);
      else if (field == "solver.horizon") cfg.horizon = parse_number<double>(field, value);
      else if (field == "solver.steps") cfg.steps = parse_number<int>(field, value);
      else if (field == "solver.dealias") cfg.dealias = parse_bool(field, value);
      else if (field == "solver.scheme") {
        try {
          cfg.scheme = scheme_from_string(value);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(field, e.what());
        }
      }
      else if (field == "experiment.kind") cfg.kind = kind_from_string(value);
      else if (field == "experiment.epsilons") cfg.epsilons = parse_list<double>(field, value);
      else if (field == "experiment.delta") {
        if (value == "median") cfg.delta_from_median = true;
        else cfg.delta = parse_number<double>(field, value);
      }
      else if (field == "experiment.alpha") cfg.alpha = parse_number<double>(field, value);
      else if (field == "experiment.beta") cfg.beta = parse_number<double>(field, value);
      else if (field == "experiment.beta_prime") cfg.beta_prime = parse_number<double>(field, value);
      else if (field == "experiment.replicas") cfg.replicas = parse_number<long>(field, value);
      else if (field == "experiment.seed") cfg.seed = parse_number<std::uint64_t>(field, value);
      else if (field == "experiment.u0") cfg.u0 = value;
      else if (field == "experiment.u0_amplitude") cfg.u0_amplitude = parse_number<double>(field, value);
      else if (field == "experiment.rho") cfg.rho = parse_number<double>(field, value);
      else if (field == "experiment.mode") cfg.mode = parse_number<int>(field, value);
      else if (field == "experiment.moments") cfg.moments = parse_list<int>(field, value);
      else if (field == "experiment.bootstrap") cfg.bootstrap = parse_number<int>(field, value);
      else if (field == "experiment.significance") cfg.significance = parse_number<double>(field, value);
      else if (field == "experiment.ks_modes") cfg.ks_modes = parse_number<int>(field, value);
      else if (field == "experiment.ks_times") cfg.ks_times = parse_number<int>(field, value);
      else if (field == "experiment.control_drift") cfg.control_drift = parse_number<double>(field, value);
      else if (field == "experiment.mesh_check") cfg.mesh_check = parse_bool(field, value);
      else if (field == "output.dir") cfg.output_dir = value;
    }
  }

  for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
    if (!(cfg.epsilons[i] > 0)) throw ConfigError("experiment.epsilons", "values must be positive");
    if (i > 0 && !(cfg.epsilons[i] < cfg.epsilons[i - 1]))
      throw ConfigError("experiment.epsilons", "values must be strictly decreasing");
  }
  if (cfg.replicas < 1) throw ConfigError("experiment.replicas", "must be >= 1");
  if (cfg.delta && !(*cfg.delta > 0)) throw ConfigError("experiment.delta", "must be positive");
  if (!(cfg.alpha > 0)) throw ConfigError("experiment.alpha", "must be positive");
  static const std::set<std::string> u0_classes{"smooth", "zero", "rough", "stationary"};
  if (!u0_classes.contains(cfg.u0)) throw ConfigError("experiment.u0", "unknown initial data class '" + cfg.u0 + "'");
  if (cfg.bootstrap < 0) throw ConfigError("experiment.bootstrap", "must be >= 0");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace phi4::lab
