#include "phi4/lab/csv.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace phi4::lab {

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string join(const std::vector<std::string>& cells) {
  std::string line;
  for (const auto& c : cells) {
    if (!line.empty()) line += ',';
    line += c;
  }
  return line + '\n';
}

std::string f(double x) { return format_double(x); }
std::string i(long x) { return std::to_string(x); }

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("csv: not a number: '" + s + "'");
  }
  if (used != s.size()) throw std::invalid_argument("csv: not a number: '" + s + "'");
  return v;
}

}  // namespace

std::string trajectory_csv(const Trajectory& path) {
  std::string out = "time,k,re,im\n";
  const int n = path.grid().n_modes();
  for (std::size_t s = 0; s < path.size(); ++s)
    for (int k = 0; k <= n; ++k) {
      const auto c = path[s].coeff(k);
      out += join({f(path.time(s)), i(k), f(c.real()), f(c.imag())});
    }
  return out;
}

Trajectory parse_trajectory_csv(const std::string& text, std::optional<int> n_phys) {
  const CsvTable table = parse_csv(text);
  const int ct = table.column("time"), ck = table.column("k"), cr = table.column("re"), ci = table.column("im");
  std::vector<double> times;
  std::vector<std::map<int, std::complex<double>>> slices;
  int n = 0;
  for (const auto& row : table.rows) {
    const double t = parse_double(row[ct]);
    const double kd = parse_double(row[ck]);
    const int k = int(kd);
    if (double(k) != kd) throw std::invalid_argument("trajectory csv: non-integer k");
    if (times.empty() || t != times.back()) {
      if (!times.empty() && !(t > times.back())) throw std::invalid_argument("trajectory csv: times must increase");
      times.push_back(t);
      slices.emplace_back();
    }
    if (!slices.back().emplace(k, std::complex<double>(parse_double(row[cr]), parse_double(row[ci]))).second)
      throw std::invalid_argument("trajectory csv: duplicate (time, k)");
    n = std::max(n, std::abs(k));
  }
  if (times.empty()) throw std::invalid_argument("trajectory csv: no rows");
  if (n < 1) throw std::invalid_argument("trajectory csv: no modes");
  if (times.front() != 0) throw std::invalid_argument("trajectory csv: first time must be 0");
  const double horizon = times.back();
  const double h = times.size() > 1 ? horizon / double(times.size() - 1) : 0.0;
  for (std::size_t s = 0; s < times.size(); ++s)
    if (std::abs(times[s] - h * double(s)) > 1e-9 * std::max(1.0, horizon))
      throw std::invalid_argument("trajectory csv: time mesh is not uniform");
  const TorusGrid grid = n_phys ? TorusGrid(n, *n_phys) : TorusGrid(n);
  bool mean_zero = true;
  for (const auto& slice : slices)
    if (auto it = slice.find(0); it != slice.end() && it->second != std::complex<double>(0)) mean_zero = false;
  std::vector<SpectralField> states;
  for (const auto& slice : slices) {
    SpectralField::Coeffs c = SpectralField::Coeffs::Zero(grid.size());
    for (int k = -n; k <= n; ++k) {
      if (auto it = slice.find(k); it != slice.end())
        c[n + k] = it->second;
      else if (auto jt = slice.find(-k); jt != slice.end())
        c[n + k] = std::conj(jt->second);
    }
    states.emplace_back(grid, c, mean_zero);
  }
  return Trajectory(horizon, std::move(states));
}

std::string tail_csv(const std::vector<TailEstimate>& rows, const std::vector<TailEstimate>& half_mesh) {
  if (!half_mesh.empty() && half_mesh.size() != rows.size()) throw std::invalid_argument("tail_csv: row count mismatch");
  std::string out = "epsilon,delta,hits,replicas,p_hat,ci_low,ci_high,eps_log_p,censored";
  out += half_mesh.empty() ? "\n" : ",hits_half_mesh,eps_log_p_half_mesh,censored_half_mesh\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    std::vector<std::string> cells{f(r.epsilon), f(r.delta),    i(r.hits),       i(r.replicas),
                                   f(r.p_hat),   f(r.ci_low),   f(r.ci_high),    f(r.eps_log_p),
                                   r.censored ? "1" : "0"};
    if (!half_mesh.empty()) {
      cells.push_back(i(half_mesh[k].hits));
      cells.push_back(f(half_mesh[k].eps_log_p));
      cells.push_back(half_mesh[k].censored ? "1" : "0");
    }
    out += join(cells);
  }
  return out;
}

std::string moments_csv(const MomentFit& fit) {
  std::string out = "epsilon,p,moment,stderr\n";
  for (const auto& r : fit.moments) out += join({f(r.epsilon), i(r.p), f(r.moment), f(r.stderr_)});
  return out;
}

std::string moment_fit_csv(const MomentFit& fit) {
  std::string out = "epsilon,mean_sup,growth_p2,growth_p4,growth_p8,growth_p16\n";
  for (std::size_t e = 0; e < fit.epsilons.size(); ++e) {
    const auto& g = fit.growth[e];
    out += join({f(fit.epsilons[e]), f(fit.mean_sup[e]), f(g[0]), f(g[1]), f(g[2]), f(g[3])});
  }
  out += "# slope," + f(fit.fit.slope) + "\n# intercept," + f(fit.fit.intercept) + "\n# slope_stderr," +
         f(fit.slope_stderr) + "\n# growth_spread," + f(fit.growth_spread) + "\n# stationary," +
         (fit.stationary ? "1" : "0") + "\n";
  return out;
}

std::string mode_ldp_csv(const ModeLdpReport& report) {
  std::string out =
      "epsilon,rho,horizon,mode,prediction,closed_form_p,closed_form_eps_log_p,hits,replicas,p_hat,ci_low,ci_high,"
      "eps_log_p,censored,closed_form_in_ci\n";
  for (const auto& r : report.rows)
    out += join({f(r.epsilon), f(report.rho), f(report.horizon), i(report.mode), f(report.prediction),
                 f(r.closed_form_p), f(r.closed_form_eps_log_p), i(r.mc.hits), i(r.mc.replicas), f(r.mc.p_hat),
                 f(r.mc.ci_low), f(r.mc.ci_high), f(r.mc.eps_log_p), r.mc.censored ? "1" : "0",
                 r.closed_form_in_ci ? "1" : "0"});
  return out;
}

std::string shifted_csv(const ShiftedFit& fit) {
  std::string out = "epsilon,mean_sup_l2,max_energy_ratio,aborts,max_stability\n";
  for (const auto& r : fit.rows)
    out += join({f(r.epsilon), f(r.mean_sup_l2), f(r.max_energy_ratio), i(r.aborts), f(r.max_stability)});
  out += "# slope," + f(fit.fit.slope) + "\n# intercept," + f(fit.fit.intercept) + "\n# slope_stderr," +
         f(fit.slope_stderr) + "\n";
  return out;
}

std::string scaling_csv(const ScalingReport& report) {
  std::string out = "arm,mode,component,time,statistic,p_value,rejected\n";
  auto emit = [&](const char* arm, const std::vector<KsRow>& rows) {
    for (const auto& r : rows)
      out += join({arm, i(r.mode), std::string(1, r.component), f(r.time), f(r.statistic), f(r.p_value),
                   r.rejected ? "1" : "0"});
  };
  emit("scaled", report.rows);
  emit("control", report.control_rows);
  out += "# epsilon," + f(report.epsilon) + "\n# pass_rate," + f(report.pass_rate) + "\n# control_rejected," +
         (report.control_rejected ? "1" : "0") + "\n";
  return out;
}

std::string besov_csv(const std::vector<BesovRow>& rows) {
  std::string out = "n_modes,j_max,unity_defect,far_overlap,support_leak,embedding_max_ratio,schauder_max_ratio\n";
  for (const auto& r : rows)
    out += join({i(r.n_modes), i(r.j_max), f(r.unity_defect), f(r.far_overlap), f(r.support_leak),
                 f(r.embedding_max_ratio), f(r.schauder_max_ratio)});
  return out;
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == name) return int(c);
  throw std::invalid_argument("csv: missing column '" + name + "'");
}

std::vector<double> CsvTable::numbers(const std::string& name) const {
  const int c = column(name);
  std::vector<double> out;
  for (const auto& row : rows) out.push_back(parse_double(row[c]));
  return out;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (table.header.empty()) {
      table.header = std::move(cells);
    } else {
      if (cells.size() != table.header.size()) throw std::invalid_argument("csv: ragged row '" + line + "'");
      table.rows.push_back(std::move(cells));
    }
  }
  if (table.header.empty()) throw std::invalid_argument("csv: empty input");
  return table;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace phi4::lab
