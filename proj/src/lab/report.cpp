#include "phi4/lab/report.hpp"

#include "phi4/lab/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace phi4::lab {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

struct Axis {
  double lo, hi;
  bool log;
  double map(double v, double a, double b) const {
    const double t = log ? (std::log10(v) - lo) / (hi - lo) : (v - lo) / (hi - lo);
    return a + t * (b - a);
  }
  double label(double t) const { return log ? std::pow(10.0, t) : t; }
};

Axis make_axis(const std::vector<double>& v, bool log) {
  double lo = INFINITY, hi = -INFINITY;
  for (double x : v) {
    const double y = log ? std::log10(x) : x;
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad, log};
}

}  // namespace

std::string line_chart_svg(const ChartSpec& spec, const std::vector<Series>& series) {
  std::vector<Series> clean;
  std::vector<double> xs, ys;
  for (const auto& s : series) {
    Series c{s.name, {}, {}};
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      const double x = s.x[i], y = s.y[i];
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if ((spec.log_x && x <= 0) || (spec.log_y && y <= 0)) continue;
      c.x.push_back(x);
      c.y.push_back(y);
      xs.push_back(x);
      ys.push_back(y);
    }
    clean.push_back(std::move(c));
  }
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title)
      << "</text>\n";
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  svg << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\"" << y0 - y1
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
      << escape(spec.x_label) << (spec.log_x ? " (log)" : "") << "</text>\n";
  svg << "<text transform=\"translate(16," << (y0 + y1) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(spec.y_label) << (spec.log_y ? " (log)" : "") << "</text>\n";
  if (xs.empty()) {
    svg << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << (y0 + y1) / 2 << "\" text-anchor=\"middle\">no data</text>\n";
    svg << "</svg>\n";
    return svg.str();
  }
  const Axis ax = make_axis(xs, spec.log_x), ay = make_axis(ys, spec.log_y);
  for (int t = 0; t <= 4; ++t) {
    const double fx = ax.lo + (ax.hi - ax.lo) * t / 4, fy = ay.lo + (ay.hi - ay.lo) * t / 4;
    const double px = x0 + (x1 - x0) * t / 4, py = y0 + (y1 - y0) * t / 4;
    svg << "<line x1=\"" << px << "\" y1=\"" << y0 << "\" x2=\"" << px << "\" y2=\"" << y0 + 5
        << "\" stroke=\"black\"/><text x=\"" << px << "\" y=\"" << y0 + 18 << "\" text-anchor=\"middle\">"
        << num(ax.label(fx)) << "</text>\n";
    svg << "<line x1=\"" << x0 - 5 << "\" y1=\"" << py << "\" x2=\"" << x0 << "\" y2=\"" << py
        << "\" stroke=\"black\"/><text x=\"" << x0 - 8 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">"
        << num(ay.label(fy)) << "</text>\n";
  }
  for (std::size_t s = 0; s < clean.size(); ++s) {
    const char* color = kColors[s % std::size(kColors)];
    const auto& c = clean[s];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < c.x.size(); ++i)
      svg << num(ax.map(c.x[i], x0, x1)) << ',' << num(ay.map(c.y[i], y0, y1)) << ' ';
    svg << "\"/>\n";
    for (std::size_t i = 0; i < c.x.size(); ++i)
      svg << "<circle cx=\"" << num(ax.map(c.x[i], x0, x1)) << "\" cy=\"" << num(ay.map(c.y[i], y0, y1))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    const double ly = y1 + 16 * double(s + 1);
    svg << "<line x1=\"" << x1 + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << x1 + 30 << "\" y2=\"" << ly - 4
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/><text x=\"" << x1 + 35 << "\" y=\"" << ly << "\">"
        << escape(c.name) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

namespace {

std::string markdown_table(const CsvTable& t) {
  std::string out = "|";
  for (const auto& h : t.header) out += " " + h + " |";
  out += "\n|";
  for (std::size_t i = 0; i < t.header.size(); ++i) out += " --- |";
  out += "\n";
  for (const auto& row : t.rows) {
    out += "|";
    for (const auto& c : row) out += " " + c + " |";
    out += "\n";
  }
  return out;
}

// "# key,value" trailer lines.
std::string trailer(const std::string& text) {
  std::string out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("# ", 0) == 0) {
      auto comma = line.find(',');
      if (comma != std::string::npos) out += "- " + line.substr(2, comma - 2) + ": " + line.substr(comma + 1) + "\n";
    }
  return out;
}

// Rows of `t` split by the value of column `key`.
std::map<std::string, Series> split(const CsvTable& t, const std::string& key, const std::string& x,
                                    const std::string& y, const std::string& prefix) {
  std::map<std::string, Series> out;
  const int ck = t.column(key), cx = t.column(x), cy = t.column(y);
  for (const auto& row : t.rows) {
    auto& s = out[row[ck]];
    s.name = prefix + row[ck];
    s.x.push_back(std::stod(row[cx]));
    s.y.push_back(std::stod(row[cy]));
  }
  return out;
}

}  // namespace

std::vector<std::string> build_report(const std::filesystem::path& dir) {
  std::vector<std::string> written;
  std::string summary = "# Run summary\n\n";
  auto emit = [&](const std::string& name, const std::string& text) {
    write_file(dir / name, text);
    written.push_back(name);
  };
  auto section = [&](const std::string& file, const std::string& title, const std::string& text,
                     const CsvTable& table, const std::string& svg) {
    summary += "## " + title + "\n\nSource: `" + file + "`";
    if (!svg.empty()) summary += ", chart: `" + svg + "`";
    summary += "\n\n" + markdown_table(table) + "\n";
    const auto extra = trailer(text);
    if (!extra.empty()) summary += extra + "\n";
  };

  bool any = false;
  if (std::filesystem::exists(dir / "tail.csv")) {
    any = true;
    const auto text = read_file(dir / "tail.csv");
    const auto t = parse_csv(text);
    std::vector<Series> series{{"eps log p_hat", t.numbers("epsilon"), t.numbers("eps_log_p")}};
    if (std::ranges::count(t.header, "eps_log_p_half_mesh"))
      series.push_back({"eps log p_hat at h/2", t.numbers("epsilon"), t.numbers("eps_log_p_half_mesh")});
    emit("tail.svg", line_chart_svg({"Tail sweep", "epsilon", "eps log p", true, false}, series));
    section("tail.csv", "Exponential equivalence sweep", text, t, "tail.svg");
  }
  if (std::filesystem::exists(dir / "mode_ldp.csv")) {
    any = true;
    const auto text = read_file(dir / "mode_ldp.csv");
    const auto t = parse_csv(text);
    const auto eps = t.numbers("epsilon");
    emit("mode_ldp.svg", line_chart_svg({"Mode-level tail", "epsilon", "eps log P", true, false},
                                        {{"closed form", eps, t.numbers("closed_form_eps_log_p")},
                                         {"Monte Carlo", eps, t.numbers("eps_log_p")},
                                         {"-rho^2/(2T)", eps, t.numbers("prediction")}}));
    section("mode_ldp.csv", "Mode-level large deviations", text, t, "mode_ldp.svg");
  }
  if (std::filesystem::exists(dir / "moments.csv")) {
    any = true;
    const auto text = read_file(dir / "moments.csv");
    const auto t = parse_csv(text);
    std::vector<Series> series;
    for (auto& [p, s] : split(t, "p", "epsilon", "moment", "p = ")) series.push_back(s);
    emit("moments.svg", line_chart_svg({"Moments of sup_t ||Z||_inf", "epsilon", "(E X^p)^(1/p)", true, true}, series));
    section("moments.csv", "Moments of the stochastic convolution", text, t, "moments.svg");
  }
  if (std::filesystem::exists(dir / "moment_fit.csv")) {
    any = true;
    const auto text = read_file(dir / "moment_fit.csv");
    section("moment_fit.csv", "Moment scaling fit", text, parse_csv(text), "");
  }
  if (std::filesystem::exists(dir / "shifted.csv")) {
    any = true;
    const auto text = read_file(dir / "shifted.csv");
    const auto t = parse_csv(text);
    emit("shifted.svg", line_chart_svg({"Shifted component", "epsilon", "E sup_t ||v||_L2", true, true},
                                       {{"mean sup L2", t.numbers("epsilon"), t.numbers("mean_sup_l2")}}));
    section("shifted.csv", "Shifted-equation magnitude", text, t, "shifted.svg");
  }
  if (std::filesystem::exists(dir / "scaling.csv")) {
    any = true;
    const auto text = read_file(dir / "scaling.csv");
    const auto t = parse_csv(text);
    std::vector<Series> series;
    const int arm = t.column("arm"), comp = t.column("component");
    for (const std::string a : {"scaled", "control"})
      for (const std::string c : {"c", "s"}) {
        Series s{a + " " + c, {}, {}};
        for (const auto& row : t.rows)
          if (row[arm] == a && row[comp] == c && row[t.column("time")] == t.rows.front()[t.column("time")]) {
            s.x.push_back(std::stod(row[t.column("mode")]));
            s.y.push_back(std::max(1e-300, std::stod(row[t.column("p_value")])));
          }
        series.push_back(s);
      }
    emit("scaling.svg", line_chart_svg({"KS p-values at the first time", "mode k", "p-value", false, true}, series));
    section("scaling.csv", "Brownian scaling check", text, t, "scaling.svg");
  }
  if (std::filesystem::exists(dir / "besov.csv")) {
    any = true;
    const auto text = read_file(dir / "besov.csv");
    section("besov.csv", "Littlewood-Paley checks", text, parse_csv(text), "");
  }
  if (std::filesystem::exists(dir / "rate.csv")) {
    any = true;
    const auto text = read_file(dir / "rate.csv");
    section("rate.csv", "Rate functional", text, parse_csv(text), "");
  }
  if (!any) throw std::invalid_argument("report: no known CSV in " + dir.string());
  emit("summary.md", summary);
  return written;
}

}  // namespace phi4::lab
