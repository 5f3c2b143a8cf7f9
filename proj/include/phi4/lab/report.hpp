#pragma once

// Plots and summary tables rebuilt from the CSVs of an output directory.

#include <filesystem>
#include <string>
#include <vector>

namespace phi4::lab {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

/// Standalone SVG line chart. Non-finite points (and nonpositive ones on log
/// axes) are dropped.
std::string line_chart_svg(const ChartSpec& spec, const std::vector<Series>& series);

/// Reads every known CSV in `dir`, writes one SVG per CSV and summary.md.
/// Returns the files written; throws when the directory holds no known CSV.
std::vector<std::string> build_report(const std::filesystem::path& dir);

}  // namespace phi4::lab
