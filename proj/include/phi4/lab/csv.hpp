#pragma once

// CSV persistence. Floats are written with 17 significant digits so that a
// read-back reproduces every bit.

#include "phi4/lab/experiments.hpp"
#include "phi4/rate.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace phi4::lab {

std::string format_double(double x);

/// Columns time,k,re,im with one row per (slice, k >= 0).
std::string trajectory_csv(const Trajectory& path);
/// Inverse of trajectory_csv; the mesh must be uniform and start at 0.
Trajectory parse_trajectory_csv(const std::string& text, std::optional<int> n_phys = std::nullopt);

/// With half-mesh rows, three columns for the h/2 sweep are appended.
std::string tail_csv(const std::vector<TailEstimate>& rows, const std::vector<TailEstimate>& half_mesh = {});
std::string moments_csv(const MomentFit& fit);
std::string moment_fit_csv(const MomentFit& fit);
std::string mode_ldp_csv(const ModeLdpReport& report);
std::string shifted_csv(const ShiftedFit& fit);
std::string scaling_csv(const ScalingReport& report);
std::string besov_csv(const std::vector<BesovRow>& rows);

/// A parsed CSV: header plus rows of raw cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;
  std::vector<double> numbers(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace phi4::lab
