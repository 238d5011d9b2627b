#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mdim/constructions.hpp"
#include "mdim/covercount.hpp"
#include "mdim/estimators.hpp"
#include "mdim/infotheory.hpp"

namespace mdim::io {

/// Full-precision decimal rendering (17 significant digits).
std::string fmt(double v);

// CountCurve CSV: n,eps,ball,delta,count,method,covered_mass
std::string count_curve_csv(const CountCurve& curve);
CountCurve parse_count_curve_csv(const std::string& text);

// EstimateReport JSON: {quantity, slope, intercept, residual, window, mode,
// inputs-digest}
std::string estimate_report_json(const EstimateReport& r);
EstimateReport parse_estimate_report_json(const std::string& text);

// RDCurve CSV: n,eps,rate_nats,distortion,method,grid_mesh
std::string rd_curve_csv(const RDCurve& curve, std::span<const double> eps_list);
RDCurve parse_rd_curve_csv(const std::string& text);

// PiecewiseAffineMap CSV of (breakpoint,value) pairs.
std::string piecewise_map_csv(const PiecewiseAffineMap& map);
PiecewiseAffineMap parse_piecewise_map_csv(const std::string& text);

void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// Minimal gnuplot script plotting columns of a CSV emitted above.
std::string gnuplot_script(const std::string& csv_name, const std::string& title,
                           int x_col, int y_col, bool logy);

} // namespace mdim::io
