#pragma once

// Plot-ready data derived purely from stored run/sweep CSVs.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace stqos::report {

enum class Figure { fig2, fig4, fig5 };

// Throws ConfigError for an unknown id.
Figure parse_figure(std::string_view id);
std::string figure_name(Figure f);

struct PlotPoint {
  double x = 0.0;
  double y = 0.0;
  std::string series;
};

struct PlotData {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<std::string> series_order;
  std::vector<PlotPoint> points;  // grouped by series_order, x ascending
};

// Reads sweep.csv when present, else the single-run trace.csv / aoi.csv.
// Time-valued quantities are converted to seconds (1 cu = 1e-6 s).
// Throws SchemaError naming a missing column or file.
PlotData derive(const std::filesystem::path& dir, Figure figure);

std::string plot_csv(const PlotData& data);
std::string plot_svg(const PlotData& data);

// Writes <dir>/<fig>.csv and <dir>/<fig>.svg; returns both paths.
std::vector<std::filesystem::path> report(const std::filesystem::path& dir, Figure figure);

}  // namespace stqos::report
