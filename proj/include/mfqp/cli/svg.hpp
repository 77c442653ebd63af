#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mfqp::cli {

struct PlotSeries
{
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<bool> skip; //!< optional; true breaks the line at that point
};

struct PlotSpec
{
  std::string title;
  std::string x_label;
  std::string y_label;
  std::optional<std::pair<double, double>> x_range;
  std::optional<std::pair<double, double>> y_range; //!< points outside are not drawn
};

//! Self-contained SVG line chart with axes, ticks and a legend.
std::string render_line_plot(const PlotSpec& spec, std::span<const PlotSeries> series);

} // namespace mfqp::cli
