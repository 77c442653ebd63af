#include "mfqp/cli/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace mfqp::cli {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;
constexpr std::size_t kMaxPointsPerSeries = 4000;

constexpr std::array<const char*, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c",
                                              "#ff7f0e", "#9467bd", "#8c564b"};

std::string fmt(double v, int precision = 4)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

std::string escape(const std::string& s)
{
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

// "nice" tick step covering the span in roughly `target` intervals
double tick_step(double span, int target = 6)
{
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  const double nice = r < 1.5 ? 1.0 : r < 3.0 ? 2.0 : r < 7.0 ? 5.0 : 10.0;
  return nice * mag;
}

std::pair<double, double> data_range(std::span<const PlotSeries> series, bool use_x,
                                     const std::optional<std::pair<double, double>>& clip_x)
{
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i < s.skip.size() && s.skip[i])
        continue;
      if (clip_x && (s.x[i] < clip_x->first || s.x[i] > clip_x->second))
        continue;
      const double v = use_x ? s.x[i] : s.y[i];
      if (!std::isfinite(v))
        continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo))
    return {0.0, 1.0};
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  return {lo, hi};
}

} // namespace

std::string render_line_plot(const PlotSpec& spec, std::span<const PlotSeries> series)
{
  const auto [x0, x1] = spec.x_range ? *spec.x_range : data_range(series, true, std::nullopt);
  const auto [y0, y1] = spec.y_range ? *spec.y_range : data_range(series, false, spec.x_range);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return kTop + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
    << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(spec.title) << "</text>\n";

  // axes and ticks
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  const double xs = tick_step(x1 - x0);
  for (double t = std::ceil(x0 / xs) * xs; t <= x1 + 1e-9 * xs; t += xs) {
    const double px = sx(t);
    o << "<line x1=\"" << px << "\" y1=\"" << kTop + ph << "\" x2=\"" << px << "\" y2=\""
      << kTop + ph + 5 << "\" stroke=\"black\"/>";
    o << "<text x=\"" << px << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
      << fmt(std::abs(t) < 1e-12 * xs ? 0.0 : t) << "</text>\n";
  }
  const double ys = tick_step(y1 - y0);
  for (double t = std::ceil(y0 / ys) * ys; t <= y1 + 1e-9 * ys; t += ys) {
    const double py = sy(t);
    o << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py << "\" x2=\"" << kLeft << "\" y2=\""
      << py << "\" stroke=\"black\"/>";
    o << "<line x1=\"" << kLeft << "\" y1=\"" << py << "\" x2=\"" << kLeft + pw << "\" y2=\""
      << py << "\" stroke=\"#e0e0e0\"/>";
    o << "<text x=\"" << kLeft - 8 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">"
      << fmt(std::abs(t) < 1e-12 * ys ? 0.0 : t) << "</text>\n";
  }
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12
    << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n";
  o << "<text transform=\"translate(16," << kTop + ph / 2
    << ") rotate(-90)\" text-anchor=\"middle\">" << escape(spec.y_label) << "</text>\n";

  o << "<clipPath id=\"plot\"><rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw
    << "\" height=\"" << ph << "\"/></clipPath>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* colour = kPalette[k % kPalette.size()];
    const std::size_t stride = std::max<std::size_t>(1, s.x.size() / kMaxPointsPerSeries);
    o << "<path clip-path=\"url(#plot)\" fill=\"none\" stroke-width=\"1.5\" stroke=\"" << colour
      << "\" d=\"";
    bool pen_down = false;
    for (std::size_t i = 0; i < s.x.size(); i += stride) {
      const bool hidden = (i < s.skip.size() && s.skip[i]) || !std::isfinite(s.y[i]) ||
                          s.y[i] < y0 || s.y[i] > y1 || s.x[i] < x0 || s.x[i] > x1;
      if (hidden) {
        pen_down = false;
        continue;
      }
      o << (pen_down ? 'L' : 'M') << fmt(sx(s.x[i]), 6) << ',' << fmt(sy(s.y[i]), 6) << ' ';
      pen_down = true;
    }
    o << "\"/>\n";
    const double ly = kTop + 16 + 16 * static_cast<double>(k);
    o << "<line x1=\"" << kLeft + pw - 150 << "\" y1=\"" << ly - 4 << "\" x2=\""
      << kLeft + pw - 125 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << colour
      << "\" stroke-width=\"2\"/>";
    o << "<text x=\"" << kLeft + pw - 120 << "\" y=\"" << ly << "\">" << escape(s.label)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

} // namespace mfqp::cli
