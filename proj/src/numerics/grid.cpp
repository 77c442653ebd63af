#include "mfqp/numerics/grid.hpp"

#include "mfqp/error.hpp"

#include <cmath>
#include <string>

namespace mfqp {

std::string_view to_string(ErrorCode code) noexcept
{
  switch (code) {
    case ErrorCode::invalid_range: return "invalid-range";
    case ErrorCode::grid_too_small: return "grid-too-small";
    case ErrorCode::invalid_params: return "invalid-params";
    case ErrorCode::embedding_failure: return "embedding-failure";
    case ErrorCode::lag_too_large: return "lag-too-large";
    case ErrorCode::insufficient_data: return "insufficient-data";
    case ErrorCode::nonpositive_moment: return "nonpositive-moment";
    case ErrorCode::range_too_small: return "range-too-small";
    case ErrorCode::degenerate_design: return "degenerate-design";
    case ErrorCode::zero_variance: return "zero-variance";
    case ErrorCode::series_too_short: return "series-too-short";
    case ErrorCode::grid_too_narrow: return "grid-too-narrow";
    case ErrorCode::underflow: return "underflow";
    case ErrorCode::io_error: return "io-error";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::validation_error: return "validation-error";
    case ErrorCode::length_too_short: return "length-too-short";
  }
  return "unknown";
}

Grid::Grid(double x_min, double x_max, std::size_t n)
  : x_min_(x_min)
  , x_max_(x_max)
  , n_(n)
  , h_(0.0)
{
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max)) {
    throw Error(ErrorCode::invalid_range,
                "grid requires finite x_min < x_max (got " +
                  std::to_string(x_min) + ", " + std::to_string(x_max) + ")");
  }
  if (n < 3) {
    throw Error(ErrorCode::invalid_range,
                "grid requires at least 3 points (got " + std::to_string(n) +
                  ")");
  }
  h_ = (x_max - x_min) / static_cast<double>(n - 1);
}

std::vector<double> Grid::points() const
{
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i)
    out[i] = (*this)[i];
  return out;
}

Grid make_grid(double x_min, double x_max, std::size_t n)
{
  return Grid(x_min, x_max, n);
}

GridFunction::GridFunction(Grid g, std::vector<double> v)
  : grid(g)
  , values(std::move(v))
{
  if (values.size() != grid.size()) {
    throw Error(ErrorCode::invalid_range,
                "grid function has " + std::to_string(values.size()) +
                  " values for " + std::to_string(grid.size()) + " points");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]))
      throw Error(ErrorCode::invalid_range,
                  "non-finite value at grid index " + std::to_string(i));
  }
}

GridFunction second_derivative(const GridFunction& f)
{
  const std::size_t n = f.size();
  if (n < 5) {
    throw Error(ErrorCode::grid_too_small,
                "second derivative needs at least 5 points");
  }
  const double h2 = f.grid.spacing() * f.grid.spacing();
  const auto& y = f.values;
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i)
    d[i] = (y[i - 1] - 2.0 * y[i] + y[i + 1]) / h2;
  // 4-point one-sided stencils, O(h^2)
  d[0] = (2.0 * y[0] - 5.0 * y[1] + 4.0 * y[2] - y[3]) / h2;
  d[n - 1] = (2.0 * y[n - 1] - 5.0 * y[n - 2] + 4.0 * y[n - 3] - y[n - 4]) / h2;
  return GridFunction(f.grid, std::move(d));
}

double trapezoid(std::span<const double> values, double h)
{
  if (values.size() < 2)
    return 0.0;
  double interior = 0.0;
  for (std::size_t i = 1; i + 1 < values.size(); ++i)
    interior += values[i];
  return h * (0.5 * (values.front() + values.back()) + interior);
}

double integrate(const GridFunction& f)
{
  return trapezoid(f.values, f.grid.spacing());
}

} // namespace mfqp
