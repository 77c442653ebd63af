#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mfqp {

//! Uniform sampling of [x_min, x_max] with n points (both ends included).
class Grid
{
public:
  Grid(double x_min, double x_max, std::size_t n);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }

  //! i-th point; the last index returns x_max exactly.
  double operator[](std::size_t i) const noexcept
  {
    return i + 1 == n_ ? x_max_ : x_min_ + static_cast<double>(i) * h_;
  }

  std::vector<double> points() const;

  friend bool operator==(const Grid&, const Grid&) = default;

private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double h_;
};

//! Throws Error(invalid_range) unless x_min < x_max and n >= 3.
Grid make_grid(double x_min, double x_max, std::size_t n);

//! A real function sampled on a Grid.
struct GridFunction
{
  Grid grid;
  std::vector<double> values;

  GridFunction(Grid g, std::vector<double> v);

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const noexcept { return values[i]; }
};

//! Central 3-point stencil inside, one-sided second-order stencils at the
//! two endpoints. Requires n >= 5.
GridFunction second_derivative(const GridFunction& f);

//! Composite trapezoid over the whole grid span.
double integrate(const GridFunction& f);

//! Trapezoid rule for an arbitrary uniformly spaced sample.
double trapezoid(std::span<const double> values, double h);

} // namespace mfqp
