#include "mfqp/empirical.hpp"

#include "mfqp/error.hpp"
#include "mfqp/numerics/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace mfqp {

namespace {

// beyond this many bandwidths a Gaussian kernel is below 1e-16 of its peak
constexpr double kKernelReach = 8.5;

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

double normal_tail(double z)
{
  return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

} // namespace

double sample_mean(std::span<const double> x)
{
  double s = 0.0;
  for (double v : x)
    s += v;
  return s / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x)
{
  const double m = sample_mean(x);
  double ss = 0.0;
  for (double v : x)
    ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

ReturnSeries normalize(std::span<const double> x, std::string source_id)
{
  if (x.size() < 2)
    throw Error(ErrorCode::series_too_short, "normalization needs at least 2 values");
  const double m = sample_mean(x);
  const double s = sample_sd(x);
  if (!(s > 0.0) || !std::isfinite(s))
    throw Error(ErrorCode::zero_variance, "series has zero variance");
  ReturnSeries out;
  out.source_id = std::move(source_id);
  out.normalized = true;
  out.mean_removed = m;
  out.scale_applied = s;
  out.values.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out.values[i] = (x[i] - m) / s;
  return out;
}

ReturnSeries normalize(const ReturnSeries& series)
{
  return normalize(series.values, series.source_id);
}

double silverman_bandwidth(std::span<const double> x)
{
  if (x.size() < 2)
    throw Error(ErrorCode::series_too_short, "bandwidth rule needs at least 2 values");
  return 1.06 * sample_sd(x) * std::pow(static_cast<double>(x.size()), -0.2);
}

Grid kde_grid(std::span<const double> x, double bandwidth, std::size_t n, double pad)
{
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return Grid(*lo - pad * bandwidth, *hi + pad * bandwidth, n);
}

KdeResult kde_with_derivatives(const ReturnSeries& series, const KdeConfig& config)
{
  const auto& x = series.values;
  if (x.size() < min_kde_sample)
    throw Error(ErrorCode::series_too_short,
                "density estimation needs at least " + std::to_string(min_kde_sample) +
                  " values (got " + std::to_string(x.size()) + ")");
  double h = 0.0;
  if (config.bandwidth) {
    h = *config.bandwidth;
    if (!(h > 0.0) || !std::isfinite(h))
      throw Error(ErrorCode::invalid_params, "bandwidth must be > 0");
  } else {
    h = silverman_bandwidth(x);
    if (!(h > 0.0))
      throw Error(ErrorCode::zero_variance, "sample has zero variance");
  }

  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());

  const Grid& grid = config.grid;
  double outside = 0.0;
  for (double v : sorted)
    outside += normal_tail((v - grid.x_min()) / h) + normal_tail((grid.x_max() - v) / h);
  outside /= static_cast<double>(sorted.size());
  if (outside > 1e-3)
    throw Error(ErrorCode::grid_too_narrow,
                "grid [" + std::to_string(grid.x_min()) + ", " + std::to_string(grid.x_max()) +
                  "] excludes " + std::to_string(100.0 * outside) + "% of the kernel mass");

  const double n = static_cast<double>(sorted.size());
  std::vector<double> p(grid.size());
  std::vector<double> d2(grid.size());
  parallel_for(grid.size(), config.threads, [&](std::size_t i) {
    const double xi = grid[i];
    const auto first = std::lower_bound(sorted.begin(), sorted.end(), xi - kKernelReach * h);
    const auto last = std::upper_bound(first, sorted.end(), xi + kKernelReach * h);
    double s0 = 0.0;
    double s2 = 0.0;
    for (auto it = first; it != last; ++it) {
      const double z = (xi - *it) / h;
      const double k = std::exp(-0.5 * z * z);
      s0 += k;
      s2 += k * (z * z - 1.0);
    }
    p[i] = kInvSqrt2Pi * s0 / (n * h);
    d2[i] = kInvSqrt2Pi * s2 / (n * h * h * h);
  });
  return {GridFunction(grid, std::move(p)), GridFunction(grid, std::move(d2)), h};
}

GridFunction kde(const ReturnSeries& series, const KdeConfig& config)
{
  return kde_with_derivatives(series, config).density;
}

QuantumPotentialCurve empirical_quantum_potential(const ReturnSeries& series,
                                                  const KdeConfig& config,
                                                  double p_floor)
{
  if (!(p_floor > 0.0))
    throw Error(ErrorCode::invalid_params, "p_floor must be > 0");
  const auto est = kde_with_derivatives(series, config);
  const std::size_t n = est.density.size();
  std::vector<double> u(n, 0.0);
  std::vector<bool> mask(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = est.density[i];
    if (!(p >= p_floor)) {
      mask[i] = true;
      continue;
    }
    u[i] = est.second_derivative[i] / p;
  }
  return {GridFunction(config.grid, std::move(u)), CascadeParams{}, std::move(mask)};
}

} // namespace mfqp
