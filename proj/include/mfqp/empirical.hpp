#pragma once

#include "mfqp/cascade.hpp"
#include "mfqp/numerics/grid.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mfqp {

//! A return sample with provenance. When `normalized`, values have been
//! shifted by mean_removed and divided by scale_applied.
struct ReturnSeries
{
  std::vector<double> values;
  std::string source_id;
  bool normalized = false;
  double mean_removed = 0.0;
  double scale_applied = 1.0;
};

double sample_mean(std::span<const double> x);
//! Standard deviation with the n - 1 denominator.
double sample_sd(std::span<const double> x);

//! Subtract the sample mean, divide by the sample standard deviation.
//! Throws Error(series_too_short) for n < 2, Error(zero_variance) for
//! constant input.
ReturnSeries normalize(std::span<const double> x, std::string source_id = {});
ReturnSeries normalize(const ReturnSeries& series);

inline constexpr std::size_t min_kde_sample = 64;

struct KdeConfig
{
  std::optional<double> bandwidth; //!< empty selects Silverman's rule
  Grid grid;
  unsigned threads = 1;
};

//! 1.06 * s * n^(-1/5).
double silverman_bandwidth(std::span<const double> x);

//! Grid spanning [min - pad * h, max + pad * h] for the given bandwidth.
Grid kde_grid(std::span<const double> x, double bandwidth, std::size_t n, double pad = 4.0);

//! Gaussian kernel density estimate and its analytic derivatives on a grid.
struct KdeResult
{
  GridFunction density;
  GridFunction second_derivative;
  double bandwidth;
};

//! Throws Error(series_too_short) below 64 points, Error(grid_too_narrow)
//! when more than 0.1% of the kernel mass falls outside the grid.
KdeResult kde_with_derivatives(const ReturnSeries& series, const KdeConfig& config);

GridFunction kde(const ReturnSeries& series, const KdeConfig& config);

//! U = P''/P from the kernel sums, masked below p_floor. `params` of the
//! returned curve is left at its defaults; it describes no cascade.
QuantumPotentialCurve empirical_quantum_potential(const ReturnSeries& series,
                                                  const KdeConfig& config,
                                                  double p_floor = default_p_floor);

} // namespace mfqp
