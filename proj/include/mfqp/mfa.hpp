#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace mfqp {

//! x[k + tau] - x[k] for every k. Throws Error(lag_too_large) unless
//! 1 <= tau < x.size().
std::vector<double> increments(std::span<const double> x, std::size_t tau);

//! Empirical M(q, tau) = < |x[k+tau] - x[k]|^q >, overlapping increments.
struct StructureFunctionTable
{
  std::vector<double> qs;
  std::vector<std::size_t> taus;
  std::vector<std::vector<double>> m;              //!< m[i][j] = M(qs[i], taus[j])
  std::vector<std::vector<std::size_t>> n_samples; //!< increments used per cell
};

inline constexpr std::size_t min_increments_per_lag = 16;

//! Throws Error(insufficient_data) when some tau leaves fewer than 16
//! increments, Error(invalid_params) for q = 0 or unsorted/duplicate taus.
StructureFunctionTable structure_function(std::span<const double> x,
                                          std::span<const double> qs,
                                          std::span<const std::size_t> taus,
                                          unsigned threads = 1);

//! Sample-weighted average of tables with identical q and tau axes, i.e. the
//! structure function of an ensemble pooled over its members.
StructureFunctionTable pool_tables(std::span<const StructureFunctionTable> tables);

//! Default moment orders {0.5, 1, 1.5, 2, 2.5, 3, 4, 5}.
std::vector<double> default_qs();

//! About `count` log-spaced distinct integer lags in [tau_min, tau_max].
std::vector<std::size_t> log_spaced_taus(std::size_t tau_min,
                                         std::size_t tau_max,
                                         std::size_t count = 20);

//! Default lag window [8, n/64] for a series of n points.
std::pair<std::size_t, std::size_t> default_fit_range(std::size_t n);

struct XiEstimate
{
  double value = 0.0;
  double std_error = 0.0;
  double r_squared = 0.0;
};

using XiMap = std::map<double, XiEstimate>;

//! OLS of ln M against ln tau per q over lags inside fit_range (inclusive).
//! Throws Error(range_too_small) with fewer than 4 lags and
//! Error(nonpositive_moment) when an M in range is <= 0.
XiMap fit_xi(const StructureFunctionTable& table,
             std::pair<std::size_t, std::size_t> fit_range);

//! Log-normal scaling model: q H - q (q - 2) lambda^2 / 2.
double xi_model(double q, double hurst, double lambda);

struct HLambdaEstimate
{
  double hurst = 0.0;
  double lambda = 0.0;
  double lambda_squared = 0.0;            //!< raw fitted value, may be < 0
  std::array<double, 4> covariance{};     //!< of (H, lambda^2), row-major
  bool monofractal = false;               //!< lambda^2 fit <= 0
  bool weighted = true;                   //!< false when some std_error was unusable
};

//! Weighted least squares of xi_q on the model, linear in (H, lambda^2),
//! with weights 1/std_error^2. When any std_error is zero or non-finite all points
//! get unit weight. Needs >= 3 distinct q including one outside {0, 2};
//! Error(degenerate_design) otherwise.
HLambdaEstimate estimate_h_lambda(const XiMap& xi);

//! Fit outcome bundle.
struct ScalingFit
{
  XiMap xi;
  HLambdaEstimate params;
  std::pair<std::size_t, std::size_t> fit_range;
  bool hurst_out_of_range = false; //!< estimate outside (0, 1); reported, not clamped
};

ScalingFit fit_scaling(const StructureFunctionTable& table,
                       std::pair<std::size_t, std::size_t> fit_range);

} // namespace mfqp
