#pragma once

#include "mfqp/cascade.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace mfqp {

inline constexpr std::size_t min_fit_sample = 64;
//! Largest tolerated fraction of sample points whose density underflows.
inline constexpr double max_masked_fraction = 1e-3;

//! ln P(|x|) tabulated on a uniform mesh over [0, x_max] and interpolated
//! with quintic Hermite polynomials built from ln P and its first two
//! derivatives. Cells touching an underflowed node fall back to direct
//! evaluation.
class CastaingLogDensityTable
{
public:
  CastaingLogDensityTable(const CascadeParams& params, double x_max);

  //! ln P(x); -infinity where P < p_floor.
  double operator()(double x) const;

  double spacing() const noexcept { return h_; }
  std::size_t size() const noexcept { return f_.size(); }

private:
  CastaingKernel kernel_;
  double h_ = 0.0;
  std::vector<double> f_, f1_, f2_;
  std::vector<bool> valid_;
};

struct LikelihoodValue
{
  double nll = 0.0;        //!< masked points contribute -ln(p_floor) each
  std::size_t masked = 0;  //!< points with P < p_floor
};

//! -sum ln P(x_i). Throws Error(series_too_short) below 64 points and
//! Error(underflow) when more than 0.1% of points underflow.
LikelihoodValue negative_log_likelihood(std::span<const double> sample,
                                        const CascadeParams& params);

struct FitOptions
{
  std::size_t max_iterations = 2000;
  double diameter_tol = 1e-6;  //!< simplex size in (ln sigma0, lambda)
  double nll_tol = 1e-10;      //!< spread of the per-point mean NLL over the simplex
  double initial_step = 0.1;
  std::size_t max_restarts = 3;
};

struct FitReport
{
  double lambda_hat = 0.0;
  double sigma0_hat = 0.0;
  double nll = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  std::size_t restarts = 0;
  bool converged = false;
  std::array<double, 2> std_error{}; //!< (lambda, sigma0), observed information
};

//! Maximum likelihood over (lambda >= 0, sigma0 > 0): Nelder-Mead in
//! (ln sigma0, lambda) with lambda reflected at zero, restarted from the best
//! vertex until a restart no longer moves it.
FitReport fit_castaing(std::span<const double> sample,
                       const CascadeParams& init,
                       const FitOptions& options = {});

} // namespace mfqp
