#pragma once

#include "mfqp/numerics/random.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace mfqp {

//! Multifractal random walk configuration.
struct MrwParams
{
  double lambda = 0.3;
  double hurst = 0.6;
  std::size_t corr_length = 2000; //!< L, in samples
  std::size_t n_steps = 100000;   //!< N
  double sigma0 = 1.0;
  std::uint64_t seed = 0;

  //! Throws Error(invalid_params) when any invariant is violated.
  void validate() const;
};

//! A synthesized trajectory: cumulative[0] = 0 and
//! cumulative[k+1] = cumulative[k] + increments[k].
struct Path
{
  std::vector<double> increments;
  std::vector<double> cumulative;
  MrwParams params;
};

//! Autocovariance of fractional Gaussian noise at lag k.
double fgn_autocovariance(double hurst, double sigma, std::size_t k);

//! Fractional Gaussian noise with Hurst exponent `hurst`, exact via
//! circulant embedding.
std::vector<double> fgn(double hurst, std::size_t n, double sigma, const RandomStream& rs);

//! Covariance of the log-correlated field: lambda^2 ln(L/(k+1)) for k < L,
//! zero beyond.
double log_correlated_covariance(double lambda, std::size_t corr_length, std::size_t k);

//! Stationary Gaussian omega with the covariance above and mean
//! -lambda^2 ln L, so that E[exp(2 omega)] = 1.
std::vector<double> log_correlated_field(double lambda,
                                         std::size_t corr_length,
                                         std::size_t n,
                                         const RandomStream& rs);

//! increments[k] = eps[k] * exp(omega[k]); eps is fGn(H, sigma0) on stream
//! (seed, 0), omega the log-correlated field on stream (seed, 1).
Path synthesize(const MrwParams& params);

} // namespace mfqp
