#include "mfqp/mrw.hpp"

#include "mfqp/error.hpp"
#include "mfqp/numerics/circulant.hpp"

#include <cmath>
#include <string>

namespace mfqp {

void MrwParams::validate() const
{
  if (!std::isfinite(lambda) || lambda < 0.0)
    throw Error(ErrorCode::invalid_params, "lambda must be >= 0");
  if (!(hurst > 0.0 && hurst < 1.0))
    throw Error(ErrorCode::invalid_params,
                "hurst must lie in (0, 1) (got " + std::to_string(hurst) + ")");
  if (corr_length < 2)
    throw Error(ErrorCode::invalid_params, "correlation length must be >= 2");
  if (n_steps < corr_length)
    throw Error(ErrorCode::invalid_params,
                "n_steps (" + std::to_string(n_steps) +
                  ") must be >= correlation length (" + std::to_string(corr_length) + ")");
  if (!std::isfinite(sigma0) || !(sigma0 > 0.0))
    throw Error(ErrorCode::invalid_params, "sigma0 must be > 0");
}

double fgn_autocovariance(double hurst, double sigma, std::size_t k)
{
  const double two_h = 2.0 * hurst;
  const double kk = static_cast<double>(k);
  const double prev = k == 0 ? 1.0 : std::pow(kk - 1.0, two_h);
  return 0.5 * sigma * sigma *
         (std::pow(kk + 1.0, two_h) - 2.0 * std::pow(kk, two_h) + prev);
}

std::vector<double> fgn(double hurst, std::size_t n, double sigma, const RandomStream& rs)
{
  if (!(hurst > 0.0 && hurst < 1.0))
    throw Error(ErrorCode::invalid_params, "hurst must lie in (0, 1)");
  if (n < 2)
    throw Error(ErrorCode::invalid_params, "fgn needs n >= 2");
  if (hurst == 0.5) {
    auto out = gaussian_stream(rs, n);
    for (auto& v : out)
      v *= sigma;
    return out;
  }
  const auto emb = embed_covariance(
    [=](std::size_t k) { return fgn_autocovariance(hurst, sigma, k); }, n);
  return sample_circulant(emb, rs);
}

double log_correlated_covariance(double lambda, std::size_t corr_length, std::size_t k)
{
  if (k >= corr_length)
    return 0.0;
  return lambda * lambda *
         std::log(static_cast<double>(corr_length) / static_cast<double>(k + 1));
}

std::vector<double> log_correlated_field(double lambda,
                                         std::size_t corr_length,
                                         std::size_t n,
                                         const RandomStream& rs)
{
  if (!std::isfinite(lambda) || lambda < 0.0)
    throw Error(ErrorCode::invalid_params, "lambda must be >= 0");
  if (corr_length < 1 || n < corr_length)
    throw Error(ErrorCode::invalid_params, "log-correlated field needs n >= L");
  if (lambda == 0.0)
    return std::vector<double>(n, 0.0);

  const auto emb = embed_covariance(
    [=](std::size_t k) { return log_correlated_covariance(lambda, corr_length, k); },
    std::max<std::size_t>(n, 2));
  auto omega = sample_circulant(emb, rs);
  const double mean = -log_correlated_covariance(lambda, corr_length, 0);
  for (auto& w : omega)
    w += mean;
  omega.resize(n);
  return omega;
}

Path synthesize(const MrwParams& params)
{
  params.validate();
  const RandomStream eps_stream{params.seed, 0};
  const RandomStream omega_stream{params.seed, 1};
  const std::size_t n = params.n_steps;

  const auto eps = fgn(params.hurst, n, params.sigma0, eps_stream);
  const auto omega = log_correlated_field(params.lambda, params.corr_length, n, omega_stream);

  Path path;
  path.params = params;
  path.increments.resize(n);
  path.cumulative.resize(n + 1);
  path.cumulative[0] = 0.0;
  // increments are re-read from the rounded walk so that differencing the
  // cumulative series reproduces them bit for bit
  for (std::size_t k = 0; k < n; ++k) {
    path.cumulative[k + 1] = path.cumulative[k] + eps[k] * std::exp(omega[k]);
    path.increments[k] = path.cumulative[k + 1] - path.cumulative[k];
  }
  return path;
}

} // namespace mfqp
