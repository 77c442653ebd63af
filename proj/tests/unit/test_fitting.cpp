#include "mfqp/cascade.hpp"
#include "mfqp/error.hpp"
#include "mfqp/fitting.hpp"
#include "mfqp/numerics/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace mfqp;

namespace {

ErrorCode code_of(auto fn)
{
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::io_error;
}

double gaussian_nll_closed_form(std::span<const double> x, double sigma)
{
  double ss = 0.0;
  for (double v : x)
    ss += v * v;
  const double n = static_cast<double>(x.size());
  return 0.5 * n * std::log(2.0 * std::numbers::pi) + n * std::log(sigma) + ss / (2.0 * sigma * sigma);
}

} // namespace

TEST_SUITE("likelihood")
{
  TEST_CASE("gaussian case matches the closed form")
  {
    const auto x = gaussian_stream({3, 1}, 500);
    for (double sigma : {0.5, 1.0, 1.7}) {
      const auto v = negative_log_likelihood(x, {0.0, sigma});
      CHECK(v.nll == doctest::Approx(gaussian_nll_closed_form(x, sigma)).epsilon(1e-13));
      CHECK(v.masked == 0);
    }
  }

  TEST_CASE("true parameters beat a variance-matched gaussian")
  {
    const double lambda = 0.5;
    const auto x = castaing_sample({lambda, 1.0}, 20000, {9, 0});
    const double matched_sigma = std::exp(lambda * lambda);
    const auto truth = negative_log_likelihood(x, {lambda, 1.0});
    const auto gauss = negative_log_likelihood(x, {0.0, matched_sigma});
    CHECK(truth.nll < gauss.nll);
  }

  TEST_CASE("small-lambda likelihood approaches the gaussian one")
  {
    const auto x = gaussian_stream({3, 2}, 1000);
    const double g = negative_log_likelihood(x, {0.0, 1.2}).nll;
    const double near = negative_log_likelihood(x, {1e-4, 1.2}).nll;
    CHECK(std::abs(near - g) <= 1e-4 * std::abs(g));
  }

  TEST_CASE("argument errors")
  {
    const auto tiny = gaussian_stream({3, 3}, 63);
    CHECK(code_of([&] { negative_log_likelihood(tiny, {0.3, 1.0}); }) == ErrorCode::series_too_short);
    auto bad = gaussian_stream({3, 3}, 100);
    bad[7] = std::numeric_limits<double>::quiet_NaN();
    CHECK(code_of([&] { negative_log_likelihood(bad, {0.3, 1.0}); }) == ErrorCode::invalid_params);
    const auto ok = gaussian_stream({3, 3}, 100);
    CHECK(code_of([&] { negative_log_likelihood(ok, {-0.1, 1.0}); }) == ErrorCode::invalid_params);
  }

  TEST_CASE("too many underflowed points")
  {
    auto x = gaussian_stream({3, 4}, 1000);
    for (std::size_t i = 0; i < 5; ++i)
      x[i] = 1e3;
    CHECK(code_of([&] { negative_log_likelihood(x, {0.05, 1.0}); }) == ErrorCode::underflow);
  }

  TEST_CASE("tabulated log density matches direct evaluation")
  {
    for (double lambda : {0.1, 0.3, 0.5, 0.9}) {
      for (double sigma0 : {0.4, 1.0}) {
        const CascadeParams params{lambda, sigma0};
        const CastaingKernel kernel(params);
        const double x_max = 12.0 * params.effective_sigma();
        const CastaingLogDensityTable table(params, x_max);
        double worst = 0.0;
        for (int k = 0; k <= 4000; ++k) {
          // off-mesh points, both signs
          const double x = (k % 2 == 0 ? 1.0 : -1.0) * x_max * (k + 0.37) / 4001.0;
          const double p = kernel.density(x);
          if (!(p >= default_p_floor))
            continue;
          worst = std::max(worst, std::abs(table(x) - std::log(p)));
        }
        INFO("lambda " << lambda << " sigma0 " << sigma0);
        CHECK(worst < 1e-8);
      }
    }
  }
}

TEST_SUITE("fit_castaing")
{
  TEST_CASE("recovers lambda 0.5")
  {
    const auto x = castaing_sample({0.5, 1.0}, 100000, {5, 1});
    const auto r = fit_castaing(x, {0.3, 1.0});
    CHECK(r.converged);
    CHECK(std::abs(r.lambda_hat - 0.5) <= 0.03);
    CHECK(std::abs(r.sigma0_hat - 1.0) <= 0.03);
    CHECK(r.std_error[0] > 0.0);
    CHECK(r.std_error[1] > 0.0);
  }

  TEST_CASE("gaussian data gives a small lambda")
  {
    const auto x = gaussian_stream({6, 1}, 100000);
    const auto r = fit_castaing(x, {0.3, 1.0});
    CHECK(r.converged);
    CHECK(r.lambda_hat <= 0.05);
    CHECK(r.lambda_hat >= 0.0);
  }

  TEST_CASE("at lambda zero the likelihood gives the gaussian sigma estimate")
  {
    const auto x = gaussian_stream({6, 2}, 5000);
    double ss = 0.0;
    for (double v : x)
      ss += v * v;
    const double mle = std::sqrt(ss / static_cast<double>(x.size()));
    // the Gaussian MLE is a stationary point along sigma0 at lambda = 0
    const double h = 1e-4;
    const double up = negative_log_likelihood(x, {0.0, mle * (1 + h)}).nll;
    const double down = negative_log_likelihood(x, {0.0, mle * (1 - h)}).nll;
    const double mid = negative_log_likelihood(x, {0.0, mle}).nll;
    CHECK(mid < up);
    CHECK(mid < down);
    const double slope = (up - down) / (2 * h * mle);
    const double curvature = (up - 2 * mid + down) / (h * mle * h * mle);
    CHECK(std::abs(slope / curvature) <= 1e-6 * mle);
  }

  TEST_CASE("permutation invariance")
  {
    auto x = castaing_sample({0.4, 0.8}, 5000, {7, 3});
    const auto a = fit_castaing(x, {0.2, 1.0});
    std::reverse(x.begin(), x.end());
    std::rotate(x.begin(), x.begin() + 777, x.end());
    const auto b = fit_castaing(x, {0.2, 1.0});
    CHECK(b.lambda_hat == doctest::Approx(a.lambda_hat).epsilon(1e-6));
    CHECK(b.sigma0_hat == doctest::Approx(a.sigma0_hat).epsilon(1e-6));
    CHECK(b.nll == doctest::Approx(a.nll).epsilon(1e-10));
  }

  TEST_CASE("different starting points agree")
  {
    const auto x = castaing_sample({0.35, 1.3}, 20000, {8, 0});
    const auto a = fit_castaing(x, {0.1, 1.0});
    const auto b = fit_castaing(x, {0.8, 2.5});
    CHECK(a.converged);
    CHECK(b.converged);
    CHECK(std::abs(a.lambda_hat - b.lambda_hat) <= 1e-4);
    CHECK(std::abs(a.sigma0_hat - b.sigma0_hat) <= 1e-4 * a.sigma0_hat);
  }

  TEST_CASE("invalid inputs")
  {
    const auto tiny = gaussian_stream({1, 1}, 10);
    CHECK(code_of([&] { fit_castaing(tiny, {0.3, 1.0}); }) == ErrorCode::series_too_short);
    const auto x = gaussian_stream({1, 1}, 1000);
    CHECK(code_of([&] { fit_castaing(x, {0.3, -1.0}); }) == ErrorCode::invalid_params);
  }
}
