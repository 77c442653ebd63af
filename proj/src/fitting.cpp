#include "mfqp/fitting.hpp"

#include "mfqp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace mfqp {

namespace {

const double kLogFloor = std::log(default_p_floor);
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

// mesh step as a fraction of the central curvature length sigma0 e^{-2 lambda^2}
constexpr double kMeshFraction = 0.05;

struct LogDerivs
{
  double f = 0.0, f1 = 0.0, f2 = 0.0;
  bool valid = false;
};

LogDerivs log_derivatives(const CastaingKernel& kernel, double x)
{
  const auto v = kernel.evaluate(x);
  if (!(v.p >= default_p_floor))
    return {};
  const double r1 = v.d1 / v.p;
  return {std::log(v.p), r1, v.d2 / v.p - r1 * r1, true};
}

void check_sample(std::span<const double> sample)
{
  if (sample.size() < min_fit_sample)
    throw Error(ErrorCode::series_too_short,
                "likelihood needs at least " + std::to_string(min_fit_sample) +
                  " points (got " + std::to_string(sample.size()) + ")");
  for (double v : sample) {
    if (!std::isfinite(v))
      throw Error(ErrorCode::invalid_params, "sample contains a non-finite value");
  }
}

double max_abs(std::span<const double> sample)
{
  double m = 0.0;
  for (double v : sample)
    m = std::max(m, std::abs(v));
  return m;
}

LikelihoodValue gaussian_nll(std::span<const double> sample, double sigma0)
{
  LikelihoodValue out;
  const double log_s = std::log(sigma0);
  for (double x : sample) {
    const double z = x / sigma0;
    out.nll += kHalfLog2Pi + log_s + 0.5 * z * z;
  }
  return out;
}

LikelihoodValue evaluate_nll(std::span<const double> sample,
                             const CascadeParams& params,
                             double x_max)
{
  if (params.lambda == 0.0)
    return gaussian_nll(sample, params.sigma0);
  const CastaingLogDensityTable table(params, x_max);
  LikelihoodValue out;
  for (double x : sample) {
    const double lp = table(x);
    if (lp == -std::numeric_limits<double>::infinity()) {
      ++out.masked;
      out.nll -= kLogFloor;
    } else {
      out.nll -= lp;
    }
  }
  return out;
}

bool too_many_masked(const LikelihoodValue& v, std::size_t n)
{
  return static_cast<double>(v.masked) > max_masked_fraction * static_cast<double>(n);
}

} // namespace

CastaingLogDensityTable::CastaingLogDensityTable(const CascadeParams& params, double x_max)
  : kernel_(params)
{
  const double lam2 = params.lambda * params.lambda;
  h_ = kMeshFraction * params.sigma0 * std::exp(-2.0 * lam2);
  const auto cells = static_cast<std::size_t>(std::ceil(std::max(x_max, h_) / h_));
  const std::size_t nodes = cells + 1;
  f_.resize(nodes);
  f1_.resize(nodes);
  f2_.resize(nodes);
  valid_.resize(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    const auto d = log_derivatives(kernel_, h_ * static_cast<double>(i));
    f_[i] = d.f;
    f1_[i] = d.f1;
    f2_[i] = d.f2;
    valid_[i] = d.valid;
  }
}

double CastaingLogDensityTable::operator()(double x) const
{
  const double ax = std::abs(x);
  const double pos = ax / h_;
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= f_.size() || !valid_[i] || !valid_[i + 1]) {
    const auto d = log_derivatives(kernel_, ax);
    return d.valid ? d.f : -std::numeric_limits<double>::infinity();
  }
  const double t = pos - static_cast<double>(i);
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double t4 = t3 * t;
  const double t5 = t4 * t;
  const double h = h_;
  const double b0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
  const double b1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
  const double b2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
  const double b3 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
  const double b4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
  const double b5 = 0.5 * t3 - t4 + 0.5 * t5;
  return f_[i] * b0 + h * f1_[i] * b1 + h * h * f2_[i] * b2 + f_[i + 1] * b3 +
         h * f1_[i + 1] * b4 + h * h * f2_[i + 1] * b5;
}

LikelihoodValue negative_log_likelihood(std::span<const double> sample,
                                        const CascadeParams& params)
{
  check_sample(sample);
  params.validate();
  auto v = evaluate_nll(sample, params, max_abs(sample));
  if (too_many_masked(v, sample.size()))
    throw Error(ErrorCode::underflow,
                std::to_string(v.masked) + " of " + std::to_string(sample.size()) +
                  " points have a density below the evaluation floor");
  return v;
}

namespace {

struct Vertex
{
  std::array<double, 2> y; // (ln sigma0, lambda)
  double f;
};

class Objective
{
public:
  Objective(std::span<const double> sample)
    : sample_(sample)
    , x_max_(max_abs(sample))
  {}

  // per-point mean NLL; +inf when too many points underflow
  double operator()(const std::array<double, 2>& y)
  {
    ++evaluations;
    const CascadeParams p{std::abs(y[1]), std::exp(y[0])};
    if (!std::isfinite(p.sigma0) || !(p.sigma0 > 0.0) || !std::isfinite(p.lambda))
      return std::numeric_limits<double>::infinity();
    const auto v = evaluate_nll(sample_, p, x_max_);
    if (too_many_masked(v, sample_.size()))
      return std::numeric_limits<double>::infinity();
    return v.nll / static_cast<double>(sample_.size());
  }

  std::size_t evaluations = 0;

private:
  std::span<const double> sample_;
  double x_max_;
};

double diameter(const std::array<Vertex, 3>& s)
{
  double d = 0.0;
  for (int i = 1; i < 3; ++i)
    d = std::max(d, std::hypot(s[i].y[0] - s[0].y[0], s[i].y[1] - s[0].y[1]));
  return d;
}

struct SimplexOutcome
{
  Vertex best;
  std::size_t iterations;
  bool converged;
};

SimplexOutcome nelder_mead(Objective& f,
                           const std::array<double, 2>& start,
                           const FitOptions& opt,
                           std::size_t budget)
{
  std::array<Vertex, 3> s;
  s[0] = {start, f(start)};
  s[1] = {{start[0] + opt.initial_step, start[1]}, 0.0};
  s[2] = {{start[0], start[1] + opt.initial_step}, 0.0};
  s[1].f = f(s[1].y);
  s[2].f = f(s[2].y);

  auto order = [&] {
    std::sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
  };
  auto point = [](const std::array<double, 2>& c, const std::array<double, 2>& w, double t) {
    return std::array<double, 2>{c[0] + t * (w[0] - c[0]), c[1] + t * (w[1] - c[1])};
  };

  std::size_t it = 0;
  order();
  while (it < budget) {
    if (diameter(s) < opt.diameter_tol && s[2].f - s[0].f < opt.nll_tol)
      return {s[0], it, true};
    ++it;
    const std::array<double, 2> c{0.5 * (s[0].y[0] + s[1].y[0]), 0.5 * (s[0].y[1] + s[1].y[1])};
    const auto yr = point(c, s[2].y, -1.0);
    const double fr = f(yr);
    if (fr < s[0].f) {
      const auto ye = point(c, s[2].y, -2.0);
      const double fe = f(ye);
      s[2] = fe < fr ? Vertex{ye, fe} : Vertex{yr, fr};
    } else if (fr < s[1].f) {
      s[2] = {yr, fr};
    } else {
      const bool outside = fr < s[2].f;
      const auto yc = point(c, outside ? yr : s[2].y, 0.5);
      const double fc = f(yc);
      if (fc < (outside ? fr : s[2].f)) {
        s[2] = {yc, fc};
      } else {
        for (int i = 1; i < 3; ++i) {
          s[i].y = point(s[0].y, s[i].y, 0.5);
          s[i].f = f(s[i].y);
        }
      }
    }
    order();
  }
  return {s[0], it, false};
}

// Hessian of the total NLL in (lambda, sigma0) by central differences.
std::array<double, 2> observed_information_stderr(std::span<const double> sample,
                                                  double lambda,
                                                  double sigma0)
{
  const double x_max = max_abs(sample);
  auto nll = [&](double l, double s) {
    return evaluate_nll(sample, CascadeParams{std::abs(l), s}, x_max).nll;
  };
  const double hl = 1e-3;
  const double hs = 1e-3 * sigma0;
  const double f0 = nll(lambda, sigma0);
  const double fll = (nll(lambda + hl, sigma0) - 2.0 * f0 + nll(lambda - hl, sigma0)) / (hl * hl);
  const double fss = (nll(lambda, sigma0 + hs) - 2.0 * f0 + nll(lambda, sigma0 - hs)) / (hs * hs);
  const double fls = (nll(lambda + hl, sigma0 + hs) - nll(lambda + hl, sigma0 - hs) -
                      nll(lambda - hl, sigma0 + hs) + nll(lambda - hl, sigma0 - hs)) /
                     (4.0 * hl * hs);
  const double det = fll * fss - fls * fls;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (!(det > 0.0) || !(fll > 0.0))
    return {nan, nan};
  return {std::sqrt(fss / det), std::sqrt(fll / det)};
}

} // namespace

FitReport fit_castaing(std::span<const double> sample,
                       const CascadeParams& init,
                       const FitOptions& options)
{
  check_sample(sample);
  init.validate();

  Objective objective(sample);
  FitReport report;
  std::array<double, 2> start{std::log(init.sigma0), init.lambda};
  Vertex best{start, std::numeric_limits<double>::infinity()};

  for (std::size_t round = 0; round <= options.max_restarts; ++round) {
    const std::size_t budget = options.max_iterations - std::min(options.max_iterations, report.iterations);
    if (budget == 0)
      break;
    const auto outcome = nelder_mead(objective, start, options, budget);
    report.iterations += outcome.iterations;
    const bool moved =
      std::hypot(outcome.best.y[0] - best.y[0], outcome.best.y[1] - best.y[1]) >= options.diameter_tol;
    const bool improved = outcome.best.f < best.f - options.nll_tol;
    if (outcome.best.f < best.f)
      best = outcome.best;
    if (round > 0)
      ++report.restarts;
    if (!outcome.converged) {
      report.converged = false;
      break;
    }
    report.converged = true;
    if (round > 0 && !moved && !improved)
      break;
    start = best.y;
    if (round == options.max_restarts)
      break;
  }

  report.lambda_hat = std::abs(best.y[1]);
  report.sigma0_hat = std::exp(best.y[0]);
  report.nll = best.f * static_cast<double>(sample.size());
  report.evaluations = objective.evaluations;
  report.std_error = observed_information_stderr(sample, report.lambda_hat, report.sigma0_hat);
  return report;
}

} // namespace mfqp
