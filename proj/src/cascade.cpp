#include "mfqp/cascade.hpp"

#include "mfqp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace mfqp {

namespace {

constexpr std::size_t kMinPanels = 16;
constexpr double kMaxPanelWidth = 0.5;
constexpr std::size_t kNodesPerPanel = 16;
constexpr double kAdaptiveTol = 1e-13;

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

// Gaussian density and derivatives in x for one mixture component.
CastaingValue gaussian_terms(double x, double sigma)
{
  const double z = x / sigma;
  const double p = kInvSqrt2Pi / sigma * std::exp(-0.5 * z * z);
  return {p, -p * z / sigma, p * (z * z - 1.0) / (sigma * sigma)};
}

} // namespace

void CascadeParams::validate() const
{
  if (!std::isfinite(lambda) || lambda < 0.0)
    throw Error(ErrorCode::invalid_params,
                "lambda must be finite and >= 0 (got " + std::to_string(lambda) + ")");
  if (!std::isfinite(sigma0) || !(sigma0 > 0.0))
    throw Error(ErrorCode::invalid_params,
                "sigma0 must be finite and > 0 (got " + std::to_string(sigma0) + ")");
}

double CascadeParams::effective_sigma() const
{
  return sigma0 * std::exp(lambda * lambda);
}

bool covers_effective_range(const CascadeParams& params, const Grid& grid)
{
  const double half = 6.0 * params.effective_sigma();
  return grid.x_min() <= -half && grid.x_max() >= half;
}

CastaingKernel::CastaingKernel(CascadeParams params)
  : params_(params)
{
  params_.validate();
  if (params_.lambda == 0.0)
    return;
  panels_ = std::max(kMinPanels,
                     static_cast<std::size_t>(std::ceil(2.0 * truncation() / kMaxPanelWidth)));
  rule_ = gaussian_weight_rule(params_.lambda, truncation(), panels_, kNodesPerPanel);
  inv_sigma_.resize(rule_.size());
  node_weight_.resize(rule_.size());
  for (std::size_t i = 0; i < rule_.size(); ++i) {
    const double sigma = params_.sigma0 * std::exp(rule_.nodes[i]);
    inv_sigma_[i] = 1.0 / sigma;
    node_weight_[i] = rule_.weights[i] * kInvSqrt2Pi / sigma;
  }
}

bool CastaingKernel::needs_adaptive(double x) const
{
  const double lam = params_.lambda;
  if (lam == 0.0)
    return false;
  const double a = (x / params_.sigma0) * (x / params_.sigma0);
  const double lam2 = lam * lam;
  // log-integrand g(u) = -u^2/(2 lam^2) - u - a e^{-2u}/2 is strictly concave;
  // g' is convex and decreasing, so Newton from the left converges monotonically
  auto slope = [&](double u) { return -u / lam2 - 1.0 + a * std::exp(-2.0 * u); };
  const double panel = 2.0 * truncation() / static_cast<double>(panels_);
  const double edge = truncation() - 0.5 * panel;
  if (slope(edge) > 0.0)
    return true;
  double u = -lam2;
  for (int it = 0; it < 200; ++it) {
    const double g1 = slope(u);
    const double g2 = -1.0 / lam2 - 2.0 * a * std::exp(-2.0 * u);
    const double step = g1 / g2;
    u -= step;
    if (std::abs(step) < 1e-12 * (1.0 + std::abs(u)))
      break;
  }
  const double curvature = 1.0 / lam2 + 2.0 * a * std::exp(-2.0 * u);
  const double width = 1.0 / std::sqrt(curvature);
  return width < 0.25 * panel;
}

CastaingValue CastaingKernel::evaluate_fixed(double x) const
{
  CastaingValue v;
  for (std::size_t i = 0; i < node_weight_.size(); ++i) {
    const double z = x * inv_sigma_[i];
    const double base = node_weight_[i] * std::exp(-0.5 * z * z);
    const double is = inv_sigma_[i];
    v.p += base;
    v.d1 -= base * z * is;
    v.d2 += base * (z * z - 1.0) * is * is;
  }
  return v;
}

CastaingValue CastaingKernel::evaluate_adaptive(double x) const
{
  const double lam = params_.lambda;
  const double s0 = params_.sigma0;
  const double norm = kInvSqrt2Pi / lam;
  auto weight = [&](double u) { return norm * std::exp(-0.5 * (u / lam) * (u / lam)); };
  const double lo = -truncation();
  const double hi = truncation();
  CastaingValue v;
  v.p = integrate_adaptive(
          [&](double u) { return weight(u) * gaussian_terms(x, s0 * std::exp(u)).p; },
          lo, hi, kAdaptiveTol)
          .value;
  v.d1 = integrate_adaptive(
           [&](double u) { return weight(u) * gaussian_terms(x, s0 * std::exp(u)).d1; },
           lo, hi, kAdaptiveTol)
           .value;
  v.d2 = integrate_adaptive(
           [&](double u) { return weight(u) * gaussian_terms(x, s0 * std::exp(u)).d2; },
           lo, hi, kAdaptiveTol)
           .value;
  return v;
}

CastaingValue CastaingKernel::evaluate(double x) const
{
  if (params_.lambda == 0.0)
    return gaussian_terms(x, params_.sigma0);
  return needs_adaptive(x) ? evaluate_adaptive(x) : evaluate_fixed(x);
}

double CastaingKernel::density(double x) const
{
  return evaluate(x).p;
}

GridFunction castaing_pdf(const CascadeParams& params, const Grid& grid)
{
  const CastaingKernel kernel(params);
  std::vector<double> p(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    p[i] = kernel.density(grid[i]);
  return GridFunction(grid, std::move(p));
}

GridFunction castaing_pdf_second_derivative(const CascadeParams& params,
                                            const Grid& grid)
{
  const CastaingKernel kernel(params);
  std::vector<double> d2(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    d2[i] = kernel.evaluate(grid[i]).d2;
  return GridFunction(grid, std::move(d2));
}

QuantumPotentialCurve quantum_potential(const CascadeParams& params,
                                        const Grid& grid,
                                        double p_floor)
{
  if (!(p_floor > 0.0))
    throw Error(ErrorCode::invalid_params, "p_floor must be > 0");
  const CastaingKernel kernel(params);
  std::vector<double> u(grid.size(), 0.0);
  std::vector<bool> mask(grid.size(), false);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto v = kernel.evaluate(grid[i]);
    if (!(v.p >= p_floor)) {
      mask[i] = true;
      continue;
    }
    u[i] = v.d2 / v.p;
  }
  return {GridFunction(grid, std::move(u)), kernel.params(), std::move(mask)};
}

std::vector<std::size_t> potential_local_maxima(const QuantumPotentialCurve& curve,
                                                double x_above)
{
  const auto& grid = curve.potential.grid;
  const auto& u = curve.potential.values;
  const auto& mask = curve.floor_mask;
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < u.size(); ++i) {
    if (grid[i] <= x_above || mask[i - 1] || mask[i] || mask[i + 1])
      continue;
    if (u[i] > u[i - 1] && u[i] > u[i + 1])
      out.push_back(i);
  }
  return out;
}

std::vector<double> castaing_sample(const CascadeParams& params,
                                    std::size_t count,
                                    const RandomStream& rs)
{
  params.validate();
  const auto z = gaussian_stream(rs, 2 * count);
  std::vector<double> x(count);
  for (std::size_t i = 0; i < count; ++i)
    x[i] = params.sigma0 * std::exp(params.lambda * z[2 * i]) * z[2 * i + 1];
  return x;
}

} // namespace mfqp
