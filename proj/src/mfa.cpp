#include "mfqp/mfa.hpp"

#include "mfqp/error.hpp"
#include "mfqp/numerics/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace mfqp {

std::vector<double> increments(std::span<const double> x, std::size_t tau)
{
  if (tau < 1 || tau >= x.size())
    throw Error(ErrorCode::lag_too_large,
                "lag " + std::to_string(tau) + " needs more than " +
                  std::to_string(tau) + " points (have " + std::to_string(x.size()) + ")");
  std::vector<double> d(x.size() - tau);
  for (std::size_t k = 0; k < d.size(); ++k)
    d[k] = x[k + tau] - x[k];
  return d;
}

StructureFunctionTable structure_function(std::span<const double> x,
                                          std::span<const double> qs,
                                          std::span<const std::size_t> taus,
                                          unsigned threads)
{
  if (qs.empty() || taus.empty())
    throw Error(ErrorCode::invalid_params, "structure function needs q and tau values");
  for (double q : qs) {
    if (q == 0.0 || !std::isfinite(q))
      throw Error(ErrorCode::invalid_params, "moment orders must be finite and nonzero");
  }
  for (std::size_t j = 0; j < taus.size(); ++j) {
    if (taus[j] == 0 || (j > 0 && taus[j] <= taus[j - 1]))
      throw Error(ErrorCode::invalid_params, "lags must be positive and strictly increasing");
  }
  if (taus.back() >= x.size() || x.size() - taus.back() < min_increments_per_lag)
    throw Error(ErrorCode::insufficient_data,
                "lag " + std::to_string(taus.back()) + " leaves fewer than " +
                  std::to_string(min_increments_per_lag) + " increments in a series of " +
                  std::to_string(x.size()) + " points");

  StructureFunctionTable table;
  table.qs.assign(qs.begin(), qs.end());
  table.taus.assign(taus.begin(), taus.end());
  table.m.assign(qs.size(), std::vector<double>(taus.size(), 0.0));
  table.n_samples.assign(qs.size(), std::vector<std::size_t>(taus.size(), 0));

  parallel_for(taus.size(), threads, [&](std::size_t j) {
    const auto d = increments(x, taus[j]);
    std::vector<double> log_abs(d.size());
    bool has_zero = false;
    for (std::size_t k = 0; k < d.size(); ++k) {
      const double a = std::abs(d[k]);
      has_zero = has_zero || a == 0.0;
      log_abs[k] = a == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(a);
    }
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const double q = qs[i];
      if (q < 0.0 && has_zero)
        throw Error(ErrorCode::nonpositive_moment,
                    "negative moment order with a zero increment at lag " +
                      std::to_string(taus[j]));
      double sum = 0.0;
      for (double la : log_abs)
        sum += std::exp(q * la);
      table.m[i][j] = sum / static_cast<double>(d.size());
      table.n_samples[i][j] = d.size();
    }
  });
  return table;
}

StructureFunctionTable pool_tables(std::span<const StructureFunctionTable> tables)
{
  if (tables.empty())
    throw Error(ErrorCode::insufficient_data, "no tables to pool");
  StructureFunctionTable out = tables.front();
  for (std::size_t t = 1; t < tables.size(); ++t) {
    const auto& tb = tables[t];
    if (tb.qs != out.qs || tb.taus != out.taus)
      throw Error(ErrorCode::invalid_params, "pooled tables must share q and tau axes");
    for (std::size_t i = 0; i < out.qs.size(); ++i) {
      for (std::size_t j = 0; j < out.taus.size(); ++j) {
        const double n0 = static_cast<double>(out.n_samples[i][j]);
        const double n1 = static_cast<double>(tb.n_samples[i][j]);
        out.m[i][j] = (out.m[i][j] * n0 + tb.m[i][j] * n1) / (n0 + n1);
        out.n_samples[i][j] += tb.n_samples[i][j];
      }
    }
  }
  return out;
}

std::vector<double> default_qs()
{
  return {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0};
}

std::vector<std::size_t> log_spaced_taus(std::size_t tau_min,
                                         std::size_t tau_max,
                                         std::size_t count)
{
  if (tau_min < 1 || tau_max < tau_min)
    throw Error(ErrorCode::invalid_range, "lag range must satisfy 1 <= min <= max");
  std::vector<std::size_t> taus;
  if (count < 2 || tau_max == tau_min) {
    taus.push_back(tau_min);
    if (tau_max != tau_min)
      taus.push_back(tau_max);
    return taus;
  }
  const double lo = std::log(static_cast<double>(tau_min));
  const double hi = std::log(static_cast<double>(tau_max));
  for (std::size_t i = 0; i < count; ++i) {
    const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    auto tau = static_cast<std::size_t>(std::llround(std::exp(t)));
    tau = std::clamp(tau, tau_min, tau_max);
    if (taus.empty() || tau > taus.back())
      taus.push_back(tau);
  }
  if (taus.back() != tau_max)
    taus.push_back(tau_max);
  return taus;
}

std::pair<std::size_t, std::size_t> default_fit_range(std::size_t n)
{
  return {8, std::max<std::size_t>(8, n / 64)};
}

XiMap fit_xi(const StructureFunctionTable& table,
             std::pair<std::size_t, std::size_t> fit_range)
{
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < table.taus.size(); ++j) {
    if (table.taus[j] >= fit_range.first && table.taus[j] <= fit_range.second)
      cols.push_back(j);
  }
  if (cols.size() < 4)
    throw Error(ErrorCode::range_too_small,
                "fit range [" + std::to_string(fit_range.first) + ", " +
                  std::to_string(fit_range.second) + "] holds " +
                  std::to_string(cols.size()) + " lags; need at least 4");

  const double k = static_cast<double>(cols.size());
  double mean_x = 0.0;
  for (auto j : cols)
    mean_x += std::log(static_cast<double>(table.taus[j]));
  mean_x /= k;
  double sxx = 0.0;
  for (auto j : cols) {
    const double dx = std::log(static_cast<double>(table.taus[j])) - mean_x;
    sxx += dx * dx;
  }

  XiMap out;
  for (std::size_t i = 0; i < table.qs.size(); ++i) {
    std::vector<double> y;
    y.reserve(cols.size());
    for (auto j : cols) {
      const double mij = table.m[i][j];
      if (!(mij > 0.0) || !std::isfinite(mij))
        throw Error(ErrorCode::nonpositive_moment,
                    "M(q=" + std::to_string(table.qs[i]) + ", tau=" +
                      std::to_string(table.taus[j]) + ") is not positive");
      y.push_back(std::log(mij));
    }
    double mean_y = 0.0;
    for (double v : y)
      mean_y += v;
    mean_y /= k;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const double dx = std::log(static_cast<double>(table.taus[cols[c]])) - mean_x;
      const double dy = y[c] - mean_y;
      sxy += dx * dy;
      syy += dy * dy;
    }
    const double slope = sxy / sxx;
    double ssr = 0.0;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const double dx = std::log(static_cast<double>(table.taus[cols[c]])) - mean_x;
      const double r = y[c] - mean_y - slope * dx;
      ssr += r * r;
    }
    XiEstimate est;
    est.value = slope;
    est.std_error = std::sqrt(ssr / (k - 2.0) / sxx);
    est.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
    out[table.qs[i]] = est;
  }
  return out;
}

double xi_model(double q, double hurst, double lambda)
{
  return q * hurst - 0.5 * q * (q - 2.0) * lambda * lambda;
}

HLambdaEstimate estimate_h_lambda(const XiMap& xi)
{
  if (xi.size() < 3)
    throw Error(ErrorCode::degenerate_design,
                "need at least 3 distinct moment orders, got " + std::to_string(xi.size()));
  const bool informative = std::any_of(xi.begin(), xi.end(), [](const auto& kv) {
    return kv.first != 0.0 && kv.first != 2.0;
  });
  if (!informative)
    throw Error(ErrorCode::degenerate_design,
                "moment orders 0 and 2 alone cannot separate H from lambda");

  bool weighted = true;
  for (const auto& [q, e] : xi) {
    if (!(e.std_error > 0.0) || !std::isfinite(e.std_error))
      weighted = false;
  }

  // normal equations for xi = H * q + s * (-q (q - 2) / 2), s = lambda^2
  double a11 = 0.0, a12 = 0.0, a22 = 0.0, b1 = 0.0, b2 = 0.0;
  for (const auto& [q, e] : xi) {
    const double w = weighted ? 1.0 / (e.std_error * e.std_error) : 1.0;
    const double c1 = q;
    const double c2 = -0.5 * q * (q - 2.0);
    a11 += w * c1 * c1;
    a12 += w * c1 * c2;
    a22 += w * c2 * c2;
    b1 += w * c1 * e.value;
    b2 += w * c2 * e.value;
  }
  const double det = a11 * a22 - a12 * a12;
  if (!(std::abs(det) > 1e-12 * a11 * a22))
    throw Error(ErrorCode::degenerate_design, "moment orders cannot separate H from lambda");

  HLambdaEstimate out;
  out.weighted = weighted;
  out.hurst = (a22 * b1 - a12 * b2) / det;
  out.lambda_squared = (a11 * b2 - a12 * b1) / det;

  double chi2 = 0.0;
  for (const auto& [q, e] : xi) {
    const double w = weighted ? 1.0 / (e.std_error * e.std_error) : 1.0;
    const double r = e.value - (out.hurst * q - 0.5 * q * (q - 2.0) * out.lambda_squared);
    chi2 += w * r * r;
  }
  const double dof = static_cast<double>(xi.size()) - 2.0;
  // unweighted: residual variance; weighted: inflate by reduced chi^2 if > 1
  const double scale = weighted ? std::max(1.0, chi2 / dof) : chi2 / dof;
  out.covariance = {scale * a22 / det, -scale * a12 / det, -scale * a12 / det,
                    scale * a11 / det};

  // numerically zero curvature counts as monofractal
  constexpr double kZeroCurvature = 1e-12;
  if (out.lambda_squared <= kZeroCurvature) {
    out.monofractal = true;
    out.lambda = 0.0;
  } else {
    out.lambda = std::sqrt(out.lambda_squared);
  }
  return out;
}

ScalingFit fit_scaling(const StructureFunctionTable& table,
                       std::pair<std::size_t, std::size_t> fit_range)
{
  ScalingFit fit;
  fit.fit_range = fit_range;
  fit.xi = fit_xi(table, fit_range);
  fit.params = estimate_h_lambda(fit.xi);
  fit.hurst_out_of_range = !(fit.params.hurst > 0.0 && fit.params.hurst < 1.0);
  return fit;
}

} // namespace mfqp
