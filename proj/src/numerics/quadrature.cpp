#include "mfqp/numerics/quadrature.hpp"

#include "mfqp/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include <cmath>
#include <numbers>
#include <utility>

namespace mfqp {

namespace {

// Gauss-Legendre nodes and weights on [-1, 1], ascending.
std::pair<std::vector<double>, std::vector<double>>
gauss_legendre(std::size_t n)
{
  const auto zeros = boost::math::legendre_p_zeros<double>(static_cast<int>(n));
  std::vector<double> x;
  std::vector<double> w;
  x.reserve(n);
  w.reserve(n);
  auto weight = [n](double z) {
    const double dp = boost::math::legendre_p_prime<double>(static_cast<int>(n), z);
    return 2.0 / ((1.0 - z * z) * dp * dp);
  };
  // legendre_p_zeros returns the nonnegative half, ascending
  for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
    if (*it == 0.0)
      continue;
    x.push_back(-*it);
    w.push_back(weight(*it));
  }
  for (double z : zeros) {
    x.push_back(z);
    w.push_back(weight(z));
  }
  return {std::move(x), std::move(w)};
}

} // namespace

QuadratureRule gaussian_weight_rule(double sd,
                                    double half_width,
                                    std::size_t panels,
                                    std::size_t nodes_per_panel)
{
  if (!(sd > 0.0) || !(half_width > 0.0) || panels == 0 || nodes_per_panel < 2)
    throw Error(ErrorCode::invalid_params, "bad quadrature rule request");

  const auto [x, w] = gauss_legendre(nodes_per_panel);
  const double h = 2.0 * half_width / static_cast<double>(panels);
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sd);

  QuadratureRule rule;
  rule.kind = QuadratureKind::gaussian_weight;
  rule.nodes.reserve(panels * nodes_per_panel);
  rule.weights.reserve(panels * nodes_per_panel);
  for (std::size_t p = 0; p < panels; ++p) {
    const double centre = -half_width + h * (static_cast<double>(p) + 0.5);
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double u = centre + 0.5 * h * x[k];
      const double z = u / sd;
      rule.nodes.push_back(u);
      rule.weights.push_back(0.5 * h * w[k] * norm * std::exp(-0.5 * z * z));
    }
  }
  return rule;
}

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f,
                                  double a,
                                  double b,
                                  double rel_tol,
                                  unsigned max_depth)
{
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  const double value =
    gauss_kronrod<double, 15>::integrate(f, a, b, max_depth, rel_tol, &err);
  return {value, err};
}

} // namespace mfqp
