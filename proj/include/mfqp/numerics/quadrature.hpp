#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace mfqp {

enum class QuadratureKind { gaussian_weight, adaptive };

//! Fixed nodes/weights for integrals of the form  int g(u) phi(u) du,
//! where phi is a centred normal density folded into the weights.
struct QuadratureRule
{
  std::vector<double> nodes;
  std::vector<double> weights;
  QuadratureKind kind = QuadratureKind::gaussian_weight;

  std::size_t size() const noexcept { return nodes.size(); }
};

//! Composite Gauss-Legendre rule over [-half_width, half_width] with the
//! N(0, sd^2) density folded into the (positive) weights.
//!
//! This replaces plain Gauss-Hermite: for the log-normal mixture kernels the
//! integrand in u varies on an O(1) scale independently of sd, which a
//! Hermite rule with nodes scaled by sd resolves poorly once sd ~ 1.
QuadratureRule gaussian_weight_rule(double sd,
                                    double half_width,
                                    std::size_t panels = 16,
                                    std::size_t nodes_per_panel = 16);

struct AdaptiveResult
{
  double value;
  double error_estimate;
};

//! Adaptive Gauss-Kronrod (7/15) on [a, b] to the given relative tolerance.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f,
                                  double a,
                                  double b,
                                  double rel_tol = 1e-12,
                                  unsigned max_depth = 18);

} // namespace mfqp
