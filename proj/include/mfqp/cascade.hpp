#pragma once

#include "mfqp/numerics/grid.hpp"
#include "mfqp/numerics/quadrature.hpp"
#include "mfqp/numerics/random.hpp"

#include <vector>

namespace mfqp {

//! Log-normal variance mixture: ln(sigma / sigma0) ~ N(0, lambda^2).
struct CascadeParams
{
  double lambda = 0.0; //!< non-Gaussianity; 0 selects the exact Gaussian
  double sigma0 = 1.0; //!< reference scale of the mixed Gaussians

  //! Throws Error(invalid_params) unless lambda >= 0 and sigma0 > 0.
  void validate() const;

  //! sigma0 * exp(lambda^2), the scale used to size evaluation grids.
  double effective_sigma() const;
};

//! True when the grid covers [-6 sigma_eff, 6 sigma_eff].
bool covers_effective_range(const CascadeParams& params, const Grid& grid);

//! Density and its first two x-derivatives at one point.
struct CastaingValue
{
  double p = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

//! Pointwise evaluator of the Castaing density
//!
//!   P(x) = int N(u; 0, lambda^2) * N(x; 0, (sigma0 e^u)^2) du,  |u| <= 8 lambda
//!
//! and of its derivatives, obtained by differentiating under the integral.
//! A fixed composite Gauss-Legendre rule (16 nodes per panel, panels at most
//! 0.5 wide and at least 16 of them) handles the bulk; points where the
//! u-integrand peaks near the truncation edge or is narrower than a quarter
//! panel are integrated adaptively instead.
class CastaingKernel
{
public:
  explicit CastaingKernel(CascadeParams params);

  const CascadeParams& params() const noexcept { return params_; }
  const QuadratureRule& rule() const noexcept { return rule_; }

  CastaingValue evaluate(double x) const;
  double density(double x) const;

  //! Whether evaluate(x) takes the adaptive route.
  bool needs_adaptive(double x) const;

  //! Half-width of the u-domain (8 lambda).
  double truncation() const noexcept { return 8.0 * params_.lambda; }

private:
  CastaingValue evaluate_fixed(double x) const;
  CastaingValue evaluate_adaptive(double x) const;

  CascadeParams params_;
  std::size_t panels_ = 0;
  QuadratureRule rule_;
  std::vector<double> inv_sigma_;    // 1 / (sigma0 e^u_i)
  std::vector<double> node_weight_;  // w_i / (sqrt(2 pi) sigma_i)
};

GridFunction castaing_pdf(const CascadeParams& params, const Grid& grid);

GridFunction castaing_pdf_second_derivative(const CascadeParams& params,
                                            const Grid& grid);

inline constexpr double default_p_floor = 1e-300;

struct QuantumPotentialCurve
{
  GridFunction potential;     //!< U = P''/P; 0 at masked points
  CascadeParams params;
  std::vector<bool> floor_mask; //!< true where P < p_floor
};

//! U(x) = P''(x) / P(x) with hbar = m = 1 and the hbar^2/2m prefactor
//! dropped; the amplitude is P itself, not sqrt(P).
QuantumPotentialCurve quantum_potential(const CascadeParams& params,
                                        const Grid& grid,
                                        double p_floor = default_p_floor);

//! Indices of strict interior local maxima of the potential at grid points
//! x > x_above whose neighbours are unmasked (barrier detection).
std::vector<std::size_t> potential_local_maxima(const QuantumPotentialCurve& curve,
                                                double x_above = 0.0);

//! Draws x = sigma0 * exp(lambda z1) * z2 with independent standard normals,
//! i.e. exact samples of the untruncated mixture.
std::vector<double> castaing_sample(const CascadeParams& params,
                                    std::size_t count,
                                    const RandomStream& rs);

} // namespace mfqp
