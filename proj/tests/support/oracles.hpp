#pragma once

//! Reference computations used only by the test suites. They are coded
//! independently of the library (no shared quadrature or RNG).

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace mfqp::testing {

//! Recursive adaptive Simpson on [a, b] with Richardson correction.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int depth = 40)
{
  struct Rec
  {
    const std::function<double(double)>& f;
    double run(double a, double b, double fa, double fm, double fb, double whole, double tol,
               int depth) const
    {
      const double m = 0.5 * (a + b);
      const double lm = 0.5 * (a + m);
      const double rm = 0.5 * (m + b);
      const double flm = f(lm);
      const double frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      const double delta = left + right - whole;
      const bool at_roundoff = std::abs(delta) <= 1e-15 * (std::abs(left) + std::abs(right));
      if (depth <= 0 || std::abs(delta) <= 15.0 * tol || at_roundoff || m == a || m == b)
        return left + right + delta / 15.0;
      return run(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
             run(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
  } rec{f};
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return rec.run(a, b, fa, fm, fb, whole, tol, depth);
}

//! P(x) and P''(x) of the log-normal mixture by adaptive Simpson over
//! u in [-8 lambda, 8 lambda], split into 32 pieces.
struct MixtureOracle
{
  double lambda;
  double sigma0 = 1.0;

  //! Integral over the truncated u-domain to relative accuracy rel_tol. A
  //! dense fixed Simpson pass sets the absolute target for the adaptive one.
  double integrate(const std::function<double(double)>& g, double rel_tol) const
  {
    const double lo = -8.0 * lambda;
    const int dense = 4096;
    const double h = 16.0 * lambda / dense;
    double rough = 0.0;
    for (int k = 0; k <= dense; ++k)
      rough += std::abs(g(lo + k * h)) * (k == 0 || k == dense ? 1.0 : (k % 2 ? 4.0 : 2.0));
    rough *= h / 3.0;
    if (!(rough > 1e-290))
      return 0.0;
    const double step = 16.0 * lambda / 32.0;
    const double tol = rel_tol * rough / 32.0;
    double sum = 0.0;
    for (int k = 0; k < 32; ++k)
      sum += adaptive_simpson(g, lo + k * step, lo + (k + 1) * step, tol, 30);
    return sum;
  }

  double weight(double u) const
  {
    return std::exp(-0.5 * (u / lambda) * (u / lambda)) / (std::sqrt(2.0 * std::numbers::pi) * lambda);
  }

  double p(double x, double tol = 1e-12) const
  {
    return integrate(
      [&](double u) {
        const double s = sigma0 * std::exp(u);
        return weight(u) * std::exp(-0.5 * x * x / (s * s)) / (std::sqrt(2.0 * std::numbers::pi) * s);
      },
      tol);
  }

  double d2(double x, double tol = 1e-12) const
  {
    return integrate(
      [&](double u) {
        const double s = sigma0 * std::exp(u);
        return weight(u) * (x * x / (s * s) - 1.0) / (s * s * s) * std::exp(-0.5 * x * x / (s * s)) /
               std::sqrt(2.0 * std::numbers::pi);
      },
      tol);
  }
};

inline double normal_pdf(double x, double sd = 1.0)
{
  return std::exp(-0.5 * (x / sd) * (x / sd)) / (std::sqrt(2.0 * std::numbers::pi) * sd);
}

//! Reference U(x) = P''/P for sigma0 = 1, frozen from a 30-digit mpmath
//! evaluation (tests/oracles/castaing_oracle.py) at these abscissae.
inline const std::vector<double> oracle_x{0, 0.5, 1, 2, 3, 4, 5, 6, 8, 10, 12, 15};

inline const std::vector<double> oracle_u_01{
  -1.04081077419238, -0.756475783819471, 0.0612806945468141, 2.88157811086235,
  6.41151836111935,  9.81849364627146,   12.684755741473,    14.9024220163585,
  17.6299248001565,  18.7538080865984,   18.9411456563649,   18.4034517869241};
inline const std::vector<double> oracle_u_05{
  -2.71828182834997, -0.075243084419445, 1.2746218294302,   1.57081747997751,
  1.35107997153281,  1.12664637281953,   0.946550386113371, 0.806201493942028,
  0.608341261158026, 0.479021347822862,  0.389526408333475, 0.29866771213393};
inline const std::vector<double> oracle_u_09{
  -25.5337202689307, 2.91098339524321,  1.94779999176089,   1.00861922457904,
  0.63564459839899,  0.44638231404684,  0.335118644669974,  0.263229645262487,
  0.177725492687419, 0.129884128998179, 0.100002675965942,  0.0721955644816874};

//! Barrier (first interior maximum of U on x > 0), sigma0 = 1: continuous
//! location, value, and the nearest point of the n = 1e5 oracle scan grid.
struct BarrierOracle
{
  double lambda;
  double x_star;
  double u_star;
  double grid_x_star;
  double span;
};
inline const std::vector<BarrierOracle> oracle_barriers{
  {0.1, 11.543403226961871, 18.955381791914238, 11.54331543315433, 16.0},
  {0.5, 1.6978218800563412, 1.59564337185656, 1.6979169791697917, 10.0},
  {0.9, 0.3859740519916368, 3.03644771885485, 0.38590385903859037, 10.0}};

} // namespace mfqp::testing
