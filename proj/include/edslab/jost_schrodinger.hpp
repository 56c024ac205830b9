#pragma once

#include "edslab/potentials.hpp"

namespace edslab {

struct JostSeriesResult {
  cplx value;              // y(0,k)
  std::size_t terms_used = 0;
  double tail_bound = 0.0;
};

struct EnvelopeBounds {
  double omega0 = 0.0;
  double omega1 = 0.0;
  double k_minus = 0.0;
};

/// Largest |Im k| * gamma accepted by the Jost evaluators before they refuse
/// to run (e^{2 gamma k_-} would otherwise swamp double precision).
inline constexpr double max_im_k_gamma = 30.0;

/// Throws NumericalError when |Im k| exceeds the evaluation cap for this gamma.
void check_k_cap(cplx k, double gamma);

/// Gauge factor g(x) = exp(i \int_x^gamma p) at an arbitrary x (exact for linear interpolation of p).
cplx gauge_factor(const GridFunction& p, double x);

/// v_0(x,k) by direct nested trapezoid quadrature on a refinement of the potential grid.
cplx v0_eval(const PotentialP& pot, double x, cplx k);

/// y(0,k) = g(0) + sum_n v_n(0,k), truncated once the analytic tail bound drops below tol.
JostSeriesResult jost_series(const PotentialP& pot, cplx k, double tol = 1e-10);

/// The series solution v(x,k) = e^{-ikx} y_+(x,k) - g(x) on the potential grid nodes.
std::vector<cplx> jost_series_profile(const PotentialP& pot, cplx k, double tol = 1e-10);

/// y_+(0,k) by backward RK4 integration of (y, y')' = (y', (V - k^2) y) from gamma.
/// steps = 0 picks aligned_steps(grid, k).
cplx jost_ode(const PotentialP& pot, cplx k, std::size_t steps = 0);

/// y_+(x_j,k) at every potential grid node, from the same backward integration.
std::vector<cplx> jost_ode_profile(const PotentialP& pot, cplx k, std::size_t steps = 0);

/// Dirichlet Jost function psi(k) = y_+(0,k), evaluated on the ODE path.
cplx jost_function_dirichlet(const PotentialP& pot, cplx k);

EnvelopeBounds envelope_bounds(const PotentialP& pot, cplx k);

}  // namespace edslab
