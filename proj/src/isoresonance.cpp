#include "edslab/isoresonance.hpp"

#include <algorithm>

namespace edslab {

GridFunction theta_solve(const DiracPotential& v_o, double delta) { return phase_ivp(v_o.v(), delta); }

IsoMember iso_member(const PotentialQ& pq_o, double alpha_o, double delta) {
  const TransformPair base = t_forward(pq_o);
  const double d = mod_pi(delta);
  GridFunction theta = theta_solve(base.v, d);
  const std::size_t n = theta.size();
  std::vector<cplx> p(n), u(n);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx e = base.v.v()[j] * std::exp(cplx(0.0, 2.0 * theta[j].real()));
    p[j] = e.imag();
    u[j] = -e.real();
  }
  // theta_o is the phase of p_o itself.
  const double alpha = mod_pi(alpha_o + base.phi[0].real() - theta[0].real());
  return IsoMember{PotentialQ(GridFunction(pq_o.grid(), std::move(p)), GridFunction(pq_o.grid(), std::move(u))),
                   alpha, d, std::move(theta)};
}

DirichletReduction reduce_to_dirichlet(const PotentialQ& pq, double alpha) {
  const TransformPair base = t_forward(pq);
  const double a = mod_pi(alpha);
  const double theta_o0 = base.phi[0].real();
  auto gap = [&](double d) { return theta_solve(base.v, d)[0].real() - theta_o0 - a; };
  double lo = 0.0, hi = pi;
  if (a == 0.0) {
    hi = 0.0;
  } else {
    double f_lo = gap(lo);
    if (!(f_lo < 0.0) || !(gap(hi) > 0.0))
      throw NumericalError("reduce_to_dirichlet: theta_delta(0) is not increasing across [0, pi]");
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = gap(mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm < 0.0) == (f_lo < 0.0)) {
        lo = mid;
        f_lo = fm;
      } else {
        hi = mid;
      }
    }
  }
  const double delta = mod_pi(0.5 * (lo + hi));
  IsoMember m = iso_member(pq, a, delta);
  // alpha_delta is 0 to within the bisection tolerance; pin the representative.
  if (std::min(m.alpha, pi - m.alpha) > 1e-10)
    throw NumericalError("reduce_to_dirichlet: bisection did not reach alpha_delta = 0");
  m.alpha = 0.0;
  return DirichletReduction{std::move(m), delta};
}

BoundReport verify_iso_scattering(const PotentialQ& pq_o, double alpha_o, double delta,
                                  const std::vector<double>& k_grid) {
  const IsoMember m = iso_member(pq_o, alpha_o, delta);
  const ScatteringTable s_base = scattering_q(pq_o, alpha_o, k_grid);
  const ScatteringTable s_mem = scattering_q(m.pq, m.alpha, k_grid);
  const cplx rot = std::exp(cplx(0.0, 2.0 * m.delta));
  double dev = 0.0;
  for (std::size_t i = 0; i < k_grid.size(); ++i) dev = std::max(dev, std::abs(s_mem.s[i] - rot * s_base.s[i]));

  const TransformPair base = t_forward(pq_o);
  const double a = boundary_map(alpha_o, base.phi[0].real()).delta;
  const DiracPotential rotated = base.v.scaled(rot);
  // psi_{a+pi} = -psi_a, so the shifted parameter must not be reduced mod pi here.
  const DiracBoundary b0(a);
  DiracBoundary b1;
  b1.alpha = a + m.delta;
  const cplx shift = std::exp(cplx(0.0, -m.delta));
  double dev_dirac = 0.0;
  for (double k : k_grid)
    dev_dirac = std::max(dev_dirac, std::abs(dirac_jost_function(rotated, b1, k) - shift * dirac_jost_function(base.v, b0, k)));

  BoundReport rep;
  rep.add("|S_{alpha_delta}(member) - e^{2i delta} S_{alpha_o}(base)|", dev, 1e-6);
  rep.add("|psi_{a+delta}(e^{2i delta} v) - e^{-i delta} psi_a(v)|", dev_dirac, 1e-8);
  return rep;
}

}  // namespace edslab
