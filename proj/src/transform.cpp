#include "edslab/transform.hpp"

#include "edslab/jost_schrodinger.hpp"

namespace edslab {

TransformPair t_forward(const PotentialQ& pq) {
  const GridFunction phi = phase(pq.p());
  std::vector<cplx> v(pq.p().size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double f = phi[j].real();
    v[j] = cplx(-pq.u()[j].real(), pq.p()[j].real()) * std::exp(cplx(0.0, -2.0 * f));
  }
  return TransformPair{pq, DiracPotential(GridFunction(pq.grid(), std::move(v))), phi};
}

GridFunction phase_ivp(const GridFunction& v, double terminal) {
  const Grid& g = v.grid();
  const double h = g.step();
  if (!(h * v.max_abs() < 1.0))
    throw ValidationError("phase IVP: grid too coarse for this potential (need h * max|v| < 1)");
  const std::size_t n = g.size();
  std::vector<cplx> theta(n);
  double t = terminal;
  theta[n - 1] = t;
  auto rate = [&](std::size_t j, double th) { return (v[j] * std::exp(cplx(0.0, 2.0 * th))).imag(); };
  for (std::size_t j = n - 1; j-- > 0;) {
    const double rhs = t + 0.5 * h * rate(j + 1, t);
    // g(x) = x - (h/2) Im(v_j e^{2ix}) - rhs is strictly increasing since h|v| < 1.
    double x = rhs + 0.5 * h * rate(j, t);
    for (int it = 0; it < 50; ++it) {
      const cplx e = v[j] * std::exp(cplx(0.0, 2.0 * x));
      const double gx = x - 0.5 * h * e.imag() - rhs;
      const double dg = 1.0 - h * e.real();
      const double dx = gx / dg;
      x -= dx;
      if (std::abs(dx) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    t = x;
    theta[j] = t;
  }
  return GridFunction(g, std::move(theta));
}

TransformPair t_inverse(const DiracPotential& v) {
  const GridFunction phi = phase_ivp(v.v(), 0.0);
  const std::size_t n = phi.size();
  std::vector<cplx> p(n), u(n);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx e = v.v()[j] * std::exp(cplx(0.0, 2.0 * phi[j].real()));
    p[j] = e.imag();
    u[j] = -e.real();
  }
  PotentialQ pq(GridFunction(v.grid(), std::move(p)), GridFunction(v.grid(), std::move(u)));
  return TransformPair{std::move(pq), v, phi};
}

BoundaryTriple boundary_map(double alpha, double phi0) {
  BoundaryTriple b;
  b.alpha = mod_pi(alpha);
  b.delta = mod_pi(pi / 2.0 - phi0 - alpha);
  const double r = mod_2pi(phi0 + alpha + b.delta - pi / 2.0);
  b.beta = std::abs(r - pi) < pi / 2.0 ? pi : 0.0;
  return b;
}

cplx jost_q(const PotentialQ& pq, double alpha, cplx k) {
  const TransformPair tp = t_forward(pq);
  const BoundaryTriple b = boundary_map(alpha, tp.phi[0].real());
  const cplx f = dirac_jost_function(tp.v, DiracBoundary(b.delta), k);
  return cplx(0.0, 1.0) * std::exp(cplx(0.0, b.beta)) * k * f;
}

cplx jost_q_secondary(const PotentialQ& pq, double alpha, cplx k) {
  if (k == 0.0) throw ValidationError("jost_q_secondary: undefined at k = 0");
  const TransformPair tp = t_forward(pq);
  const auto [w1, w2] = dirac_jost(tp.v, k);
  const cplx e = std::exp(cplx(0.0, tp.phi[0].real()));
  const cplx y = e * w1 + std::conj(e) * w2;
  const cplx y1_over_k = cplx(0.0, 1.0) * (e * w1 - std::conj(e) * w2);
  return k * (y1_over_k * std::sin(alpha) + y * std::cos(alpha));
}

cplx jost_q_direct(const PotentialQ& pq, double alpha, cplx k, std::size_t steps) {
  check_k_cap(k, pq.gamma());
  const double gamma = pq.gamma();
  if (steps == 0) steps = aligned_steps(pq.grid(), k);
  const GridFunction& p = pq.p();
  const GridFunction& u = pq.u();
  const cplx k2 = k * k;
  auto field = [&](double x) {
    const cplx ux = u(x);
    OdeMatrix<2> a;
    a << ux, 1.0, 2.0 * k * p(x) - k2, -ux;
    return a;
  };
  const cplx e = std::exp(cplx(0.0, 1.0) * k * gamma);
  OdeState<2> y0;
  y0 << e, cplx(0.0, 1.0) * k * e;
  const OdeState<2> y = solve_linear_ode<2>(field, gamma, 0.0, y0, steps, false).final_state;
  return y(1) * std::sin(alpha) + k * y(0) * std::cos(alpha);
}

ScatteringTable scattering_q(const PotentialQ& pq, double alpha, const std::vector<double>& k_grid) {
  const TransformPair tp = t_forward(pq);
  const BoundaryTriple b = boundary_map(alpha, tp.phi[0].real());
  ScatteringTable t = dirac_scattering(tp.v, DiracBoundary(b.delta), k_grid);
  // conj(i e^{i beta} k) / (i e^{i beta} k) = -e^{-2i beta} = -1 for real k and beta in {0, pi}.
  for (cplx& s : t.s) s = -s;
  t.alpha = b.alpha;
  return t;
}

}  // namespace edslab
