#include "edslab/potentials.hpp"

#include <algorithm>

namespace edslab {

void check_support(const GridFunction& a, const GridFunction& b, const char* what) {
  if (!(a.grid() == b.grid())) throw ValidationError(std::string(what) + ": components live on different grids");
  double peak = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) peak = std::max(peak, std::abs(a[j]) + std::abs(b[j]));
  if (peak == 0.0) return;
  const std::size_t last = a.size() - 1;
  if (!(std::abs(a[last]) + std::abs(b[last]) > 1e-12 * peak))
    throw ValidationError(std::string(what) + ": support must end at gamma (last sample vanishes)");
}

PotentialP::PotentialP(GridFunction p, GridFunction q) : p_(std::move(p)), q_(std::move(q)) {
  check_support(p_, q_, "class P potential");
  const double h = p_.grid().step();
  dp_.resize(p_.size() - 1);
  for (std::size_t j = 0; j + 1 < p_.size(); ++j) dp_[j] = (p_[j + 1] - p_[j]) / h;
}

PotentialQ::PotentialQ(GridFunction p, GridFunction u) : p_(std::move(p)), u_(std::move(u)) {
  if (!p_.is_real() || !u_.is_real()) throw ValidationError("class Q potential: p and u must be real");
  check_support(p_, u_, "class Q potential");
}

NormSet norms(const GridFunction& f) {
  const Grid& g = f.grid();
  std::vector<cplx> mod(f.size()), sq(f.size()), wt(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double a = std::abs(f[j]);
    mod[j] = a;
    sq[j] = a * a;
    wt[j] = g.x(j) * a;
  }
  const double b = g.gamma();
  NormSet n;
  n.l1 = integrate(GridFunction(g, mod), 0.0, b).real();
  n.l2 = std::sqrt(std::max(0.0, integrate(GridFunction(g, sq), 0.0, b).real()));
  n.weighted = integrate(GridFunction(g, wt), 0.0, b).real();
  return n;
}

ConstantSet constants_p(const PotentialP& pot) {
  const NormSet np = norms(pot.p());
  const NormSet nq = norms(pot.q());
  const double h = pot.grid().step();
  double dp_l1 = 0.0;
  for (const cplx& d : pot.dp()) dp_l1 += std::abs(d) * h;

  ConstantSet c;
  c.c1 = nq.l1 + std::abs(pot.p().values().back()) + dp_l1 + np.l2 * np.l2;
  c.c2 = std::max(nq.weighted + 2.0 * np.weighted, nq.l1 + 2.0 * np.l1);
  c.c3 = 3.0 * pot.gamma() * c.c1 * std::exp(2.0 * np.l1) + 3.0;
  // p vanishes beyond gamma, so the exterior value 0 belongs to the range of p.
  c.p_plus = 0.0;
  c.p_minus = 0.0;
  for (const cplx& z : pot.p().values()) {
    c.p_plus = std::max(c.p_plus, z.real());
    c.p_minus = std::min(c.p_minus, z.real());
  }
  return c;
}

GridFunction phase(const GridFunction& p) {
  std::vector<cplx> phi = tail_integrals(p);
  phi.back() = 0.0;
  return GridFunction(p.grid(), std::move(phi));
}

GridFunction miura_forward(const GridFunction& u) {
  const std::size_t n = u.size();
  const double h = u.grid().step();
  std::vector<cplx> q(n);
  for (std::size_t j = 0; j < n; ++j) {
    cplx du;
    if (n == 2) {
      du = (u[1] - u[0]) / h;
    } else if (j == 0) {
      du = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
    } else if (j + 1 == n) {
      du = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
    } else {
      du = (u[j + 1] - u[j - 1]) / (2.0 * h);
    }
    q[j] = du + u[j] * u[j];
  }
  return GridFunction(u.grid(), std::move(q));
}

}  // namespace edslab
