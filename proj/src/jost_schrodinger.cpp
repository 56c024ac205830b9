#include "edslab/jost_schrodinger.hpp"

#include <algorithm>
#include <limits>

namespace edslab {

namespace {

constexpr std::size_t series_term_cap = 200;

// Phase phi(t) = \int_t^gamma p at arbitrary t, given the nodal tail integrals.
cplx phase_at(const GridFunction& p, const std::vector<cplx>& nodal_tail, double t) {
  const Grid& g = p.grid();
  if (t >= g.gamma()) return 0.0;
  const double h = g.step();
  std::size_t j = static_cast<std::size_t>(std::max(0.0, t) / h);
  if (j >= g.size() - 1) j = g.size() - 2;
  const double right = g.x(j + 1);
  return nodal_tail[j + 1] + 0.5 * (right - t) * (p(t) + p[j + 1]);
}

// sum_{j > n} w^j / j!, with n = -1 meaning the full exponential.
double exp_tail(double w, long n) {
  if (w <= 0.0) return n < 0 ? 1.0 : 0.0;
  if (n < 0) return std::exp(w);
  double sum = 0.0;
  for (long j = n + 1;; ++j) {
    const double term = std::exp(static_cast<double>(j) * std::log(w) - std::lgamma(static_cast<double>(j) + 1.0));
    sum += term;
    if (static_cast<double>(j) > w && term <= 1e-17 * sum) break;
    if (j > n + 2000) break;
  }
  return sum;
}

struct SeriesRun {
  PanelQuadrature quad;
  std::vector<cplx> v;  // v(x,k) at panel nodes
  std::size_t terms = 0;
  double tail = 0.0;
  cplx g0;
};

SeriesRun run_series(const PotentialP& pot, cplx k, double tol) {
  if (!(tol > 0.0)) throw ValidationError("jost_series: tol must be positive");
  check_k_cap(k, pot.gamma());
  const Grid& grid = pot.grid();
  const double rate = 2.0 * std::abs(k) + 2.0 * pot.p().max_abs() + std::sqrt(pot.q().max_abs()) + 1.0;
  SeriesRun run{PanelQuadrature(grid, PanelQuadrature::panels_for_rate(grid, rate)), {}, 0, 0.0, 1.0};
  const auto& t = run.quad.nodes();
  const std::size_t m = t.size();

  const std::vector<cplx> p_tail = tail_integrals(pot.p());
  std::vector<cplx> pv(m), vv(m), gv(m);
  for (std::size_t i = 0; i < m; ++i) {
    pv[i] = pot.p()(t[i]);
    vv[i] = pot.q()(t[i]) + 2.0 * k * pv[i];
    gv[i] = std::exp(cplx(0.0, 1.0) * phase_at(pot.p(), p_tail, t[i]));
  }
  run.g0 = gv[0];

  const EnvelopeBounds env = envelope_bounds(pot, k);
  const double scale = env.omega0 * std::exp(2.0 * pot.gamma() * env.k_minus);
  auto tail_after = [&](long n) { return scale * exp_tail(env.omega1, n); };

  run.v.assign(m, 0.0);
  long last = -1;
  double tail = tail_after(last);
  if (tail < tol) {
    run.tail = tail;
    return run;
  }

  std::vector<cplx> f(m), kk, jj;
  for (std::size_t i = 0; i < m; ++i) f[i] = vv[i] * gv[i];
  run.quad.volterra(f, k, kk, jj);
  std::vector<cplx> term = kk;
  for (std::size_t i = 0; i < m; ++i) f[i] = pv[i] * gv[i];
  run.quad.volterra(f, k, kk, jj);
  for (std::size_t i = 0; i < m; ++i) {
    term[i] -= cplx(0.0, 1.0) * jj[i];
    run.v[i] = term[i];
  }
  last = 0;
  tail = tail_after(last);

  while (tail >= tol) {
    if (static_cast<std::size_t>(last) + 1 >= series_term_cap)
      throw NumericalError("jost_series: tail bound not reached within 200 terms (omega1 too large)");
    for (std::size_t i = 0; i < m; ++i) f[i] = vv[i] * term[i];
    run.quad.volterra(f, k, kk, jj);
    term.swap(kk);
    for (std::size_t i = 0; i < m; ++i) run.v[i] += term[i];
    ++last;
    tail = tail_after(last);
  }
  run.terms = static_cast<std::size_t>(last + 1);
  run.tail = tail;
  return run;
}

}  // namespace

void check_k_cap(cplx k, double gamma) {
  if (!std::isfinite(k.real()) || !std::isfinite(k.imag())) throw ValidationError("k must be finite");
  if (std::abs(k.imag()) * gamma > max_im_k_gamma)
    throw NumericalError("|Im k| exceeds the evaluation cap 30/gamma; exp(2 gamma k_-) would overflow the result");
}

cplx gauge_factor(const GridFunction& p, double x) {
  return std::exp(cplx(0.0, 1.0) * integrate(p, std::clamp(x, 0.0, p.grid().gamma()), p.grid().gamma()));
}

cplx v0_eval(const PotentialP& pot, double x, cplx k) {
  const Grid& grid = pot.grid();
  if (x < 0.0 || x > grid.gamma()) throw ValidationError("v0_eval: x outside [0, gamma]");
  if (x == grid.gamma()) return 0.0;
  const double rate = 2.0 * std::abs(k) + 2.0 * pot.p().max_abs() + 1.0;
  const std::size_t refine = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(rate * grid.step() / 0.01)));
  const double hf = grid.step() / static_cast<double>(refine);

  // Fine points: x, then every refined node strictly above x.
  std::vector<double> pts{x};
  const std::size_t total = (grid.size() - 1) * refine;
  for (std::size_t i = 0; i <= total; ++i) {
    const double ti = (i == total) ? grid.gamma() : static_cast<double>(i) * hf;
    if (ti > x) pts.push_back(ti);
  }
  const std::size_t m = pts.size();
  const std::vector<cplx> p_tail = tail_integrals(pot.p());
  std::vector<cplx> g(m), qg_tail(m, 0.0), outer(m);
  for (std::size_t i = 0; i < m; ++i) g[i] = std::exp(cplx(0.0, 1.0) * phase_at(pot.p(), p_tail, pts[i]));
  for (std::size_t i = m - 1; i-- > 0;)
    qg_tail[i] = qg_tail[i + 1] + 0.5 * (pts[i + 1] - pts[i]) * (pot.q()(pts[i]) * g[i] + pot.q()(pts[i + 1]) * g[i + 1]);
  for (std::size_t i = 0; i < m; ++i)
    outer[i] = std::exp(cplx(0.0, 2.0) * k * (pts[i] - x)) * (cplx(0.0, -1.0) * pot.p()(pts[i]) * g[i] + qg_tail[i]);
  cplx sum = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) sum += 0.5 * (pts[i + 1] - pts[i]) * (outer[i] + outer[i + 1]);
  return sum;
}

JostSeriesResult jost_series(const PotentialP& pot, cplx k, double tol) {
  SeriesRun run = run_series(pot, k, tol);
  return JostSeriesResult{run.g0 + run.v[0], run.terms, run.tail};
}

std::vector<cplx> jost_series_profile(const PotentialP& pot, cplx k, double tol) {
  SeriesRun run = run_series(pot, k, tol);
  const std::size_t n = pot.grid().size();
  const std::size_t per_cell = run.quad.panels() / (n - 1);
  const std::size_t m = run.quad.order();
  std::vector<cplx> out(n);
  for (std::size_t j = 0; j + 1 < n; ++j) out[j] = run.v[j * per_cell * m];
  out[n - 1] = run.v.back();
  return out;
}

namespace {

OdeTrajectory<2> integrate_schrodinger(const PotentialP& pot, cplx k, std::size_t steps, bool keep) {
  check_k_cap(k, pot.gamma());
  const double gamma = pot.gamma();
  if (steps == 0) steps = aligned_steps(pot.grid(), k);
  const cplx k2 = k * k;
  const GridFunction& p = pot.p();
  const GridFunction& q = pot.q();
  auto field = [&](double x) {
    OdeMatrix<2> a;
    a << 0.0, 1.0, q(x) + 2.0 * k * p(x) - k2, 0.0;
    return a;
  };
  const cplx e = std::exp(cplx(0.0, 1.0) * k * gamma);
  OdeState<2> y0;
  y0 << e, cplx(0.0, 1.0) * k * e;
  return solve_linear_ode<2>(field, gamma, 0.0, y0, steps, keep);
}

}  // namespace

cplx jost_ode(const PotentialP& pot, cplx k, std::size_t steps) {
  return integrate_schrodinger(pot, k, steps, false).final_state(0);
}

std::vector<cplx> jost_ode_profile(const PotentialP& pot, cplx k, std::size_t steps) {
  if (steps == 0) steps = aligned_steps(pot.grid(), k);
  const std::size_t n = pot.grid().size();
  if (steps % (n - 1) != 0) throw ValidationError("jost_ode_profile: steps must be a multiple of n-1");
  const OdeTrajectory<2> tr = integrate_schrodinger(pot, k, steps, true);
  const std::size_t stride = steps / (n - 1);
  std::vector<cplx> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = tr.y[(n - 1 - j) * stride](0);
  return out;
}

cplx jost_function_dirichlet(const PotentialP& pot, cplx k) { return jost_ode(pot, k); }

EnvelopeBounds envelope_bounds(const PotentialP& pot, cplx k) {
  const NormSet np = norms(pot.p());
  const NormSet nq = norms(pot.q());
  const double ak = std::abs(k);
  EnvelopeBounds e;
  e.omega0 = nq.weighted + np.l1;
  e.omega1 = nq.weighted + 2.0 * ak * np.weighted;
  if (ak > 0.0) {
    const ConstantSet c = constants_p(pot);
    e.omega0 = std::min(e.omega0, c.c1 / ak);
    e.omega1 = std::min(e.omega1, nq.l1 / ak + 2.0 * np.l1);
  }
  e.k_minus = 0.5 * (std::abs(k.imag()) - k.imag());
  return e;
}

}  // namespace edslab
