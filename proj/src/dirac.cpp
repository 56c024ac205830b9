#include "edslab/dirac.hpp"

#include "edslab/jost_schrodinger.hpp"

#include <algorithm>

namespace edslab {

DiracPotential::DiracPotential(GridFunction v) : v_(std::move(v)) {
  check_support(v_, GridFunction::zeros(v_.grid()), "Dirac potential");
}

DiracPotential DiracPotential::scaled(cplx c) const {
  std::vector<cplx> w(v_.values());
  for (cplx& z : w) z *= c;
  return DiracPotential(GridFunction(v_.grid(), std::move(w)));
}

DiracPotential DiracPotential::conj_scaled(cplx c) const {
  std::vector<cplx> w(v_.values());
  for (cplx& z : w) z = c * std::conj(z);
  return DiracPotential(GridFunction(v_.grid(), std::move(w)));
}

std::pair<cplx, cplx> dirac_jost(const DiracPotential& v, cplx k, std::size_t steps) {
  check_k_cap(k, v.gamma());
  const double gamma = v.gamma();
  if (steps == 0) steps = aligned_steps(v.grid(), k);
  const cplx ik = cplx(0.0, 1.0) * k;
  const GridFunction& pot = v.v();
  auto field = [&](double x) {
    const cplx vx = pot(x);
    OdeMatrix<2> a;
    a << ik, -vx, -std::conj(vx), -ik;
    return a;
  };
  OdeState<2> y0;
  y0 << std::exp(ik * gamma), 0.0;
  const OdeTrajectory<2> tr = solve_linear_ode<2>(field, gamma, 0.0, y0, steps, false);
  return {tr.final_state(0), tr.final_state(1)};
}

cplx dirac_jost_function(const DiracPotential& v, const DiracBoundary& bc, cplx k) {
  const auto [y1, y2] = dirac_jost(v, k);
  const cplx e = std::exp(cplx(0.0, -bc.alpha));
  return e * y1 - std::conj(e) * y2;
}

ScatteringTable dirac_scattering(const DiracPotential& v, const DiracBoundary& bc,
                                 const std::vector<double>& k_grid) {
  for (std::size_t i = 1; i < k_grid.size(); ++i)
    if (!(k_grid[i] > k_grid[i - 1])) throw ValidationError("dirac_scattering: k grid must increase");
  ScatteringTable t;
  t.k = k_grid;
  t.s.resize(k_grid.size());
  t.alpha = bc.alpha;
  t.gamma = v.gamma();
  parallel_for(k_grid.size(), [&](std::size_t i) {
    const cplx f = dirac_jost_function(v, bc, k_grid[i]);
    if (std::abs(f) < 1e-13) throw NumericalError("dirac_scattering: Jost function vanishes on the real axis");
    t.s[i] = std::conj(f) / f;
  });
  return t;
}

cplx dirac_scattering_continued(const DiracPotential& v, const DiracBoundary& bc, cplx k) {
  const cplx f = dirac_jost_function(v, bc, k);
  const cplx f_star = std::conj(dirac_jost_function(v, bc, std::conj(k)));
  if (f == 0.0) throw NumericalError("dirac_scattering_continued: pole (resonance) at k");
  return f_star / f;
}

std::pair<cplx, cplx> conjugation_check(const DiracPotential& v, const DiracBoundary& bc, cplx k) {
  const double a = bc.alpha;
  const cplx lhs = std::conj(dirac_jost_function(v, bc, -std::conj(k)));
  const DiracPotential w = v.conj_scaled(std::exp(cplx(0.0, 4.0 * a)));
  const cplx rhs = std::exp(cplx(0.0, 2.0 * a)) * dirac_jost_function(w, bc, k);
  return {lhs, rhs};
}

std::vector<double> fourier_k_grid(double gamma, double k_max) {
  if (!(k_max > 0.0)) throw ValidationError("k_max must be positive");
  const double dk_target = pi / (8.0 * gamma);
  const std::size_t half = static_cast<std::size_t>(std::ceil(k_max / dk_target));
  const double dk = k_max / static_cast<double>(half);
  std::vector<double> k(2 * half + 1);
  for (std::size_t i = 0; i < k.size(); ++i)
    k[i] = (static_cast<double>(i) - static_cast<double>(half)) * dk;
  k.front() = -k_max;
  k.back() = k_max;
  return k;
}

namespace {

// Trapezoid weights for an increasing abscissa.
std::vector<double> trapezoid_weights(const std::vector<double>& x) {
  std::vector<double> w(x.size(), 0.0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double d = 0.5 * (x[i + 1] - x[i]);
    w[i] += d;
    w[i + 1] += d;
  }
  return w;
}

}  // namespace

HKernel extract_h(const DiracPotential& v, const DiracBoundary& bc, const std::vector<double>& s_grid,
                  double k_max, double tol) {
  const std::vector<double> kg = fourier_k_grid(v.gamma(), k_max);
  const cplx base = std::exp(cplx(0.0, -bc.alpha));
  std::vector<cplx> d(kg.size());
  parallel_for(kg.size(), [&](std::size_t i) { d[i] = dirac_jost_function(v, bc, kg[i]) - base; });

  HKernel out;
  out.s = s_grid;
  out.tail_estimate = std::max(std::abs(d.front()), std::abs(d.back()));
  if (out.tail_estimate > 10.0 * tol)
    throw NumericalError("extract_h: integrand has not decayed at |k| = K; increase K");
  const std::vector<double> w = trapezoid_weights(kg);
  out.h.resize(s_grid.size());
  for (std::size_t j = 0; j < s_grid.size(); ++j) {
    cplx sum = 0.0;
    for (std::size_t i = 0; i < kg.size(); ++i) sum += w[i] * d[i] * std::exp(cplx(0.0, -2.0 * kg[i] * s_grid[j]));
    out.h[j] = sum / pi;
  }
  return out;
}

GlmKernel scattering_to_F(const ScatteringTable& table, const std::vector<double>& s_grid) {
  const std::size_t n = table.k.size();
  if (n < 8 || table.s.size() != n) throw ValidationError("scattering_to_F: table too small or inconsistent");
  const double k_abs_max = std::max(std::abs(table.k.front()), std::abs(table.k.back()));
  cplx mean = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(table.k[i]) >= 0.9 * k_abs_max) {
      mean += table.s[i];
      ++count;
    }
  }
  if (count == 0) throw NumericalError("scattering_to_F: no samples in the outer 10% of the grid");
  mean /= static_cast<double>(count);
  if (std::abs(mean) < 0.9) throw NumericalError("scattering_to_F: limit phase of S does not converge");
  const cplx limit = mean / std::abs(mean);

  // The jumps of F at s = 0 and s = -gamma make S - limit decay like 1/k, so a
  // truncated transform rings. Fit those two 1/k components on the outer band,
  // transform them exactly, and invert only the faster-decaying remainder.
  const double mu = 1.0 / table.gamma;
  auto model0 = [&](double k) { return 1.0 / cplx(k, mu); };
  auto model1 = [&](double k) { return std::exp(cplx(0.0, -2.0 * k * table.gamma)) / cplx(k, mu); };
  Eigen::MatrixXcd design(static_cast<Eigen::Index>(count), 2);
  Eigen::VectorXcd target(static_cast<Eigen::Index>(count));
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(table.k[i]) < 0.9 * k_abs_max) continue;
    design(row, 0) = model0(table.k[i]);
    design(row, 1) = model1(table.k[i]);
    target(row) = table.s[i] - limit;
    ++row;
  }
  cplx c0 = 0.0, c1 = 0.0;
  if (count >= 4) {
    const Eigen::VectorXcd c = design.colPivHouseholderQr().solve(target);
    c0 = c(0);
    c1 = c(1);
  }

  GlmKernel out;
  out.alpha_eff = mod_pi(0.5 * std::arg(limit));
  out.s = s_grid;
  out.f.resize(s_grid.size());
  const std::vector<double> w = trapezoid_weights(table.k);
  std::vector<cplx> rest(n);
  for (std::size_t i = 0; i < n; ++i)
    rest[i] = table.s[i] - limit - c0 * model0(table.k[i]) - c1 * model1(table.k[i]);
  for (std::size_t j = 0; j < s_grid.size(); ++j) {
    const double s = s_grid[j];
    cplx sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += w[i] * rest[i] * std::exp(cplx(0.0, -2.0 * table.k[i] * s));
    cplx f = sum / pi;
    // (1/pi) \int e^{-2iks} / (k + i mu) dk = -2i e^{-2 mu s} for s > 0, and 0 for s < 0;
    // F keeps its left limit at 0 and its right limit at -gamma.
    if (s > 0.0) f += cplx(0.0, -2.0) * c0 * std::exp(-2.0 * mu * s);
    if (s >= -table.gamma * (1.0 + 1e-12)) f += cplx(0.0, -2.0) * c1 * std::exp(-2.0 * mu * (s + table.gamma));
    out.f[j] = f;
    if (s < -table.gamma * (1.0 + 1e-9)) out.leakage = std::max(out.leakage, std::abs(f));
  }
  return out;
}

namespace {

// Linear interpolation of the kernel F at s; zero outside the sampled range.
cplx kernel_at(const GlmKernel& k, double s) {
  const auto& xs = k.s;
  if (xs.empty() || s < xs.front() || s > xs.back()) return 0.0;
  auto it = std::upper_bound(xs.begin(), xs.end(), s);
  if (it == xs.end()) return k.f.back();
  const std::size_t j = static_cast<std::size_t>(it - xs.begin());
  if (j == 0) return k.f.front();
  const double t = (s - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return k.f[j - 1] + t * (k.f[j] - k.f[j - 1]);
}

}  // namespace

DiracPotential glm_reconstruct(const GlmKernel& kernel, const Grid& grid) {
  const std::size_t n = grid.size();
  const double h = grid.step();
  // a(y) = F(-y) on the grid nodes y = x_j; Omega vanishes beyond gamma.
  std::vector<cplx> a(2 * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) a[j] = kernel_at(kernel, -grid.x(j));

  std::vector<cplx> v(n);
  parallel_for(n, [&](std::size_t i) {
    const std::size_t m = n - i;
    std::vector<double> w(m, h);
    if (m == 1) {
      w[0] = 0.0;
    } else {
      w.front() = 0.5 * h;
      w.back() = 0.5 * h;
    }
    // Unknowns: G11(s_j) at j, G12(s_j) at m + j.
    const Eigen::Index dim = static_cast<Eigen::Index>(2 * m);
    Eigen::MatrixXcd mat = Eigen::MatrixXcd::Identity(dim, dim);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(dim);
    for (std::size_t j = 0; j < m; ++j) {
      const Eigen::Index r1 = static_cast<Eigen::Index>(j);
      const Eigen::Index r2 = static_cast<Eigen::Index>(m + j);
      rhs(r2) = -a[i + j];
      for (std::size_t l = 0; l < m; ++l) {
        const cplx al = a[i + j + l];
        if (al == 0.0) continue;
        mat(r1, static_cast<Eigen::Index>(m + l)) += w[l] * std::conj(al);
        mat(r2, static_cast<Eigen::Index>(l)) += w[l] * al;
      }
    }
    const Eigen::VectorXcd sol = solve_dense(mat, rhs);
    v[i] = sol(static_cast<Eigen::Index>(m));
  });
  return DiracPotential(GridFunction(grid, std::move(v)));
}

}  // namespace edslab
