#include "edslab/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace edslab {

Grid::Grid(double gamma, std::size_t n) : gamma_(gamma), n_(n) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("grid: gamma must be positive");
  if (n < 2) throw ValidationError("grid: need at least 2 points");
}

double Grid::x(std::size_t j) const {
  if (j + 1 == n_) return gamma_;
  return static_cast<double>(j) * gamma_ / static_cast<double>(n_ - 1);
}

GridFunction::GridFunction(Grid grid, std::vector<cplx> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw ValidationError("grid function: sample count does not match grid");
  for (const cplx& z : values_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw ValidationError("grid function: non-finite sample");
  }
}

GridFunction GridFunction::zeros(const Grid& grid) {
  return GridFunction(grid, std::vector<cplx>(grid.size(), 0.0));
}

GridFunction GridFunction::sample(const Grid& grid, const std::function<cplx(double)>& f) {
  std::vector<cplx> v(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) v[j] = f(grid.x(j));
  return GridFunction(grid, std::move(v));
}

cplx GridFunction::operator()(double x) const {
  const double g = grid_.gamma();
  if (x < 0.0 || x > g) return 0.0;
  const double h = grid_.step();
  const std::size_t last = values_.size() - 1;
  double pos = x / h;
  std::size_t j = static_cast<std::size_t>(pos);
  if (j >= last) return values_[last];
  const double t = pos - static_cast<double>(j);
  return values_[j] + t * (values_[j + 1] - values_[j]);
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (const cplx& z : values_) m = std::max(m, std::abs(z));
  return m;
}

bool GridFunction::is_real(double tol) const {
  return std::all_of(values_.begin(), values_.end(),
                     [tol](const cplx& z) { return std::abs(z.imag()) <= tol; });
}

cplx integrate(const GridFunction& f, double a, double b) {
  const Grid& g = f.grid();
  const double slack = 1e-12 * g.gamma();
  if (a > b) throw ValidationError("integrate: reversed bounds");
  if (a < -slack || b > g.gamma() + slack) throw ValidationError("integrate: bounds outside [0, gamma]");
  a = std::clamp(a, 0.0, g.gamma());
  b = std::clamp(b, 0.0, g.gamma());
  if (a == b) return 0.0;
  const double h = g.step();
  std::size_t first = static_cast<std::size_t>(std::ceil(a / h));
  double x_prev = a;
  cplx f_prev = f(a);
  cplx sum = 0.0;
  for (std::size_t j = first; j < g.size(); ++j) {
    const double xj = g.x(j);
    if (xj <= a) continue;
    if (xj >= b) break;
    sum += 0.5 * (xj - x_prev) * (f_prev + f[j]);
    x_prev = xj;
    f_prev = f[j];
  }
  sum += 0.5 * (b - x_prev) * (f_prev + f(b));
  return sum;
}

std::vector<cplx> tail_integrals(const GridFunction& f) {
  const std::size_t n = f.size();
  const double h = f.grid().step();
  std::vector<cplx> out(n, 0.0);
  for (std::size_t j = n - 1; j-- > 0;) out[j] = out[j + 1] + 0.5 * h * (f[j] + f[j + 1]);
  return out;
}

std::size_t aligned_steps(const Grid& grid, cplx k, std::size_t base) {
  const std::size_t cells = grid.size() - 1;
  const double wanted = std::max(static_cast<double>(base), std::ceil(100.0 * std::abs(k) * grid.gamma()));
  const std::size_t raw = static_cast<std::size_t>(wanted);
  return ((raw + cells - 1) / cells) * cells;
}

Eigen::VectorXcd solve_dense(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& b) {
  if (a.rows() != a.cols()) throw ValidationError("solve_dense: matrix is not square");
  if (b.size() != a.rows()) throw ValidationError("solve_dense: dimension mismatch");
  if (a.rows() == 0) return Eigen::VectorXcd();
  const double norm_a = a.cwiseAbs().rowwise().sum().maxCoeff();
  if (!(norm_a > 0.0) || !std::isfinite(norm_a)) throw NumericalError("solve_dense: singular matrix");
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (min_pivot < 1e-14 * norm_a) throw NumericalError("solve_dense: numerically singular matrix");
  Eigen::VectorXcd x = lu.solve(b);
  auto residual_ok = [&](const Eigen::VectorXcd& r) {
    const double lhs = r.cwiseAbs().maxCoeff();
    const double rhs = 1e-10 * (norm_a * x.cwiseAbs().maxCoeff() + b.cwiseAbs().maxCoeff());
    return lhs <= rhs;
  };
  Eigen::VectorXcd r = b - a * x;
  if (!residual_ok(r)) {
    x += lu.solve(r);
    r = b - a * x;
    if (!residual_ok(r)) throw NumericalError("solve_dense: residual check failed");
  }
  return x;
}

cplx expm1_over(cplx z) {
  if (std::abs(z) < 0.2) {
    // Taylor series sum_{m>=0} z^m/(m+1)!; 14 terms reach double precision for |z| < 0.2.
    cplx term = 1.0, sum = 1.0;
    for (int m = 1; m < 14; ++m) {
      term *= z / static_cast<double>(m + 1);
      sum += term;
    }
    return sum;
  }
  return (std::exp(z) - 1.0) / z;
}

namespace {

// Gauss-Legendre nodes and weights on [-1, 1] via the Golub-Welsch eigenproblem.
void gauss_legendre(std::size_t m, std::vector<double>& x, std::vector<double>& w) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 1; i < m; ++i) {
    const double b = static_cast<double>(i) / std::sqrt(4.0 * static_cast<double>(i * i) - 1.0);
    jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = b;
    jac(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(i)) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  x.resize(m);
  w.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = es.eigenvalues()(static_cast<Eigen::Index>(i));
    const double v0 = es.eigenvectors()(0, static_cast<Eigen::Index>(i));
    w[i] = 2.0 * v0 * v0;
  }
}

}  // namespace

PanelQuadrature::PanelQuadrature(const Grid& grid, std::size_t panels_per_cell, std::size_t order)
    : grid_(grid), order_(order) {
  if (panels_per_cell < 1) throw ValidationError("panel quadrature: need at least one panel per cell");
  if (order < 3) throw ValidationError("panel quadrature: order must be >= 3");
  panels_ = (grid.size() - 1) * panels_per_cell;
  width_ = grid.gamma() / static_cast<double>(panels_);

  const std::size_t m = order_;
  local_.resize(m);
  for (std::size_t i = 0; i < m; ++i) local_[i] = -std::cos(pi * static_cast<double>(i) / static_cast<double>(m - 1));
  local_.front() = -1.0;
  local_.back() = 1.0;

  std::vector<double> bary(m);
  for (std::size_t i = 0; i < m; ++i) bary[i] = ((i % 2) ? -1.0 : 1.0) * ((i == 0 || i + 1 == m) ? 0.5 : 1.0);

  std::vector<double> gx, gw;
  gauss_legendre(m, gx, gw);

  cumulative_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const double lo = local_[i];
    const double half = 0.5 * (1.0 - lo);
    if (half <= 0.0) continue;
    for (std::size_t q = 0; q < m; ++q) {
      const double t = lo + half * (gx[q] + 1.0);
      double denom = 0.0;
      std::vector<double> terms(m);
      for (std::size_t l = 0; l < m; ++l) {
        terms[l] = bary[l] / (t - local_[l]);
        denom += terms[l];
      }
      for (std::size_t l = 0; l < m; ++l)
        cumulative_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) += half * gw[q] * terms[l] / denom;
    }
  }

  nodes_.resize(size());
  for (std::size_t c = 0; c < panels_; ++c) {
    const double a = static_cast<double>(c) * width_;
    for (std::size_t i = 0; i < m; ++i) nodes_[c * m + i] = a + 0.5 * width_ * (local_[i] + 1.0);
  }
  nodes_.back() = grid.gamma();
}

std::size_t PanelQuadrature::panels_for_rate(const Grid& grid, double rate) {
  const double cells = std::ceil(std::max(rate, 0.0) * grid.step());
  return std::max<std::size_t>(1, static_cast<std::size_t>(cells));
}

void PanelQuadrature::volterra(const std::vector<cplx>& f, cplx k, std::vector<cplx>& k_out,
                               std::vector<cplx>& j_out) const {
  const std::size_t m = order_;
  if (f.size() != size()) throw ValidationError("panel quadrature: sample count mismatch");
  k_out.assign(size(), 0.0);
  j_out.assign(size(), 0.0);

  const cplx two_ik = cplx(0.0, 2.0) * k;
  auto kernel = [&](double tau) { return tau * expm1_over(two_ik * tau); };

  Eigen::MatrixXcd wk(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  Eigen::MatrixXd wj = 0.5 * width_ * cumulative_;
  std::vector<cplx> shift(m), carry(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double ti = 0.5 * width_ * (local_[i] + 1.0);
    for (std::size_t l = 0; l < m; ++l) {
      const double sl = 0.5 * width_ * (local_[l] + 1.0);
      wk(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) =
          wj(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) * kernel(sl - ti);
    }
    const double b = width_ - ti;
    shift[i] = std::exp(two_ik * b);
    carry[i] = kernel(b);
  }

  cplx k_tail = 0.0, j_tail = 0.0;
  for (std::size_t c = panels_; c-- > 0;) {
    const std::size_t base = c * m;
    for (std::size_t i = 0; i < m; ++i) {
      cplx lk = 0.0, lj = 0.0;
      for (std::size_t l = 0; l < m; ++l) {
        const cplx fl = f[base + l];
        lk += wk(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) * fl;
        lj += wj(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) * fl;
      }
      k_out[base + i] = lk + shift[i] * k_tail + carry[i] * j_tail;
      j_out[base + i] = lj + j_tail;
    }
    k_tail = k_out[base];
    j_tail = j_out[base];
  }
}

namespace {
thread_local bool in_parallel_region = false;
}

std::size_t thread_count() {
  std::size_t hw = std::max<unsigned>(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("EDSLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return std::min<std::size_t>(static_cast<std::size_t>(v), std::max<std::size_t>(hw, 1));
  }
  return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(thread_count(), n);
  if (workers <= 1 || in_parallel_region) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&]() {
    in_parallel_region = true;
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
    in_parallel_region = false;
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 0; t + 1 < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

double mod_pi(double angle) {
  double r = std::fmod(angle, pi);
  if (r < 0.0) r += pi;
  if (r >= pi - 1e-15 * std::max(1.0, std::abs(angle))) r = 0.0;
  return r;
}

double mod_2pi(double angle) {
  const double two_pi = 2.0 * pi;
  double r = std::fmod(angle, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi - 1e-15 * std::max(1.0, std::abs(angle))) r = 0.0;
  return r;
}

}  // namespace edslab
