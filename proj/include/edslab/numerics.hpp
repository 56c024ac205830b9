#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace edslab {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

/// Bad input: malformed potentials, out-of-range parameters, reversed bounds.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation that could not produce a trustworthy number.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform grid x_j = j*gamma/(n-1) on [0, gamma].
class Grid {
 public:
  Grid(double gamma, std::size_t n);

  double gamma() const { return gamma_; }
  std::size_t size() const { return n_; }
  double step() const { return gamma_ / static_cast<double>(n_ - 1); }
  double x(std::size_t j) const;

  bool operator==(const Grid& other) const { return gamma_ == other.gamma_ && n_ == other.n_; }

 private:
  double gamma_;
  std::size_t n_;
};

/// Complex samples on a Grid, linearly interpolated, identically zero off [0, gamma].
class GridFunction {
 public:
  GridFunction(Grid grid, std::vector<cplx> values);

  static GridFunction zeros(const Grid& grid);
  static GridFunction sample(const Grid& grid, const std::function<cplx(double)>& f);

  const Grid& grid() const { return grid_; }
  const std::vector<cplx>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  cplx operator[](std::size_t j) const { return values_[j]; }

  /// Linear interpolation; 0 outside [0, gamma].
  cplx operator()(double x) const;

  double max_abs() const;
  bool is_real(double tol = 0.0) const;

 private:
  Grid grid_;
  std::vector<cplx> values_;
};

/// Trapezoid rule for the integral of f over [a, b]; exact for piecewise-linear f.
cplx integrate(const GridFunction& f, double a, double b);

/// Nodal values of the tail integral from x_j to gamma by the trapezoid rule.
std::vector<cplx> tail_integrals(const GridFunction& f);

/// RK4 step count for a Jost-type integration over a grid: at least `base`
/// and 100 steps per unit of |k|*gamma, rounded up to a multiple of n-1 so
/// that every potential node is a step boundary.
std::size_t aligned_steps(const Grid& grid, cplx k, std::size_t base = 4096);

template <int N>
using OdeState = Eigen::Matrix<cplx, N, 1>;

template <int N>
using OdeMatrix = Eigen::Matrix<cplx, N, N>;

template <int N>
struct OdeTrajectory {
  std::vector<double> x;
  std::vector<OdeState<N>> y;
  OdeState<N> final_state;
};

namespace detail {
template <class M>
bool all_finite(const M& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const cplx z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}
}  // namespace detail

/// Classical fixed-step RK4 for y' = A(x) y from x_start to x_end (either
/// direction). `field` maps x to A(x). The trajectory is stored only when
/// `keep_trajectory` is set; the final state is always returned.
template <int N, class Field>
OdeTrajectory<N> solve_linear_ode(const Field& field, double x_start, double x_end,
                                  const OdeState<N>& y0, std::size_t steps,
                                  bool keep_trajectory = true) {
  if (steps < 1) throw ValidationError("solve_linear_ode: steps must be >= 1");
  const double h = (x_end - x_start) / static_cast<double>(steps);
  OdeTrajectory<N> out;
  if (keep_trajectory) {
    out.x.reserve(steps + 1);
    out.y.reserve(steps + 1);
    out.x.push_back(x_start);
    out.y.push_back(y0);
  }
  OdeState<N> y = y0;
  auto eval = [&](double x) {
    OdeMatrix<N> a = field(x);
    if (!detail::all_finite(a)) throw NumericalError("solve_linear_ode: non-finite field value");
    return a;
  };
  OdeMatrix<N> a0 = eval(x_start);
  for (std::size_t s = 0; s < steps; ++s) {
    const double x = x_start + h * static_cast<double>(s);
    const double x1 = (s + 1 == steps) ? x_end : x + h;
    const OdeMatrix<N> am = eval(x + 0.5 * h);
    const OdeMatrix<N> a1 = eval(x1);
    const OdeState<N> k1 = a0 * y;
    const OdeState<N> k2 = am * (y + (0.5 * h) * k1);
    const OdeState<N> k3 = am * (y + (0.5 * h) * k2);
    const OdeState<N> k4 = a1 * (y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    a0 = a1;
    if (keep_trajectory) {
      out.x.push_back(x1);
      out.y.push_back(y);
    }
  }
  if (!detail::all_finite(y)) throw NumericalError("solve_linear_ode: state overflowed");
  out.final_state = y;
  return out;
}

/// Dense complex solve by partial-pivot LU. Throws NumericalError when a
/// pivot falls below 1e-14 * ||A||.
Eigen::VectorXcd solve_dense(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& b);

/// (e^z - 1)/z, accurate near z = 0.
cplx expm1_over(cplx z);

/// Piecewise Chebyshev-Lobatto collocation over a Grid, used for Volterra
/// operators with the kernels G(t-x,k) = (e^{2ik(t-x)}-1)/(2ik) and 1.
/// Every grid cell is split into `panels_per_cell` equal panels of `order`
/// nodes; panel endpoints coincide with grid nodes, so piecewise-linear data
/// are polynomial on every panel.
class PanelQuadrature {
 public:
  PanelQuadrature(const Grid& grid, std::size_t panels_per_cell, std::size_t order = 12);

  /// Panels needed to resolve oscillation rate `rate` (per unit length).
  static std::size_t panels_for_rate(const Grid& grid, double rate);

  std::size_t panels() const { return panels_; }
  std::size_t order() const { return order_; }
  std::size_t size() const { return panels_ * order_; }
  const std::vector<double>& nodes() const { return nodes_; }

  /// Node index of the left end of the panel grid (x = 0).
  std::size_t origin() const { return 0; }

  /// Returns K(x) = \int_x^gamma G(t-x,k) f(t) dt and J(x) = \int_x^gamma f(t) dt at every node.
  void volterra(const std::vector<cplx>& f, cplx k, std::vector<cplx>& k_out,
                std::vector<cplx>& j_out) const;

 private:
  Grid grid_;
  std::size_t panels_;
  std::size_t order_;
  double width_;
  std::vector<double> nodes_;
  std::vector<double> local_;       // reference nodes on [-1, 1]
  Eigen::MatrixXd cumulative_;      // C(i,l) = \int_{tau_i}^{1} L_l(tau) dtau
};

/// Number of worker threads: EDSLAB_THREADS if set (>= 1), else hardware concurrency.
std::size_t thread_count();

/// Runs body(i) for i in [0, n), possibly on several threads. Nested calls run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Canonical reduction of an angle into [0, pi).
double mod_pi(double angle);

/// Canonical reduction of an angle into [0, 2*pi).
double mod_2pi(double angle);

}  // namespace edslab
