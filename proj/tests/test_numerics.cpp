#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "edslab/numerics.hpp"

#include <atomic>
#include <random>

using namespace edslab;

TEST_CASE("grid and interpolation") {
  const Grid g(2.0, 5);
  CHECK(g.x(0) == 0.0);
  CHECK(g.x(4) == 2.0);
  CHECK(g.step() == doctest::Approx(0.5));
  const GridFunction f = GridFunction::sample(g, [](double x) { return cplx(x, -x); });
  CHECK(std::abs(f(0.75) - cplx(0.75, -0.75)) < 1e-15);
  CHECK(f(-0.1) == cplx(0.0));
  CHECK(f(2.1) == cplx(0.0));
  CHECK_THROWS_AS(Grid(1.0, 1), ValidationError);
  CHECK_THROWS_AS(Grid(-1.0, 3), ValidationError);
}

TEST_CASE("integrate") {
  const Grid g(1.0, 11);
  CHECK(integrate(GridFunction::sample(g, [](double) { return cplx(1.0); }), 0.0, 1.0).real() == doctest::Approx(1.0));
  CHECK(integrate(GridFunction::sample(g, [](double x) { return cplx(x); }), 0.0, 1.0).real() == doctest::Approx(0.5));

  const Grid fine(1.0, 2001);
  const GridFunction e = GridFunction::sample(fine, [](double x) { return std::exp(cplx(0.0, 2.0 * x)); });
  const cplx exact = (std::exp(cplx(0.0, 2.0)) - 1.0) / cplx(0.0, 2.0);
  CHECK(std::abs(integrate(e, 0.0, 1.0) - exact) <= 1e-6);

  CHECK_THROWS_AS(integrate(e, 0.6, 0.2), ValidationError);

  SUBCASE("linear and additive") {
    const GridFunction a = GridFunction::sample(g, [](double x) { return cplx(std::sin(3 * x), x * x); });
    const GridFunction b = GridFunction::sample(g, [](double x) { return cplx(std::cos(x), 1.0); });
    std::vector<cplx> c(g.size());
    for (std::size_t j = 0; j < c.size(); ++j) c[j] = 2.0 * a[j] - cplx(0, 3) * b[j];
    const cplx lhs = integrate(GridFunction(g, c), 0.0, 1.0);
    const cplx rhs = 2.0 * integrate(a, 0.0, 1.0) - cplx(0, 3) * integrate(b, 0.0, 1.0);
    CHECK(std::abs(lhs - rhs) < 1e-14);
    CHECK(std::abs(integrate(a, 0.0, 0.37) + integrate(a, 0.37, 1.0) - integrate(a, 0.0, 1.0)) < 1e-14);
  }
}

TEST_CASE("tail integrals and aligned steps") {
  const Grid g(1.0, 101);
  const auto t = tail_integrals(GridFunction::sample(g, [](double) { return cplx(2.0); }));
  CHECK(t.front().real() == doctest::Approx(2.0));
  CHECK(t.back() == cplx(0.0));
  CHECK(aligned_steps(g, 0.0) % 100 == 0);
  CHECK(aligned_steps(g, 0.0) >= 4096);
  CHECK(aligned_steps(g, 100.0) >= 10000);
}

TEST_CASE("solve_linear_ode") {
  SUBCASE("zero field") {
    OdeState<2> y0;
    y0 << 1.0, 0.0;
    const auto tr = solve_linear_ode<2>([](double) { return OdeMatrix<2>::Zero().eval(); }, 0.0, 1.0, y0, 10);
    CHECK(tr.y.size() == 11);
    for (const auto& y : tr.y) CHECK((y - y0).norm() == 0.0);
  }
  SUBCASE("exponential") {
    const double k = 2.0;
    auto field = [k](double) {
      OdeMatrix<1> a;
      a << cplx(0.0, k);
      return a;
    };
    OdeState<1> y0;
    y0 << std::exp(cplx(0.0, k));
    const auto tr = solve_linear_ode<1>(field, 1.0, 0.0, y0, 10000, false);
    CHECK(std::abs(tr.final_state(0) - 1.0) <= 1e-8);

    const double e1 = std::abs(solve_linear_ode<1>(field, 1.0, 0.0, y0, 20, false).final_state(0) - 1.0);
    const double e2 = std::abs(solve_linear_ode<1>(field, 1.0, 0.0, y0, 40, false).final_state(0) - 1.0);
    CHECK(e1 / e2 >= 12.0);
  }
  SUBCASE("matrix exponential") {
    const cplx k(1.3, 0.2);
    const double c = 0.8;
    OdeMatrix<2> m;
    m << cplx(0, 1) * k, -c, -c, -cplx(0, 1) * k;
    const cplx mu = std::sqrt(c * c - k * k);
    OdeState<2> y0;
    y0 << 1.0, 0.5;
    const auto tr = solve_linear_ode<2>([&](double) { return m; }, 0.0, 1.0, y0, 2000, false);
    const OdeMatrix<2> e = std::cosh(mu) * OdeMatrix<2>::Identity() + (std::sinh(mu) / mu) * m;
    CHECK((tr.final_state - e * y0).norm() < 1e-10);
  }
  SUBCASE("non-finite field") {
    auto bad = [](double) {
      OdeMatrix<1> a;
      a << cplx(std::nan(""), 0.0);
      return a;
    };
    OdeState<1> y0;
    y0 << 1.0;
    CHECK_THROWS_AS(solve_linear_ode<1>(bad, 0.0, 1.0, y0, 4), NumericalError);
    CHECK_THROWS_AS(solve_linear_ode<1>(bad, 0.0, 1.0, y0, 0), ValidationError);
  }
}

TEST_CASE("solve_dense") {
  Eigen::VectorXcd b(3);
  b << cplx(1, 2), 3.0, cplx(0, -1);
  CHECK((solve_dense(Eigen::MatrixXcd::Identity(3, 3), b) - b).norm() == 0.0);

  Eigen::MatrixXcd d(2, 2);
  d << 2.0, 0.0, 0.0, 4.0;
  Eigen::VectorXcd rhs(2);
  rhs << 2.0, 4.0;
  const Eigen::VectorXcd x = solve_dense(d, rhs);
  CHECK(std::abs(x(0) - 1.0) < 1e-15);
  CHECK(std::abs(x(1) - 1.0) < 1e-15);

  std::mt19937 rng(3);
  std::normal_distribution<double> n01;
  Eigen::MatrixXcd a(50, 50);
  Eigen::VectorXcd r(50);
  for (int i = 0; i < 50; ++i) {
    r(i) = cplx(n01(rng), n01(rng));
    for (int j = 0; j < 50; ++j) a(i, j) = cplx(n01(rng), n01(rng)) + (i == j ? 10.0 : 0.0);
  }
  const Eigen::VectorXcd y = solve_dense(a, r);
  const double na = a.cwiseAbs().rowwise().sum().maxCoeff();
  CHECK((a * y - r).cwiseAbs().maxCoeff() <= 1e-10 * (na * y.cwiseAbs().maxCoeff() + r.cwiseAbs().maxCoeff()));

  Eigen::MatrixXcd s(2, 2);
  s << 1.0, 2.0, 2.0, 4.0;
  CHECK_THROWS_AS(solve_dense(s, rhs), NumericalError);
  CHECK_THROWS_AS(solve_dense(s, b), ValidationError);
}

TEST_CASE("expm1_over") {
  CHECK(std::abs(expm1_over(0.0) - 1.0) == 0.0);
  CHECK(std::abs(expm1_over(cplx(1e-9, 2e-9)) - (1.0 + cplx(1e-9, 2e-9) / 2.0)) < 1e-16);
  const cplx z(0.7, -1.1);
  CHECK(std::abs(expm1_over(z) - (std::exp(z) - 1.0) / z) < 1e-15);
}

TEST_CASE("panel quadrature Volterra operators") {
  const Grid g(1.5, 7);
  const PanelQuadrature quad(g, 3);
  const auto& t = quad.nodes();
  std::vector<cplx> ones(t.size(), 1.0), kk, jj;
  for (cplx k : {cplx(0.0), cplx(3.0, 0.5), cplx(-2.0, -1.0)}) {
    quad.volterra(ones, k, kk, jj);
    for (std::size_t i = 0; i < t.size(); i += 5) {
      const double len = g.gamma() - t[i];
      CHECK(std::abs(jj[i] - len) < 1e-13);
      // \int_0^L (e^{2ik tau} - 1)/(2ik) d tau, with the k = 0 limit L^2/2.
      const cplx exact = (k == 0.0) ? cplx(0.5 * len * len)
                                    : ((std::exp(cplx(0, 2) * k * len) - 1.0) / (cplx(0, 2) * k) - len) / (cplx(0, 2) * k);
      CHECK(std::abs(kk[i] - exact) < 1e-12);
    }
  }
}

TEST_CASE("angle reduction and parallel_for") {
  CHECK(mod_pi(-0.25) == doctest::Approx(pi - 0.25));
  CHECK(mod_pi(pi) == 0.0);
  CHECK(mod_pi(7.0) == doctest::Approx(7.0 - 2 * pi));
  CHECK(mod_2pi(-pi / 2) == doctest::Approx(1.5 * pi));
  CHECK(mod_2pi(2 * pi) == 0.0);

  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK(thread_count() >= 1);
}
