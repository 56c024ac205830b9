#pragma once

#include "edslab/potentials.hpp"

#include <utility>

namespace edslab {

/// Off-diagonal Dirac potential Q = [[0, v], [conj v, 0]] on [0, gamma].
class DiracPotential {
 public:
  explicit DiracPotential(GridFunction v);

  const GridFunction& v() const { return v_; }
  const Grid& grid() const { return v_.grid(); }
  double gamma() const { return v_.grid().gamma(); }

  /// The potential c * v (c any complex constant).
  DiracPotential scaled(cplx c) const;
  /// The potential c * conj(v).
  DiracPotential conj_scaled(cplx c) const;

 private:
  GridFunction v_;
};

/// Boundary parameter of e^{-i alpha} w1(0) - e^{i alpha} w2(0) = 0, kept in [0, pi).
struct DiracBoundary {
  double alpha = 0.0;
  DiracBoundary() = default;
  explicit DiracBoundary(double a) : alpha(mod_pi(a)) {}
};

struct ScatteringTable {
  std::vector<double> k;
  std::vector<cplx> s;
  double alpha = 0.0;
  double gamma = 1.0;
};

struct GlmKernel {
  std::vector<double> s;
  std::vector<cplx> f;
  double alpha_eff = 0.0;
  /// max |F| over samples with s < -gamma (ideally 0).
  double leakage = 0.0;
};

struct HKernel {
  std::vector<double> s;
  std::vector<cplx> h;
  double tail_estimate = 0.0;
};

/// Jost solution of w' = (i k sigma3 - Q) w with w = (e^{ikx}, 0) for x >= gamma,
/// returned at x = 0 as (y1, y2). steps = 0 picks aligned_steps(grid, k).
std::pair<cplx, cplx> dirac_jost(const DiracPotential& v, cplx k, std::size_t steps = 0);

/// psi_alpha(k) = e^{-i alpha} y1(0,k) - e^{i alpha} y2(0,k).
cplx dirac_jost_function(const DiracPotential& v, const DiracBoundary& bc, cplx k);

/// S(k) = conj(psi_alpha(k)) / psi_alpha(k) on real k.
ScatteringTable dirac_scattering(const DiracPotential& v, const DiracBoundary& bc,
                                 const std::vector<double>& k_grid);

/// Continuation of S off the real axis: conj(psi(conj k)) / psi(k).
cplx dirac_scattering_continued(const DiracPotential& v, const DiracBoundary& bc, cplx k);

/// Both sides of conj(psi_alpha(-conj k, v)) = e^{2i alpha} psi_alpha(k, e^{4i alpha} conj v).
std::pair<cplx, cplx> conjugation_check(const DiracPotential& v, const DiracBoundary& bc, cplx k);

/// h(s) = (1/pi) \int_{-K}^{K} (psi_alpha(k) - e^{-i alpha}) e^{-2iks} dk.
/// Throws NumericalError when |psi - e^{-i alpha}| at |k| = K exceeds 10 * tol.
HKernel extract_h(const DiracPotential& v, const DiracBoundary& bc, const std::vector<double>& s_grid,
                  double k_max, double tol = 1e-3);

/// Uniform real k-grid adequate for Fourier inversion over supports of length ~gamma.
std::vector<double> fourier_k_grid(double gamma, double k_max);

/// F(s) = (1/pi) \int (S(k) - e^{2i alpha_eff}) e^{-2iks} dk over the table.
GlmKernel scattering_to_F(const ScatteringTable& table, const std::vector<double>& s_grid);

/// Solves the GLM system at every grid node and returns the reconstructed potential.
DiracPotential glm_reconstruct(const GlmKernel& kernel, const Grid& grid);

}  // namespace edslab
