#pragma once

#include "edslab/dirac.hpp"

namespace edslab {

/// A class-Q potential, its Dirac image v = (-u + ip) e^{-2i phi}, and the phase phi.
struct TransformPair {
  PotentialQ pq;
  DiracPotential v;
  GridFunction phi;
};

struct BoundaryTriple {
  double alpha = 0.0;
  double delta = 0.0;
  double beta = 0.0;  // 0 or pi
};

TransformPair t_forward(const PotentialQ& pq);

/// Inverse transform: phi from the phase IVP with phi(gamma) = 0, then
/// p = Im(v e^{2i phi}) and u = -Re(v e^{2i phi}) at every node.
TransformPair t_inverse(const DiracPotential& v);

/// Solution of theta' = -Im(v e^{2i theta}) with theta(gamma) = terminal, marched
/// backward by the implicit trapezoid rule on the grid of v. The nodal values
/// satisfy theta_j = theta_{j+1} + (h/2)(p_j + p_{j+1}) with p = Im(v e^{2i theta}),
/// so theta - terminal is exactly the trapezoid phase of p. Requires h*max|v| < 1.
GridFunction phase_ivp(const GridFunction& v, double terminal);

/// delta in [0, pi) and beta in {0, pi} with phi0 + alpha + delta = pi/2 + beta (mod 2 pi).
BoundaryTriple boundary_map(double alpha, double phi0);

/// psi_alpha(k) = i e^{i beta} k psi_delta(k, v), with v = T(pq) and (delta, beta) from boundary_map.
cplx jost_q(const PotentialQ& pq, double alpha, cplx k);

/// Same value from the Dirac Jost solution mapped back to (y, y^{[1]}/k) at x = 0. Needs k != 0.
cplx jost_q_secondary(const PotentialQ& pq, double alpha, cplx k);

/// psi_alpha(k) = y^{[1]}(0) sin(alpha) + k y(0) cos(alpha) by RK4 on the quasi-derivative
/// system y' = u y + y^{[1]}, (y^{[1]})' = -u y^{[1]} + (2kp - k^2) y. steps = 0 picks aligned_steps.
cplx jost_q_direct(const PotentialQ& pq, double alpha, cplx k, std::size_t steps = 0);

/// S_alpha(k) = conj(psi_alpha(k)) / psi_alpha(k) on real k, with the k factor cancelled
/// analytically so k = 0 is admissible.
ScatteringTable scattering_q(const PotentialQ& pq, double alpha, const std::vector<double>& k_grid);

}  // namespace edslab
