#pragma once

#include "edslab/resonances.hpp"
#include "edslab/transform.hpp"

namespace edslab {

/// One member (p_delta, u_delta, alpha_delta) of the isoresonance family of a base potential.
struct IsoMember {
  PotentialQ pq;
  double alpha = 0.0;
  double delta = 0.0;
  GridFunction theta;
};

/// theta' = -Im v_o cos 2theta - Re v_o sin 2theta, theta(gamma) = delta, on the grid of v_o.
GridFunction theta_solve(const DiracPotential& v_o, double delta);

/// p_delta = Im(v_o e^{2i theta_delta}), u_delta = -Re(v_o e^{2i theta_delta}),
/// alpha_delta = alpha_o + theta_o(0) - theta_delta(0) mod pi.
IsoMember iso_member(const PotentialQ& pq_o, double alpha_o, double delta);

struct DirichletReduction {
  IsoMember member;  // xi_alpha(pq), with member.alpha = 0
  double phi_alpha = 0.0;
};

/// Finds delta' in [0, pi) with alpha_{delta'} = 0 by bisection on the increasing map
/// delta -> theta_delta(0). Returns the member and phi_alpha = delta'.
DirichletReduction reduce_to_dirichlet(const PotentialQ& pq, double alpha);

/// Max deviations of S_{alpha_delta}(member) = e^{2i delta} S_{alpha_o}(base) on k_grid (tolerance
/// 1e-6) and of the Dirac identity psi_{a+delta}(e^{2i delta} v) = e^{-i delta} psi_a(v) (tolerance 1e-8).
BoundReport verify_iso_scattering(const PotentialQ& pq_o, double alpha_o, double delta,
                                  const std::vector<double>& k_grid);

}  // namespace edslab
