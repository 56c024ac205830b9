#pragma once

#include "edslab/numerics.hpp"

namespace edslab {

struct NormSet {
  double l1 = 0.0;
  double l2 = 0.0;
  double weighted = 0.0;
};

struct ConstantSet {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 3.0;
  double p_plus = 0.0;
  double p_minus = 0.0;
};

/// Energy-dependent potential V(x,k) = q(x) + 2k p(x) with p, q complex on [0, gamma].
class PotentialP {
 public:
  PotentialP(GridFunction p, GridFunction q);

  const GridFunction& p() const { return p_; }
  const GridFunction& q() const { return q_; }
  const Grid& grid() const { return p_.grid(); }
  double gamma() const { return p_.grid().gamma(); }

  /// Cellwise derivative of the interpolated p on (0, gamma); n-1 values.
  const std::vector<cplx>& dp() const { return dp_; }

  bool is_real() const { return p_.is_real() && q_.is_real(); }

 private:
  GridFunction p_;
  GridFunction q_;
  std::vector<cplx> dp_;
};

/// Miura-class potential: real p and u with q = u' + u^2 kept implicit.
class PotentialQ {
 public:
  PotentialQ(GridFunction p, GridFunction u);

  const GridFunction& p() const { return p_; }
  const GridFunction& u() const { return u_; }
  const Grid& grid() const { return p_.grid(); }
  double gamma() const { return p_.grid().gamma(); }

 private:
  GridFunction p_;
  GridFunction u_;
};

/// Checks that |a| + |b| has its last sample above 1e-12 of its maximum
/// (support ends at gamma). An identically zero pair passes.
void check_support(const GridFunction& a, const GridFunction& b, const char* what);

NormSet norms(const GridFunction& f);

ConstantSet constants_p(const PotentialP& pot);

/// phi(x) = \int_x^gamma p, phi(gamma) = 0.
GridFunction phase(const GridFunction& p);

/// q = u' + u^2 with central differences inside and one-sided ones at the ends.
GridFunction miura_forward(const GridFunction& u);

}  // namespace edslab
