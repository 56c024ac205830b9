#pragma once

#include "edslab/dirac.hpp"

#include <functional>
#include <string>

namespace edslab {

using ComplexFunction = std::function<cplx(cplx)>;

struct Rect {
  double re_min = 0.0;
  double re_max = 0.0;
  double im_min = 0.0;
  double im_max = 0.0;

  double width() const { return re_max - re_min; }
  double height() const { return im_max - im_min; }
  bool contains(cplx z, double margin = 0.0) const {
    return z.real() >= re_min - margin && z.real() <= re_max + margin && z.imag() >= im_min - margin &&
           z.imag() <= im_max + margin;
  }
};

struct Zero {
  cplx k;
  int multiplicity = 1;
  bool converged = true;  // false: Newton failed and k is the enclosing cell center
};

struct ResonanceList {
  std::vector<Zero> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
  int total_multiplicity() const;
};

/// Argument principle on the boundary of rect. The boundary is refined
/// adaptively until consecutive phase steps are below pi/2 and no step is
/// longer than max_spacing. On a suspected boundary zero the rect is dilated
/// by 1e-6 of its size, up to 3 times, before a NumericalError is raised.
int winding_count(const ComplexFunction& f, const Rect& rect, std::size_t samples_per_edge = 32,
                  double max_spacing = 0.25);

struct ZeroSearchOptions {
  double tol = 1e-9;
  /// Longest boundary step used by the contour counts.
  double max_spacing = 0.25;
};

/// All zeros of f inside rect by quadrisection with argument-principle counts and
/// Newton refinement. The sum of multiplicities equals the winding count of rect.
ResonanceList find_zeros(const ComplexFunction& f, const Rect& rect, const ZeroSearchOptions& options);
ResonanceList find_zeros(const ComplexFunction& f, const Rect& rect, double tol);

/// Arrangement: |k| nondecreasing; |k| ties (1e-12 relative) by Re k, then Im k.
ResonanceList order_list(ResonanceList list);

/// (ordered list, ordered reflection -conj(r_n)).
std::pair<ResonanceList, ResonanceList> order_and_reflect(const ResonanceList& list);

/// Sum of multiplicities with |k| <= r.
int counting_function(const ResonanceList& list, double r);

/// Largest distance in a one-to-one matching of equal-multiplicity entries, or
/// +infinity when no matching exists (different totals or unmatched entries).
double list_distance(const ResonanceList& a, const ResonanceList& b);

inline bool lists_match(const ResonanceList& a, const ResonanceList& b, double tol) {
  return list_distance(a, b) <= tol;
}

struct BoundCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = true;
};

struct BoundReport {
  std::vector<BoundCheck> checks;
  /// Extra reported numbers (fitted constants, counts).
  std::vector<std::pair<std::string, double>> notes;

  void add(std::string name, double lhs, double rhs);
  bool all_pass() const;
};

/// Eigenvalue and resonance bounds for class P with the Dirichlet condition:
/// |k_o| <= C1 (1 + e^{2|p|_1}); 0 <= Im k_o <= (gamma/2)(|q|_2 + 2|p|_2)^4 when |k_o| >= 1;
/// p_- <= Re k_o <= p_+ for real data; |r_o| <= C1 e^{C2 + 2 gamma |Im r_o|}.
BoundReport verify_bounds_p(const PotentialP& pot, const ResonanceList& eigenvalues,
                            const ResonanceList& resonances);

/// Counting bound N(r) <= (4 gamma / (pi log 2)) r + c3 for r = 1, ..., floor(r_max), the
/// fitted forbidden-domain constant C = max |r| (e^{2 gamma Im r} - eps)_+, and the check
/// that entries in the strip 0 > Im z > ln(2 eps) / (2 gamma) satisfy |r| <= C / eps.
BoundReport verify_counting_and_forbidden(double gamma, double c3, const ResonanceList& zeros, double eps,
                                          double r_max);
BoundReport verify_counting_and_forbidden(const PotentialP& pot, const ResonanceList& zeros, double eps,
                                          double r_max);

/// C = max over entries of |r| (e^{2 gamma Im r} - eps), floored at 0.
double forbidden_constant(const ResonanceList& zeros, double gamma, double eps);

/// Total continuous phase increment of S over the table divided by 2 pi, rounded.
int winding_index_S(const ScatteringTable& table);

}  // namespace edslab
