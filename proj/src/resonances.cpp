#include "edslab/resonances.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <limits>
#include <map>
#include <unordered_map>

namespace edslab {

int ResonanceList::total_multiplicity() const {
  int s = 0;
  for (const Zero& z : entries) s += z.multiplicity;
  return s;
}

namespace {

struct BoundaryZero {};

struct PointHash {
  std::size_t operator()(const std::pair<double, double>& p) const {
    std::uint64_t a, b;
    std::memcpy(&a, &p.first, sizeof a);
    std::memcpy(&b, &p.second, sizeof b);
    return std::hash<std::uint64_t>()(a * 0x9E3779B97F4A7C15ULL ^ b);
  }
};

// Memoized contour machinery shared by all cells of one search.
class Contour {
 public:
  Contour(const ComplexFunction& f, std::size_t samples, double max_spacing)
      : f_(f), samples_(std::max<std::size_t>(samples, 2)), max_spacing_(max_spacing) {}

  cplx value(cplx z) {
    const std::pair<double, double> key{z.real(), z.imag()};
    auto it = values_.find(key);
    if (it != values_.end()) return it->second;
    const cplx w = f_(z);
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
      throw NumericalError("winding_count: non-finite function value on the contour");
    values_.emplace(key, w);
    return w;
  }

  // Phase increment of f along the straight segment a -> b.
  double edge(cplx a, cplx b) {
    const bool swap = std::make_pair(b.real(), b.imag()) < std::make_pair(a.real(), a.imag());
    const cplx lo = swap ? b : a;
    const cplx hi = swap ? a : b;
    const std::array<double, 4> key{lo.real(), lo.imag(), hi.real(), hi.imag()};
    auto it = edges_.find(key);
    double total;
    if (it != edges_.end()) {
      total = it->second;
    } else {
      const double len = std::abs(hi - lo);
      const std::size_t n =
          std::max(samples_, static_cast<std::size_t>(std::ceil(len / max_spacing_)));
      total = 0.0;
      cplx prev_z = lo;
      cplx prev_f = checked(lo);
      for (std::size_t i = 1; i <= n; ++i) {
        const cplx z = (i == n) ? hi : lo + (hi - lo) * (static_cast<double>(i) / static_cast<double>(n));
        const cplx fz = checked(z);
        total += refine(prev_z, prev_f, z, fz, 0);
        prev_z = z;
        prev_f = fz;
      }
      edges_.emplace(key, total);
    }
    return swap ? -total : total;
  }

  int winding(const Rect& r) {
    const cplx c0(r.re_min, r.im_min), c1(r.re_max, r.im_min), c2(r.re_max, r.im_max), c3(r.re_min, r.im_max);
    const double total = edge(c0, c1) + edge(c1, c2) + edge(c2, c3) + edge(c3, c0);
    const double turns = total / (2.0 * pi);
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) > 0.25) throw BoundaryZero{};
    return static_cast<int>(rounded);
  }

 private:
  cplx checked(cplx z) {
    const cplx w = value(z);
    if (std::abs(w) <= 1e-12) throw BoundaryZero{};
    return w;
  }

  double refine(cplx a, cplx fa, cplx b, cplx fb, int depth) {
    const double d = std::arg(fb / fa);
    if (std::abs(d) < pi / 2.0) return d;
    if (depth > 40 || std::abs(b - a) <= 1e-12 * (1.0 + std::abs(a))) throw BoundaryZero{};
    const cplx m = 0.5 * (a + b);
    const cplx fm = checked(m);
    return refine(a, fa, m, fm, depth + 1) + refine(m, fm, b, fb, depth + 1);
  }

  const ComplexFunction& f_;
  std::size_t samples_;
  double max_spacing_;
  std::unordered_map<std::pair<double, double>, cplx, PointHash> values_;
  std::map<std::array<double, 4>, double> edges_;
};

Rect dilate(const Rect& r, int attempt) {
  const double d = 1e-6 * attempt * std::max(r.width(), r.height());
  return Rect{r.re_min - d, r.re_max + d, r.im_min - d, r.im_max + d};
}

// Winding over rect, dilating on a suspected boundary zero. Returns the rect used.
std::pair<int, Rect> robust_winding(Contour& c, const Rect& rect) {
  for (int attempt = 0; attempt <= 3; ++attempt) {
    const Rect r = dilate(rect, attempt);
    try {
      return {c.winding(r), r};
    } catch (const BoundaryZero&) {
    }
  }
  throw NumericalError("winding_count: zero on or near the contour; perturb the search rectangle");
}

void check_rect(const Rect& r) {
  if (!(r.re_max > r.re_min) || !(r.im_max > r.im_min)) throw ValidationError("search rectangle is empty");
}

struct NewtonResult {
  cplx z;
  bool converged = false;
};

NewtonResult newton(const ComplexFunction& f, cplx z, int multiplicity, double tol, const Rect& leash) {
  double last = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 60; ++it) {
    const cplx fz = f(z);
    if (fz == 0.0) return {z, true};
    const double hs = 1e-6 * std::max(1.0, std::abs(z));
    const cplx df = (f(z + hs) - f(z - hs)) / (2.0 * hs);
    if (df == 0.0 || !std::isfinite(std::abs(df))) return {z, false};
    const cplx dz = static_cast<double>(multiplicity) * fz / df;
    z -= dz;
    if (!leash.contains(z)) return {z, false};
    const double s = std::abs(dz);
    if (s <= 1e-3 * tol || s <= 4e-16 * std::abs(z)) return {z, true};
    // Past the noise floor the steps stop shrinking quadratically.
    if (s <= tol && s > 0.5 * last) return {z, true};
    last = s;
  }
  return {z, last <= tol};
}

}  // namespace

int winding_count(const ComplexFunction& f, const Rect& rect, std::size_t samples_per_edge, double max_spacing) {
  check_rect(rect);
  Contour c(f, samples_per_edge, max_spacing);
  return robust_winding(c, rect).first;
}

ResonanceList find_zeros(const ComplexFunction& f, const Rect& rect, double tol) {
  ZeroSearchOptions o;
  o.tol = tol;
  return find_zeros(f, rect, o);
}

ResonanceList find_zeros(const ComplexFunction& f, const Rect& rect, const ZeroSearchOptions& options) {
  check_rect(rect);
  if (!(options.tol > 0.0)) throw ValidationError("find_zeros: tol must be positive");
  const double tol = options.tol;
  Contour contour(f, 8, options.max_spacing);
  const auto [total, top] = robust_winding(contour, rect);
  if (total < 0) throw NumericalError("find_zeros: negative winding count (function has poles?)");

  std::vector<Zero> found;
  struct Cell {
    Rect r;
    int count;
  };
  std::vector<Cell> stack;
  if (total > 0) stack.push_back({top, total});
  static constexpr std::array<double, 5> offsets{0.5 + 0.0193, 0.5 - 0.0271, 0.5 + 0.0437, 0.5 - 0.0613, 0.5 + 0.0851};

  while (!stack.empty()) {
    const Cell cell = stack.back();
    stack.pop_back();
    const Rect& r = cell.r;
    const cplx center(0.5 * (r.re_min + r.re_max), 0.5 * (r.im_min + r.im_max));
    const double diameter = std::hypot(r.width(), r.height());
    const Rect leash{r.re_min - r.width(), r.re_max + r.width(), r.im_min - r.height(), r.im_max + r.height()};

    if (diameter < tol) {
      const NewtonResult nr = newton(f, center, cell.count, tol, leash);
      found.push_back(Zero{nr.converged && r.contains(nr.z, diameter) ? nr.z : center, cell.count,
                           nr.converged});
      continue;
    }
    if (cell.count == 1 && diameter < 1.0) {
      const NewtonResult nr = newton(f, center, 1, tol, leash);
      if (nr.converged && r.contains(nr.z, 1e-12 * (1.0 + std::abs(nr.z)))) {
        found.push_back(Zero{nr.z, 1, true});
        continue;
      }
    }

    bool split = false;
    for (double frac : offsets) {
      const double xm = r.re_min + frac * r.width();
      const double ym = r.im_min + frac * r.height();
      const std::array<Rect, 4> sub{Rect{r.re_min, xm, r.im_min, ym}, Rect{xm, r.re_max, r.im_min, ym},
                                    Rect{r.re_min, xm, ym, r.im_max}, Rect{xm, r.re_max, ym, r.im_max}};
      std::array<int, 4> counts{};
      try {
        int sum = 0;
        for (std::size_t i = 0; i < 4; ++i) {
          counts[i] = contour.winding(sub[i]);
          if (counts[i] < 0) throw BoundaryZero{};
          sum += counts[i];
        }
        if (sum != cell.count) continue;
      } catch (const BoundaryZero&) {
        continue;
      }
      for (std::size_t i = 0; i < 4; ++i)
        if (counts[i] > 0) stack.push_back({sub[i], counts[i]});
      split = true;
      break;
    }
    if (!split) {
      // Every split line passes through a zero's neighbourhood: report the cell.
      const NewtonResult nr = newton(f, center, cell.count, tol, leash);
      found.push_back(Zero{nr.converged ? nr.z : center, cell.count, false});
    }
  }

  // Merge clusters closer than tol.
  std::vector<Zero> merged;
  for (const Zero& z : found) {
    bool joined = false;
    for (Zero& m : merged) {
      if (std::abs(m.k - z.k) <= tol) {
        const double wm = m.multiplicity, wz = z.multiplicity;
        m.k = (wm * m.k + wz * z.k) / (wm + wz);
        m.multiplicity += z.multiplicity;
        m.converged = m.converged && z.converged;
        joined = true;
        break;
      }
    }
    if (!joined) merged.push_back(z);
  }
  return order_list(ResonanceList{std::move(merged)});
}

ResonanceList order_list(ResonanceList list) {
  auto& e = list.entries;
  std::sort(e.begin(), e.end(), [](const Zero& a, const Zero& b) { return std::abs(a.k) < std::abs(b.k); });
  std::size_t i = 0;
  while (i < e.size()) {
    std::size_t j = i + 1;
    while (j < e.size() &&
           std::abs(e[j].k) - std::abs(e[j - 1].k) <= 1e-12 * std::max(1.0, std::abs(e[j].k)))
      ++j;
    std::sort(e.begin() + static_cast<std::ptrdiff_t>(i), e.begin() + static_cast<std::ptrdiff_t>(j),
              [](const Zero& a, const Zero& b) {
                if (a.k.real() != b.k.real()) return a.k.real() < b.k.real();
                return a.k.imag() < b.k.imag();
              });
    i = j;
  }
  return list;
}

std::pair<ResonanceList, ResonanceList> order_and_reflect(const ResonanceList& list) {
  ResonanceList reflected = list;
  for (Zero& z : reflected.entries) z.k = -std::conj(z.k);
  return {order_list(list), order_list(std::move(reflected))};
}

int counting_function(const ResonanceList& list, double r) {
  if (r < 0.0) throw ValidationError("counting_function: r must be >= 0");
  int n = 0;
  for (const Zero& z : list.entries)
    if (std::abs(z.k) <= r) n += z.multiplicity;
  return n;
}

double list_distance(const ResonanceList& a, const ResonanceList& b) {
  const double inf = std::numeric_limits<double>::infinity();
  if (a.total_multiplicity() != b.total_multiplicity() || a.size() != b.size()) return inf;
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const Zero& z : a.entries) {
    double best = inf;
    std::size_t pick = b.size();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j] || b.entries[j].multiplicity != z.multiplicity) continue;
      const double d = std::abs(b.entries[j].k - z.k);
      if (d < best) {
        best = d;
        pick = j;
      }
    }
    if (pick == b.size()) return inf;
    used[pick] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

void BoundReport::add(std::string name, double lhs, double rhs) {
  checks.push_back(BoundCheck{std::move(name), lhs, rhs, lhs <= rhs + 1e-9});
}

bool BoundReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.pass; });
}

BoundReport verify_bounds_p(const PotentialP& pot, const ResonanceList& eigenvalues,
                            const ResonanceList& resonances) {
  const ConstantSet c = constants_p(pot);
  const NormSet np = norms(pot.p());
  const NormSet nq = norms(pot.q());
  const double gamma = pot.gamma();
  const bool real = pot.is_real();
  BoundReport rep;
  for (const Zero& z : eigenvalues.entries) {
    const cplx k = z.k;
    rep.add("eigenvalue |k| <= C1(1+e^{2|p|_1})", std::abs(k), c.c1 * (1.0 + std::exp(2.0 * np.l1)));
    if (std::abs(k) >= 1.0) {
      rep.add("eigenvalue Im k >= 0", -k.imag(), 0.0);
      rep.add("eigenvalue Im k <= (gamma/2)(|q|_2+2|p|_2)^4", k.imag(),
              0.5 * gamma * std::pow(nq.l2 + 2.0 * np.l2, 4));
    }
    if (real) {
      rep.add("eigenvalue p_- <= Re k", c.p_minus, k.real());
      rep.add("eigenvalue Re k <= p_+", k.real(), c.p_plus);
    }
  }
  for (const Zero& z : resonances.entries) {
    const cplx r = z.k;
    rep.add("resonance |r| <= C1 e^{C2+2 gamma|Im r|}", std::abs(r),
            c.c1 * std::exp(c.c2 + 2.0 * gamma * std::abs(r.imag())));
  }
  rep.notes.emplace_back("C1", c.c1);
  rep.notes.emplace_back("C2", c.c2);
  return rep;
}

double forbidden_constant(const ResonanceList& zeros, double gamma, double eps) {
  double c = 0.0;
  for (const Zero& z : zeros.entries)
    c = std::max(c, std::abs(z.k) * (std::exp(2.0 * gamma * z.k.imag()) - eps));
  return c;
}

BoundReport verify_counting_and_forbidden(double gamma, double c3, const ResonanceList& zeros, double eps,
                                          double r_max) {
  if (!(eps > 0.0) || !(eps < 0.5)) throw ValidationError("eps must lie in (0, 1/2)");
  BoundReport rep;
  const double slope = 4.0 * gamma / (pi * std::log(2.0));
  const int last = static_cast<int>(std::floor(r_max));
  for (int r = 1; r <= last; ++r)
    rep.add("N(" + std::to_string(r) + ") <= (4 gamma/(pi log 2)) r + C3",
            static_cast<double>(counting_function(zeros, r)), slope * r + c3);

  const double c = forbidden_constant(zeros, gamma, eps);
  rep.notes.emplace_back("C3", c3);
  rep.notes.emplace_back("forbidden C", c);
  double worst = -std::numeric_limits<double>::infinity();
  for (const Zero& z : zeros.entries) {
    if (z.k.imag() >= 0.0) continue;
    worst = std::max(worst, 2.0 * gamma * z.k.imag() - std::log(eps + c / std::abs(z.k)));
  }
  if (std::isfinite(worst)) rep.add("max 2 gamma Im r - ln(eps + C/|r|) <= 0", worst, 0.0);

  const double depth = -std::log(2.0 * eps) / (2.0 * gamma);
  double strip_max = 0.0;
  int strip_count = 0;
  for (const Zero& z : zeros.entries) {
    if (z.k.imag() < 0.0 && z.k.imag() > -depth) {
      strip_max = std::max(strip_max, std::abs(z.k));
      strip_count += z.multiplicity;
    }
  }
  rep.notes.emplace_back("strip depth", depth);
  rep.notes.emplace_back("strip count", strip_count);
  rep.add("strip entries |r| <= C/eps", strip_max, c / eps);
  return rep;
}

BoundReport verify_counting_and_forbidden(const PotentialP& pot, const ResonanceList& zeros, double eps,
                                          double r_max) {
  return verify_counting_and_forbidden(pot.gamma(), constants_p(pot).c3, zeros, eps, r_max);
}

int winding_index_S(const ScatteringTable& table) {
  const auto& s = table.s;
  if (s.size() < 2) throw ValidationError("winding_index_S: table needs at least two samples");
  double total = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i - 1] == 0.0 || s[i] == 0.0) throw NumericalError("winding_index_S: S vanishes on the grid");
    const double d = std::arg(s[i] / s[i - 1]);
    if (std::abs(d) > pi / 2.0) throw NumericalError("winding_index_S: phase step above pi/2; refine the k grid");
    total += d;
  }
  return static_cast<int>(std::lround(total / (2.0 * pi)));
}

}  // namespace edslab
