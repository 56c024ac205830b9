#include "edslab/cli.hpp"

#include "edslab/io.hpp"
#include "edslab/isoresonance.hpp"
#include "edslab/jost_schrodinger.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

namespace edslab {

namespace {

using nlohmann::json;

std::string format_complex(cplx z) {
  auto clean = [](double x) { return std::abs(x) < 5e-7 ? 0.0 : x; };
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.6f%+.6fi", clean(z.real()), clean(z.imag()));
  return buf;
}

cplx parse_complex(const std::string& s) {
  const auto comma = s.find(',');
  try {
    std::size_t used = 0;
    if (comma == std::string::npos) {
      const double re = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return cplx(re, 0.0);
    }
    const std::string a = s.substr(0, comma), b = s.substr(comma + 1);
    const double re = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(s);
    const double im = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(s);
    return cplx(re, im);
  } catch (const std::exception&) {
    throw ValidationError("expected a complex number as 're,im', got '" + s + "'");
  }
}

// The Jost function whose zeros are the eigenvalues and resonances of `pot`.
// For class Q this is psi_delta(k, T(pq)); psi_alpha only adds the factor i e^{i beta} k.
ComplexFunction spectral_function(const AnyPotential& pot, double alpha) {
  if (const auto* p = std::get_if<PotentialP>(&pot)) {
    if (mod_pi(alpha) != 0.0) throw ValidationError("class P potentials use the Dirichlet condition (alpha = 0)");
    return [p](cplx k) { return jost_ode(*p, k); };
  }
  if (const auto* q = std::get_if<PotentialQ>(&pot)) {
    const TransformPair tp = t_forward(*q);
    const DiracBoundary bc(boundary_map(alpha, tp.phi[0].real()).delta);
    return [v = tp.v, bc](cplx k) { return dirac_jost_function(v, bc, k); };
  }
  const DiracPotential v = std::get<DiracPotential>(pot);
  const DiracBoundary bc(alpha);
  return [v, bc](cplx k) { return dirac_jost_function(v, bc, k); };
}

ScatteringTable scattering_any(const AnyPotential& pot, double alpha, const std::vector<double>& k) {
  if (const auto* q = std::get_if<PotentialQ>(&pot)) return scattering_q(*q, alpha, k);
  if (const auto* d = std::get_if<DiracPotential>(&pot)) return dirac_scattering(*d, DiracBoundary(alpha), k);
  const auto& p = std::get<PotentialP>(pot);
  if (mod_pi(alpha) != 0.0) throw ValidationError("class P potentials use the Dirichlet condition (alpha = 0)");
  ScatteringTable t;
  t.k = k;
  t.alpha = 0.0;
  t.gamma = p.gamma();
  t.s.resize(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    const cplx f = jost_ode(p, k[i]);
    if (std::abs(f) < 1e-13) throw NumericalError("scatter: Jost function vanishes on the real axis");
    t.s[i] = std::conj(f) / f;
  }
  return t;
}

std::vector<double> uniform(double a, double b, std::size_t n) {
  if (n < 2) throw ValidationError("grid needs at least two points");
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

const PotentialQ& require_q(const AnyPotential& pot, const char* verb) {
  const auto* q = std::get_if<PotentialQ>(&pot);
  if (!q) throw ValidationError(std::string(verb) + ": needs a class Q potential");
  return *q;
}

void print_report(std::ostream& out, const std::string& suite, const BoundReport& rep) {
  char buf[64];
  for (const BoundCheck& c : rep.checks) {
    out << (c.pass ? "PASS " : "FAIL ") << suite << ": " << c.name;
    std::snprintf(buf, sizeof buf, "  lhs=%.6g rhs=%.6g", c.lhs, c.rhs);
    out << buf << '\n';
  }
  for (const auto& [name, value] : rep.notes) {
    std::snprintf(buf, sizeof buf, "%.6g", value);
    out << "NOTE " << suite << ": " << name << " = " << buf << '\n';
  }
}

struct VerifyOptions {
  std::string suite = "all";
  double alpha = 0.0;
  double eps = 0.1;
  double radius = 20.0;
  double delta = pi / 4.0;
  double tol = 1e-8;
};

bool wants(const VerifyOptions& o, const char* s) { return o.suite == "all" || o.suite == s; }

// Upper rect for eigenvalues and lower rect for resonances of radius R.
Rect upper_rect(double r) { return Rect{-r - 0.0131, r + 0.0173, 1e-7, r}; }
Rect lower_rect(double r, double gamma) {
  return Rect{-r - 0.0131, r + 0.0173, -std::min(r, 0.95 * max_im_k_gamma / gamma), -1e-7};
}

// For class P the index counts eigenvalues (ind S = -2 N_+), so it is only reported.
BoundReport scattering_report(const AnyPotential& pot, double alpha) {
  const double gamma = potential_grid(pot).gamma();
  const std::vector<double> k = uniform(-200.0 / gamma, 200.0 / gamma, 4001);
  const ScatteringTable t = scattering_any(pot, alpha, k);
  double unit = 0.0;
  for (const cplx& s : t.s) unit = std::max(unit, std::abs(std::abs(s) - 1.0));
  BoundReport rep;
  rep.add("| |S| - 1 | on the real grid", unit, 1e-8);
  const int index = winding_index_S(t);
  if (std::holds_alternative<PotentialP>(pot))
    rep.notes.emplace_back("ind S", index);
  else
    rep.add("|ind S|", std::abs(index), 0.0);
  return rep;
}

int verify(const AnyPotential& pot, const VerifyOptions& o, std::ostream& out) {
  const std::vector<std::string> suites{"all", "bounds", "counting", "scattering", "transform", "iso", "dirac"};
  if (std::find(suites.begin(), suites.end(), o.suite) == suites.end())
    throw ValidationError("verify: unknown suite '" + o.suite + "'");
  bool ok = true;
  std::size_t ran = 0;
  auto emit = [&](const std::string& name, const BoundReport& rep) {
    print_report(out, name, rep);
    ok = ok && rep.all_pass();
    ++ran;
  };
  const double gamma = potential_grid(pot).gamma();
  const double r = o.radius;

  if (const auto* p = std::get_if<PotentialP>(&pot)) {
    const ComplexFunction f = spectral_function(pot, 0.0);
    if (wants(o, "bounds") || wants(o, "counting")) {
      const ResonanceList eig = find_zeros(f, upper_rect(r), o.tol);
      const ResonanceList res = find_zeros(f, lower_rect(r, gamma), o.tol);
      if (wants(o, "bounds")) emit("bounds", verify_bounds_p(*p, eig, res));
      if (wants(o, "counting")) {
        ResonanceList all = eig;
        all.entries.insert(all.entries.end(), res.entries.begin(), res.entries.end());
        emit("counting", verify_counting_and_forbidden(*p, order_list(all), o.eps, r));
      }
    }
    if (wants(o, "scattering") && p->is_real()) emit("scattering", scattering_report(pot, 0.0));
  } else if (const auto* q = std::get_if<PotentialQ>(&pot)) {
    const TransformPair tp = t_forward(*q);
    if (wants(o, "transform")) {
      const TransformPair back = t_inverse(tp.v);
      double diff = 0.0;
      for (std::size_t j = 0; j < q->p().size(); ++j)
        diff += std::norm(back.pq.p()[j] - q->p()[j]) + std::norm(back.pq.u()[j] - q->u()[j]);
      BoundReport rep;
      rep.add("L2 norm of T^-1(T(pq)) - pq", std::sqrt(diff * q->grid().step()), 1e-7);
      double path = 0.0;
      for (cplx k : {cplx(1.3, 0.4), cplx(-4.1, -0.7), cplx(7.7, 1.1)})
        path = std::max(path, std::abs(jost_q(*q, o.alpha, k) - jost_q_secondary(*q, o.alpha, k)) / (1.0 + std::abs(k)));
      rep.add("|psi_alpha primary - secondary| / (1+|k|)", path, 1e-8);
      rep.add("eigenvalues of psi_delta in [-R,R]x[0,R]",
              std::abs(winding_count(spectral_function(pot, o.alpha), Rect{-r - 0.0131, r + 0.0173, 0.0, r})), 0.0);
      emit("transform", rep);
    }
    if (wants(o, "iso")) {
      const std::vector<double> k = uniform(-20.0, 20.0, 201);
      BoundReport rep = verify_iso_scattering(*q, o.alpha, o.delta, k);
      const DirichletReduction red = reduce_to_dirichlet(*q, o.alpha);
      const ScatteringTable s1 = scattering_q(*q, o.alpha, k);
      const ScatteringTable s0 = scattering_q(red.member.pq, 0.0, k);
      double dev = 0.0;
      for (std::size_t i = 0; i < k.size(); ++i)
        dev = std::max(dev, std::abs(s1.s[i] - std::exp(cplx(0.0, -2.0 * red.phi_alpha)) * s0.s[i]));
      rep.add("|S_alpha(pq) - e^{-2i phi_alpha} S_0(xi_alpha(pq))|", dev, 1e-6);
      rep.notes.emplace_back("phi_alpha", red.phi_alpha);
      emit("iso", rep);
    }
    if (wants(o, "scattering")) emit("scattering", scattering_report(pot, o.alpha));
  } else {
    const auto& v = std::get<DiracPotential>(pot);
    if (wants(o, "dirac")) {
      BoundReport rep;
      double worst = 0.0;
      for (cplx k : {cplx(0.7, 0.2), cplx(-3.3, -0.9), cplx(9.1, 1.7)}) {
        const auto [lhs, rhs] = conjugation_check(v, DiracBoundary(o.alpha), k);
        worst = std::max(worst, std::abs(lhs - rhs));
      }
      rep.add("conjugation identity deviation", worst, 1e-8);
      rep.add("eigenvalues of psi_alpha in [-R,R]x[0,R]",
              std::abs(winding_count(spectral_function(pot, o.alpha), Rect{-r - 0.0131, r + 0.0173, 0.0, r})), 0.0);
      emit("dirac", rep);
    }
    if (wants(o, "scattering")) emit("scattering", scattering_report(pot, o.alpha));
  }
  if (ran == 0) throw ValidationError("verify: suite '" + o.suite + "' does not apply to class " + potential_class(pot));
  out << (ok ? "ALL PASS" : "SOME CHECKS FAILED") << '\n';
  return ok ? 0 : 2;
}

void write_or_print(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-")
    out << text;
  else
    write_text_atomic(path, text);
}

}  // namespace

std::string plot_svg(const ResonanceList& res, double gamma, double eps) {
  const double c = forbidden_constant(res, gamma, eps);
  double xmax = 1.0, ymin = -1.0;
  for (const Zero& z : res.entries) {
    xmax = std::max(xmax, 1.05 * std::abs(z.k.real()));
    ymin = std::min(ymin, 1.1 * z.k.imag());
  }
  const double w = 640, h = 400, m = 50;
  auto px = [&](double x) { return m + (x + xmax) / (2.0 * xmax) * (w - 2 * m); };
  auto py = [&](double y) { return m + (0.0 - y) / (0.0 - ymin) * (h - 2 * m); };
  std::ostringstream s;
  char buf[160];
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
    << ' ' << h << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n", px(-xmax),
                py(0.0), px(xmax), py(0.0));
  s << buf;
  std::snprintf(buf, sizeof buf, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n", px(0.0),
                py(0.0), px(0.0), py(ymin));
  s << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\">Re k in [%.3g, %.3g], Im k in [%.3g, 0]</text>\n", m,
                m - 20.0, -xmax, xmax, ymin);
  s << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\">eps = %.3g, C = %.4g, gamma = %.4g</text>\n",
                m, h - 15.0, eps, c, gamma);
  s << buf;
  // Boundary curve, drawn on each side of the imaginary axis.
  for (int side : {-1, 1}) {
    s << "<polyline fill=\"none\" stroke=\"red\" points=\"";
    for (int i = 1; i <= 400; ++i) {
      const double x = side * xmax * i / 400.0;
      double y = std::log(eps + c / std::abs(x)) / (2.0 * gamma);
      y = std::clamp(y, ymin, 0.0);
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(x), py(y));
      s << buf;
    }
    s << "\"/>\n";
  }
  for (const Zero& z : res.entries) {
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"navy\"/>\n", px(z.k.real()),
                  py(std::clamp(z.k.imag(), ymin, 0.0)));
    s << buf;
  }
  s << "</svg>\n";
  return s.str();
}

void emit_plot(const ResonanceList& res, double gamma, double eps, const std::string& path) {
  write_text_atomic(path, plot_svg(res, gamma, eps));
}

int run(const std::vector<std::string>& argv) { return run(argv, std::cout, std::cerr); }

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"edslab: Jost functions, resonances and transforms for energy-dependent potentials", "edslab"};
  app.require_subcommand(1);

  std::string potential, out_path, scattering_path, resonance_path, method = "auto", suite = "all", k_text;
  double alpha = 0.0, tol = 1e-8, kmax = 20.0, delta = pi / 4.0, eps = 0.1, radius = 20.0, spacing = 0.25;
  std::size_t nk = 801, n = 201;
  std::vector<double> rect;

  auto* jost = app.add_subcommand("jost", "Evaluate the Jost function at one k");
  jost->add_option("--potential", potential, "Potential JSON")->required();
  jost->add_option("--k", k_text, "Spectral parameter as re,im")->required();
  jost->add_option("--alpha", alpha, "Boundary parameter");
  jost->add_option("--method", method, "auto|ode|series|secondary|direct");
  jost->add_option("--tol", tol, "Series tolerance");

  auto* resonances = app.add_subcommand("resonances", "Zeros of the Jost function in a rectangle");
  resonances->add_option("--potential", potential, "Potential JSON")->required();
  resonances->add_option("--rect", rect, "re_min re_max im_min im_max")->required()->expected(4);
  resonances->add_option("--tol", tol, "Zero tolerance");
  resonances->add_option("--alpha", alpha, "Boundary parameter");
  resonances->add_option("--spacing", spacing, "Largest contour step");
  resonances->add_option("--out", out_path, "Output CSV (stdout if omitted)");

  auto* scatter = app.add_subcommand("scatter", "Scattering matrix on a real k grid");
  scatter->add_option("--potential", potential, "Potential JSON")->required();
  scatter->add_option("--alpha", alpha, "Boundary parameter");
  scatter->add_option("--kmax", kmax, "Grid covers [-kmax, kmax]");
  scatter->add_option("--nk", nk, "Number of k samples");
  scatter->add_option("--out", out_path, "Output CSV (stdout if omitted)");

  auto* transform = app.add_subcommand("transform", "Class Q -> Dirac potential, or Dirac -> class Q");
  transform->add_option("--potential", potential, "Potential JSON")->required();
  transform->add_option("--out", out_path, "Output JSON")->required();

  auto* iso = app.add_subcommand("iso", "Isoresonance family member");
  iso->add_option("--potential", potential, "Class Q potential JSON")->required();
  iso->add_option("--alpha", alpha, "Base boundary parameter");
  iso->add_option("--delta", delta, "Family parameter");
  iso->add_option("--out", out_path, "Output JSON")->required();

  auto* reduce = app.add_subcommand("reduce", "Reduce (pq, alpha) to the Dirichlet condition");
  reduce->add_option("--potential", potential, "Class Q potential JSON")->required();
  reduce->add_option("--alpha", alpha, "Boundary parameter");
  reduce->add_option("--out", out_path, "Output JSON")->required();

  auto* glm = app.add_subcommand("glm", "Reconstruct a Dirac potential from a scattering CSV");
  glm->add_option("--scattering", scattering_path, "Scattering CSV")->required();
  glm->add_option("--n", n, "Grid points of the reconstruction");
  glm->add_option("--out", out_path, "Output JSON")->required();

  auto* verify_cmd = app.add_subcommand("verify", "Run the invariant and bound checks");
  verify_cmd->add_option("--suite", suite, "all|bounds|counting|scattering|transform|iso|dirac");
  verify_cmd->add_option("--potential", potential, "Potential JSON")->required();
  verify_cmd->add_option("--alpha", alpha, "Boundary parameter");
  verify_cmd->add_option("--eps", eps, "Forbidden-domain epsilon");
  verify_cmd->add_option("--radius", radius, "Search radius R");
  verify_cmd->add_option("--delta", delta, "Family parameter for the iso suite");
  verify_cmd->add_option("--tol", tol, "Zero tolerance");

  auto* plot = app.add_subcommand("plot", "SVG of resonances with the forbidden-domain boundary");
  plot->add_option("--resonances", resonance_path, "Resonance CSV")->required();
  plot->add_option("--eps", eps, "Forbidden-domain epsilon");
  plot->add_option("--out", out_path, "Output SVG")->required();

  std::vector<std::string> args(argv.size() > 1 ? argv.begin() + 1 : argv.end(), argv.end());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "edslab: " << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (*jost) {
      const AnyPotential pot = load_potential(potential);
      const cplx k = parse_complex(k_text);
      cplx value;
      if (const auto* p = std::get_if<PotentialP>(&pot)) {
        if (mod_pi(alpha) != 0.0) throw ValidationError("class P potentials use the Dirichlet condition (alpha = 0)");
        if (method == "series")
          value = jost_series(*p, k, tol).value;
        else if (method == "auto" || method == "ode")
          value = jost_ode(*p, k);
        else
          throw ValidationError("jost: method '" + method + "' does not apply to class P");
      } else if (const auto* q = std::get_if<PotentialQ>(&pot)) {
        if (method == "auto")
          value = jost_q(*q, alpha, k);
        else if (method == "secondary")
          value = jost_q_secondary(*q, alpha, k);
        else if (method == "direct")
          value = jost_q_direct(*q, alpha, k);
        else
          throw ValidationError("jost: method '" + method + "' does not apply to class Q");
      } else {
        if (method != "auto") throw ValidationError("jost: method '" + method + "' does not apply to class D");
        value = dirac_jost_function(std::get<DiracPotential>(pot), DiracBoundary(alpha), k);
      }
      out << format_complex(value) << '\n';
    } else if (*resonances) {
      const AnyPotential pot = load_potential(potential);
      const Rect r{rect[0], rect[1], rect[2], rect[3]};
      ZeroSearchOptions zo;
      zo.tol = tol;
      zo.max_spacing = spacing;
      ResonanceFile f{find_zeros(spectral_function(pot, alpha), r, zo), potential_grid(pot).gamma(), tol, r};
      write_or_print(out_path, resonance_csv(f), out);
      if (!out_path.empty() && out_path != "-") out << f.list.size() << " zeros written to " << out_path << '\n';
    } else if (*scatter) {
      const AnyPotential pot = load_potential(potential);
      if (!(kmax > 0.0)) throw ValidationError("scatter: --kmax must be positive");
      write_or_print(out_path, scattering_csv(scattering_any(pot, alpha, uniform(-kmax, kmax, nk))), out);
    } else if (*transform) {
      const AnyPotential pot = load_potential(potential);
      if (const auto* q = std::get_if<PotentialQ>(&pot)) {
        save_potential(out_path, t_forward(*q).v);
      } else if (const auto* d = std::get_if<DiracPotential>(&pot)) {
        save_potential(out_path, t_inverse(*d).pq);
      } else {
        throw ValidationError("transform: class P potentials have no Dirac image");
      }
    } else if (*iso) {
      const PotentialQ q = require_q(load_potential(potential), "iso");
      const IsoMember m = iso_member(q, alpha, delta);
      save_potential(out_path, m.pq, json{{"delta", m.delta}, {"alpha", m.alpha}});
      char buf[64];
      std::snprintf(buf, sizeof buf, "alpha_delta %.10f\n", m.alpha);
      out << buf;
    } else if (*reduce) {
      const PotentialQ q = require_q(load_potential(potential), "reduce");
      const DirichletReduction red = reduce_to_dirichlet(q, alpha);
      save_potential(out_path, red.member.pq, json{{"delta", red.member.delta}, {"alpha", 0.0}, {"phi_alpha", red.phi_alpha}});
      char buf[64];
      std::snprintf(buf, sizeof buf, "phi_alpha %.10f\n", red.phi_alpha);
      out << buf;
    } else if (*glm) {
      const ScatteringTable t = parse_scattering_csv(read_text(scattering_path));
      const Grid g(t.gamma, n);
      const std::size_t extra = (n - 1) / 4;
      std::vector<double> s(n + extra);
      for (std::size_t j = 0; j < s.size(); ++j) s[j] = -g.step() * static_cast<double>(s.size() - 1 - j);
      const GlmKernel kernel = scattering_to_F(t, s);
      save_potential(out_path, glm_reconstruct(kernel, g), json{{"alpha_eff", kernel.alpha_eff}, {"leakage", kernel.leakage}});
      char buf[96];
      std::snprintf(buf, sizeof buf, "alpha_eff %.6f leakage %.3e\n", kernel.alpha_eff, kernel.leakage);
      out << buf;
    } else if (*verify_cmd) {
      VerifyOptions o;
      o.suite = suite;
      o.alpha = alpha;
      o.eps = eps;
      o.radius = radius;
      o.delta = delta;
      o.tol = tol;
      return verify(load_potential(potential), o, out);
    } else if (*plot) {
      const ResonanceFile f = parse_resonance_csv(read_text(resonance_path));
      emit_plot(f.list, f.gamma, eps, out_path);
    }
  } catch (const ValidationError& e) {
    err << "edslab: error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    err << "edslab: numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    err << "edslab: I/O failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "edslab: failure: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace edslab
