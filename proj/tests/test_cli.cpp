#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "test_support.hpp"

#include "edslab/cli.hpp"
#include "edslab/io.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>

using namespace edslab;
using namespace edslab::testing;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "edslab");
  std::ostringstream out, err;
  Result r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("edslab_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Creating the directory first makes it outlive this object at exit.
struct ScratchCleanup {
  ScratchCleanup() { scratch_dir(); }
  ~ScratchCleanup() {
    std::error_code ec;
    fs::remove_all(scratch_dir(), ec);
  }
} cleanup;

std::string file(const std::string& name) { return (scratch_dir() / name).string(); }

// Runs the installed binary through the shell; returns (exit code, stdout).
std::pair<int, std::string> shell(const std::string& args) {
  const char* bin = std::getenv("EDSLAB_BIN");
  REQUIRE(bin != nullptr);
  const std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

// Minimal well-formedness check: tags nest and close, attributes are quoted.
bool well_formed_xml(const std::string& s) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  bool root_seen = false;
  while ((i = s.find('<', i)) != std::string::npos) {
    const std::size_t j = s.find('>', i);
    if (j == std::string::npos) return false;
    const std::string tag = s.substr(i + 1, j - i - 1);
    i = j + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!') continue;
    if (std::count(tag.begin(), tag.end(), '"') % 2 != 0) return false;
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
      continue;
    }
    const std::string name = tag.substr(0, tag.find_first_of(" \t\n/"));
    if (tag.back() == '/') {
      if (stack.empty()) return false;
      continue;
    }
    if (stack.empty() && root_seen) return false;
    root_seen = true;
    stack.push_back(name);
  }
  return root_seen && stack.empty();
}

}  // namespace

TEST_CASE("jost on the zero potential") {
  const Grid g(1.0, 51);
  save_potential(file("free.json"), PotentialP(GridFunction::zeros(g), GridFunction::zeros(g)));
  const Result r = call({"jost", "--potential", file("free.json"), "--alpha", "0", "--k", "1,0"});
  CHECK(r.code == 0);
  CHECK(r.out == "1.000000+0.000000i\n");
  CHECK(call({"jost", "--potential", file("free.json"), "--k", "2,1", "--method", "series"}).out == "1.000000+0.000000i\n");

  const auto [code, out] = shell("jost --potential " + file("free.json") + " --alpha 0 --k 1,0");
  CHECK(code == 0);
  CHECK(out == "1.000000+0.000000i\n");
}

TEST_CASE("resonances of a square well") {
  const Grid g(1.0, 401);
  const double q0 = 9.0;
  save_potential(file("sqwell.json"), PotentialP(GridFunction::zeros(g), constant(g, q0)));
  const auto [code, out] = shell("resonances --potential " + file("sqwell.json") +
                                 " --rect -20 20 -10 0 --tol 1e-8 --out " + file("r.csv"));
  REQUIRE(code == 0);
  CHECK(out.find("zeros written") != std::string::npos);
  const ResonanceFile rf = parse_resonance_csv(read_text(file("r.csv")));
  CHECK(rf.gamma == 1.0);
  CHECK(rf.tol == 1e-8);
  CHECK(rf.rect.im_min == -10.0);
  REQUIRE(!rf.list.empty());

  const Rect rect{-20.0, 20.0, -10.0, 0.0};
  const ResonanceList oracle = find_zeros([&](cplx k) { return square_well_psi(q0, 1.0, k); }, rect, 1e-10);
  CHECK(rf.list.total_multiplicity() == oracle.total_multiplicity());
  CHECK(list_distance(rf.list, oracle) <= 1e-6);
  for (const Zero& z : rf.list.entries) CHECK(std::abs(square_well_psi(q0, 1.0, z.k)) <= 1e-6);
}

TEST_CASE("verify suites pass") {
  const Grid g(1.0, 201);
  std::mt19937 rng(6);
  save_potential(file("pq.json"), random_q(rng, g));
  const Result q = call({"verify", "--suite", "all", "--potential", file("pq.json"), "--alpha", "0.7"});
  CHECK(q.code == 0);
  CHECK(q.out.find("FAIL") == std::string::npos);
  CHECK(q.out.find("ALL PASS") != std::string::npos);

  const PotentialP well(GridFunction::zeros(g), constant(g, -4.0));
  save_potential(file("well.json"), well);
  const Result p = call({"verify", "--potential", file("well.json"), "--radius", "15"});
  CHECK(p.code == 0);
  CHECK(p.out.find("ALL PASS") != std::string::npos);
  CHECK(p.out.find("NOTE scattering: ind S") != std::string::npos);

  save_potential(file("v.json"), random_v(rng, g, 0.5));
  const Result d = call({"verify", "--potential", file("v.json"), "--alpha", "0.3"});
  CHECK(d.code == 0);
  CHECK(d.out.find("ALL PASS") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(call({"frobnicate"}).code == 1);
  CHECK(call({}).code == 1);
  CHECK(call({"jost", "--potential", file("free.json"), "--k", "1,0", "--bogus", "3"}).code == 1);
  CHECK(call({"jost", "--potential", file("free.json"), "--k", "one"}).code == 1);
  CHECK(call({"jost", "--potential", file("free.json"), "--k", "1,0", "--alpha", "0.5"}).code == 1);
  CHECK(call({"jost", "--potential", file("missing.json"), "--k", "1,0"}).code == 1);
  const Result cap = call({"jost", "--potential", file("free.json"), "--k", "0,-45"});
  CHECK(cap.code == 2);
  CHECK(!cap.err.empty());
  CHECK(shell("frobnicate").first == 1);
  CHECK(shell("jost --potential " + file("free.json") + " --k 0,-45").first == 2);
}

TEST_CASE("no partial output on failure") {
  const std::string target = file("never.csv");
  fs::remove(target);
  CHECK(call({"resonances", "--potential", file("free.json"), "--rect", "-1", "1", "-40", "-35", "--out", target}).code == 2);
  CHECK(!fs::exists(target));
  CHECK(!fs::exists(target + ".tmp"));
  CHECK(call({"plot", "--resonances", file("r.csv"), "--out", "/nonexistent-dir/p.svg"}).code == 2);
}

TEST_CASE("plots") {
  ResonanceFile empty;
  empty.rect = Rect{-1, 1, -1, 0};
  write_text_atomic(file("empty.csv"), resonance_csv(empty));
  REQUIRE(call({"plot", "--resonances", file("empty.csv"), "--out", file("empty.svg")}).code == 0);
  const std::string svg = read_text(file("empty.svg"));
  CHECK(well_formed_xml(svg));
  CHECK(svg.find("<circle") == std::string::npos);

  // Exponential model: one row of zeros at Im = ln(1/2)/2.
  ResonanceFile row;
  row.rect = Rect{-50.01, 50.02, -2.0, 0.0};
  row.list = find_zeros([](cplx k) { return 1.0 + 0.5 * std::exp(cplx(0.0, 2.0) * k); }, row.rect, 1e-10);
  write_text_atomic(file("row.csv"), resonance_csv(row));
  REQUIRE(call({"plot", "--resonances", file("row.csv"), "--out", file("row.svg")}).code == 0);
  const std::string rsvg = read_text(file("row.svg"));
  CHECK(well_formed_xml(rsvg));
  std::size_t markers = 0;
  for (std::size_t i = 0; (i = rsvg.find("<circle", i)) != std::string::npos; ++i) ++markers;
  CHECK(markers == row.list.size());

  ResonanceList many;
  for (int i = 0; i < 1000; ++i) many.entries.push_back(Zero{cplx(0.1 * i - 50.0, -0.01 * (i % 97) - 0.1), 1, true});
  const std::string big = plot_svg(many, 1.0, 0.1);
  CHECK(well_formed_xml(big));
  CHECK(big.size() < 1000000);
}

TEST_CASE("file format roundtrips") {
  const Grid g(1.0, 31);
  std::mt19937 rng(2);
  const PotentialP p = random_p(rng, g);
  save_potential(file("p.json"), p);
  const auto lp = std::get<PotentialP>(load_potential(file("p.json")));
  for (std::size_t j = 0; j < g.size(); ++j) {
    CHECK(lp.p()[j] == p.p()[j]);
    CHECK(lp.q()[j] == p.q()[j]);
  }
  const PotentialQ q = random_q(rng, g);
  save_potential(file("q.json"), q);
  const auto lq = std::get<PotentialQ>(load_potential(file("q.json")));
  for (std::size_t j = 0; j < g.size(); ++j) CHECK(lq.u()[j] == q.u()[j]);
  const DiracPotential v = random_v(rng, g);
  save_potential(file("d.json"), v);
  const auto lv = std::get<DiracPotential>(load_potential(file("d.json")));
  for (std::size_t j = 0; j < g.size(); ++j) CHECK(lv.v()[j] == v.v()[j]);

  ResonanceFile rf;
  rf.gamma = 1.5;
  rf.tol = 1e-9;
  rf.rect = Rect{-3.25, 4.5, -2.0, -0.125};
  rf.list.entries = {Zero{cplx(0.1234567890123, -0.3), 1, true}, Zero{cplx(-2.0, -1.0 / 3.0), 2, true}};
  const ResonanceFile back = parse_resonance_csv(resonance_csv(rf));
  REQUIRE(back.list.size() == 2);
  CHECK(back.list.entries[0].k == rf.list.entries[0].k);
  CHECK(back.list.entries[1].k == rf.list.entries[1].k);
  CHECK(back.list.entries[1].multiplicity == 2);
  CHECK(back.gamma == 1.5);
  CHECK(back.tol == 1e-9);
  CHECK(back.rect.re_min == -3.25);
  CHECK(back.rect.im_max == -0.125);

  ScatteringTable t;
  t.k = {-1.0, 0.0, 1.0 / 3.0};
  t.s = {cplx(1, 0), std::exp(cplx(0, 0.1)), std::exp(cplx(0, -2.0 / 7.0))};
  t.alpha = 0.4;
  t.gamma = 2.0;
  const ScatteringTable tb = parse_scattering_csv(scattering_csv(t));
  CHECK(tb.k == t.k);
  CHECK(tb.s == t.s);
  CHECK(tb.alpha == 0.4);
  CHECK(tb.gamma == 2.0);
}

TEST_CASE("transform, iso, reduce and glm verbs") {
  const Grid g(1.0, 201);
  std::mt19937 rng(13);
  const PotentialQ q = random_q(rng, g);
  save_potential(file("tq.json"), q);
  REQUIRE(call({"transform", "--potential", file("tq.json"), "--out", file("tv.json")}).code == 0);
  REQUIRE(call({"transform", "--potential", file("tv.json"), "--out", file("tq2.json")}).code == 0);
  const auto back = std::get<PotentialQ>(load_potential(file("tq2.json")));
  CHECK(l2_diff(back.u(), q.u()) <= 1e-7);
  CHECK(l2_diff(back.p(), q.p()) <= 1e-7);

  const Result iso = call({"iso", "--potential", file("tq.json"), "--alpha", "0.7", "--delta", "0.5", "--out", file("iso.json")});
  REQUIRE(iso.code == 0);
  CHECK(iso.out.rfind("alpha_delta ", 0) == 0);
  const auto j = nlohmann::json::parse(read_text(file("iso.json")));
  CHECK(j.at("delta").get<double>() == doctest::Approx(0.5));
  CHECK(std::abs(j.at("alpha").get<double>() - iso_member(q, 0.7, 0.5).alpha) < 1e-12);

  const Result red = call({"reduce", "--potential", file("tq.json"), "--alpha", "0.7", "--out", file("xi.json")});
  REQUIRE(red.code == 0);
  CHECK(std::abs(std::stod(red.out.substr(10)) - reduce_to_dirichlet(q, 0.7).phi_alpha) < 1e-9);
  CHECK(call({"iso", "--potential", file("free.json"), "--out", file("x.json")}).code == 1);

  const DiracPotential v(GridFunction::sample(g, [](double x) { return 0.25 * (std::sin(pi * x) + 0.02) * std::exp(cplx(0.0, x)); }));
  const std::vector<double> kg = fourier_k_grid(1.0, 200.0);
  write_text_atomic(file("s.csv"), scattering_csv(dirac_scattering(v, DiracBoundary(0.0), kg)));
  const Result glm = call({"glm", "--scattering", file("s.csv"), "--n", "201", "--out", file("rec.json")});
  REQUIRE(glm.code == 0);
  const auto rec = std::get<DiracPotential>(load_potential(file("rec.json")));
  CHECK(l2_diff(rec.v(), v.v()) / norms(v.v()).l2 <= 1e-2);

  const Result sc = call({"scatter", "--potential", file("tv.json"), "--alpha", "0.3", "--kmax", "5", "--nk", "11"});
  REQUIRE(sc.code == 0);
  CHECK(parse_scattering_csv(sc.out).k.size() == 11);
}
