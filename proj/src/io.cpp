#include "edslab/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace edslab {

using nlohmann::json;

std::string potential_class(const AnyPotential& pot) {
  switch (pot.index()) {
    case 0: return "P";
    case 1: return "Q";
    default: return "D";
  }
}

const Grid& potential_grid(const AnyPotential& pot) {
  return std::visit([](const auto& p) -> const Grid& { return p.grid(); }, pot);
}

namespace {

std::vector<double> real_parts(const GridFunction& f) {
  std::vector<double> r(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) r[j] = f[j].real();
  return r;
}

std::vector<double> imag_parts(const GridFunction& f) {
  std::vector<double> r(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) r[j] = f[j].imag();
  return r;
}

std::vector<double> array_field(const json& j, const char* key, std::size_t n, bool required) {
  if (!j.contains(key)) {
    if (required) throw ValidationError(std::string("potential JSON: missing field '") + key + "'");
    return std::vector<double>(n, 0.0);
  }
  const json& a = j.at(key);
  if (!a.is_array() || a.size() != n)
    throw ValidationError(std::string("potential JSON: field '") + key + "' must be an array of length n");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!a[i].is_number()) throw ValidationError(std::string("potential JSON: non-numeric entry in '") + key + "'");
    out[i] = a[i].get<double>();
  }
  return out;
}

GridFunction complex_field(const Grid& g, const json& j, const char* re, const char* im, bool required) {
  const std::vector<double> a = array_field(j, re, g.size(), required);
  const std::vector<double> b = array_field(j, im, g.size(), false);
  std::vector<cplx> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = cplx(a[i], b[i]);
  return GridFunction(g, std::move(v));
}

}  // namespace

json potential_to_json(const AnyPotential& pot) {
  const Grid& g = potential_grid(pot);
  json j;
  j["gamma"] = g.gamma();
  j["n"] = g.size();
  j["class"] = potential_class(pot);
  if (const auto* p = std::get_if<PotentialP>(&pot)) {
    j["p_re"] = real_parts(p->p());
    j["p_im"] = imag_parts(p->p());
    j["q_re"] = real_parts(p->q());
    j["q_im"] = imag_parts(p->q());
  } else if (const auto* q = std::get_if<PotentialQ>(&pot)) {
    j["p_re"] = real_parts(q->p());
    j["p_im"] = imag_parts(q->p());
    j["u"] = real_parts(q->u());
  } else {
    const auto& d = std::get<DiracPotential>(pot);
    j["v_re"] = real_parts(d.v());
    j["v_im"] = imag_parts(d.v());
  }
  return j;
}

AnyPotential potential_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("potential JSON: top level must be an object");
  for (const char* key : {"gamma", "n", "class"})
    if (!j.contains(key)) throw ValidationError(std::string("potential JSON: missing field '") + key + "'");
  if (!j["gamma"].is_number() || !j["n"].is_number_integer() || !j["class"].is_string())
    throw ValidationError("potential JSON: gamma, n, class have the wrong types");
  const long n = j["n"].get<long>();
  if (n < 2) throw ValidationError("potential JSON: n must be >= 2");
  const Grid g(j["gamma"].get<double>(), static_cast<std::size_t>(n));
  const std::string cls = j["class"].get<std::string>();
  if (cls == "P") return PotentialP(complex_field(g, j, "p_re", "p_im", true), complex_field(g, j, "q_re", "q_im", true));
  if (cls == "Q") {
    const char* p_key = j.contains("p_re") ? "p_re" : "p";
    return PotentialQ(complex_field(g, j, p_key, "p_im", true), complex_field(g, j, "u", "u_im", true));
  }
  if (cls == "D") return DiracPotential(complex_field(g, j, "v_re", "v_im", true));
  throw ValidationError("potential JSON: class must be \"P\", \"Q\" or \"D\"");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
    out.flush();
    if (!out) {
      out.close();
      std::remove(tmp.c_str());
      throw IoError("write to '" + path + "' failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw IoError("cannot move output into '" + path + "': " + ec.message());
  }
}

AnyPotential load_potential(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
  return potential_from_json(j);
}

void save_potential(const std::string& path, const AnyPotential& pot, const json& extra) {
  json j = potential_to_json(pot);
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  write_text_atomic(path, j.dump(1) + "\n");
}

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Parses "# key=value key=value" header lines into a map.
std::map<std::string, std::string> header_fields(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] != '#') continue;
    std::istringstream words(line.substr(1));
    std::string w;
    while (words >> w) {
      const auto eq = w.find('=');
      if (eq != std::string::npos) out[w.substr(0, eq)] = w.substr(eq + 1);
    }
  }
  return out;
}

double to_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(std::string("CSV: bad number for ") + what + ": '" + s + "'");
  }
}

std::vector<std::vector<std::string>> data_rows(const std::string& text, std::size_t columns) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != columns) throw ValidationError("CSV: row with wrong column count: '" + line + "'");
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

std::string resonance_csv(const ResonanceFile& f) {
  std::ostringstream out;
  out << "# gamma=" << fmt(f.gamma) << " tol=" << fmt(f.tol) << " rect=" << fmt(f.rect.re_min) << ','
      << fmt(f.rect.re_max) << ',' << fmt(f.rect.im_min) << ',' << fmt(f.rect.im_max) << '\n';
  out << "re_k,im_k,multiplicity\n";
  for (const Zero& z : f.list.entries) out << fmt(z.k.real()) << ',' << fmt(z.k.imag()) << ',' << z.multiplicity << '\n';
  return out.str();
}

ResonanceFile parse_resonance_csv(const std::string& text) {
  const auto h = header_fields(text);
  ResonanceFile f;
  if (h.count("gamma")) f.gamma = to_double(h.at("gamma"), "gamma");
  if (h.count("tol")) f.tol = to_double(h.at("tol"), "tol");
  if (h.count("rect")) {
    std::istringstream rs(h.at("rect"));
    std::string part;
    std::vector<double> v;
    while (std::getline(rs, part, ',')) v.push_back(to_double(part, "rect"));
    if (v.size() != 4) throw ValidationError("CSV: rect needs four numbers");
    f.rect = Rect{v[0], v[1], v[2], v[3]};
  }
  for (const auto& row : data_rows(text, 3)) {
    const double m = to_double(row[2], "multiplicity");
    if (m < 1.0 || m != std::floor(m)) throw ValidationError("CSV: multiplicity must be a positive integer");
    f.list.entries.push_back(Zero{cplx(to_double(row[0], "re_k"), to_double(row[1], "im_k")), static_cast<int>(m), true});
  }
  return f;
}

std::string scattering_csv(const ScatteringTable& t) {
  std::ostringstream out;
  out << "# alpha=" << fmt(t.alpha) << " gamma=" << fmt(t.gamma) << '\n';
  out << "k,re_s,im_s\n";
  for (std::size_t i = 0; i < t.k.size(); ++i) out << fmt(t.k[i]) << ',' << fmt(t.s[i].real()) << ',' << fmt(t.s[i].imag()) << '\n';
  return out.str();
}

ScatteringTable parse_scattering_csv(const std::string& text) {
  const auto h = header_fields(text);
  ScatteringTable t;
  if (!h.count("gamma")) throw ValidationError("scattering CSV: header must carry gamma");
  t.gamma = to_double(h.at("gamma"), "gamma");
  if (h.count("alpha")) t.alpha = to_double(h.at("alpha"), "alpha");
  for (const auto& row : data_rows(text, 3)) {
    t.k.push_back(to_double(row[0], "k"));
    t.s.emplace_back(to_double(row[1], "re_s"), to_double(row[2], "im_s"));
  }
  for (std::size_t i = 1; i < t.k.size(); ++i)
    if (!(t.k[i] > t.k[i - 1])) throw ValidationError("scattering CSV: k must increase");
  return t;
}

}  // namespace edslab
