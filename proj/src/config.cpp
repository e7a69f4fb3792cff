#include "semshape/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "semshape/numerics.hpp"

namespace semshape {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void missing(const std::string& key) {
  throw std::invalid_argument("config: missing key '" + key + "'");
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key + "' is not a number: '" + v + "'");
  }
}

}  // namespace

bool Config::has(const std::string& key) const { return kv.count(key) > 0; }

std::string Config::get_string(const std::string& key) const {
  auto it = kv.find(key);
  if (it == kv.end()) missing(key);
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
  return to_double(key, get_string(key));
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : to_double(key, it->second);
}

int Config::get_int(const std::string& key, int fallback) const {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  const double x = to_double(key, it->second);
  const int n = static_cast<int>(std::lround(x));
  if (x != static_cast<double>(n))
    throw std::invalid_argument("config: key '" + key + "' must be an integer");
  return n;
}

std::vector<double> Config::get_list(const std::string& key) const {
  auto it = kv.find(key);
  if (it == kv.end()) missing(key);
  std::istringstream is(it->second);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) out.push_back(to_double(key, tok));
  if (out.empty()) throw std::invalid_argument("config: key '" + key + "' is an empty list");
  return out;
}

std::vector<double> Config::get_list(const std::string& key,
                                     std::vector<double> fallback) const {
  return has(key) ? get_list(key) : std::move(fallback);
}

std::uint64_t Config::hash() const { return fnv1a64(raw); }

std::string Config::hash_hex() const {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = hash();
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

Config parse_config(const std::string& text) {
  Config c;
  c.raw = text;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const size_t hashpos = line.find('#');
    if (hashpos != std::string::npos) line.erase(hashpos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config: unterminated section header at line " +
                                    std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw std::invalid_argument("config: empty section name at line " +
                                    std::to_string(lineno));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key = value at line " +
                                  std::to_string(lineno));
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config: empty key at line " + std::to_string(lineno));
    if (!section.empty()) key = section + "." + key;
    c.kv[key] = value;
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

ProblemSetup setup_from_config(const Config& c, int grid_override) {
  ProblemSetup ps;
  const double L = c.get_double("grid.L", 1.0);
  const int n = grid_override > 0 ? grid_override : c.get_int("grid.n", 64);
  ps.grid = make_grid(L, n);

  const std::string fk = c.get_string("f.kind", "zero");
  if (fk == "zero") {
    ps.f = zero_nonlinearity();
  } else if (fk == "affine") {
    const std::vector<double> p = c.get_list("f.params");
    if (p.size() != 2)
      throw std::invalid_argument("config: f.params needs exactly two entries for affine");
    ps.f = affine_nonlinearity(p[0], p[1], c.get_double("f.trunc", 1.0));
  } else if (fk == "neg_exp_square") {
    ps.f = neg_exp_square(c.get_double("f.trunc", 1.0));
  } else if (fk == "table") {
    const std::vector<double> x = c.get_list("f.x");
    const std::vector<double> fv = c.get_list("f.values");
    const std::vector<double> fp = c.get_list("f.derivs");
    std::vector<double> fpp = c.get_list("f.second_derivs", {});
    if (fpp.empty()) fpp.assign(x.size(), 0.0);
    ps.f = table_nonlinearity(x, fv, fp, fpp);
  } else {
    throw std::invalid_argument("config: unknown f.kind '" + fk + "'");
  }

  const std::string gk = c.get_string("g.kind", "constant");
  if (gk == "constant") {
    const std::vector<double> p = c.get_list("g.params", {c.get_double("g.value", 1.0)});
    if (p.size() != 1)
      throw std::invalid_argument("config: g.params needs exactly one entry for constant");
    ps.g = constant_source(p[0]);
  } else if (gk == "radial_affine") {
    const std::vector<double> p = c.get_list("g.params");
    if (p.size() != 2)
      throw std::invalid_argument("config: g.params needs exactly two entries for radial_affine");
    ps.g = radial_affine_source(p[0], p[1]);
  } else {
    throw std::invalid_argument("config: unknown g.kind '" + gk + "'");
  }

  if (c.has("g.h1")) {
    const std::vector<double> b = c.get_list("g.h1");
    if (b.size() != 2)
      throw std::invalid_argument("config: g.h1 needs exactly two entries");
    ps.g.h1_bounds = std::make_pair(b[0], b[1]);
  }
  ps.g.radial_nonincreasing = c.get_int("g.radial", 0) != 0;

  ps.m = c.get_double("m", ps.grid.area());
  if (!(ps.m > 0.0))
    throw std::invalid_argument("config: mass budget m must be positive");
  ps.rho = c.get_double("rho", 0.0);
  if (ps.rho < 0.0) throw std::invalid_argument("config: rho must be non-negative");
  ps.M = c.get_double("M", 1e4);
  if (!(ps.M > 0.0)) throw std::invalid_argument("config: M must be positive");
  return ps;
}

}
