#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "semshape/grid.hpp"
#include "semshape/problem.hpp"

namespace semshape {

// Flat key/value config with INI-style sections.  '[name]' prefixes the keys
// that follow as "name.key"; top-level keys (m, rho, M, version) must appear
// before the first section.  '#' starts a comment.  Values are scalars,
// space-separated lists, or words.
struct Config {
  std::map<std::string, std::string> kv;
  std::string raw;  // original bytes, hashed for artifact names

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::vector<double> get_list(const std::string& key) const;
  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const;

  std::uint64_t hash() const;
  std::string hash_hex() const;
};

Config parse_config(const std::string& text);
Config load_config(const std::string& path);

// The problem instance described by the canonical keys
// grid.L, grid.n, f.kind, f.params, f.trunc, g.kind, g.params, g.h1,
// g.radial, m, rho, M.
struct ProblemSetup {
  Grid2D grid;
  Nonlinearity f;
  Source g;
  double m = 0.0;
  double rho = 0.0;
  double M = 0.0;
};

// Builds the instance, validating kinds and parameter counts.  grid_override
// replaces grid.n when positive.
ProblemSetup setup_from_config(const Config& c, int grid_override = 0);

}
