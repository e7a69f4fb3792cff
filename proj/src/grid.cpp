#include "semshape/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace semshape {

namespace {

void ensure(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

Grid2D make_grid(double L, int n) {
  ensure(std::isfinite(L) && L > 0.0, "make_grid: box half-width must be positive");
  ensure(n >= 8, "make_grid: grid too coarse, need at least 8 cells per side");
  Grid2D g;
  g.L = L;
  g.n = n;
  g.h = 2.0 * L / n;
  return g;
}

DensityField uniform_density(const Grid2D& g, double value) {
  ensure(value >= 0.0 && value <= 1.0, "uniform_density: value outside [0,1]");
  return DensityField{g.n, std::vector<double>(static_cast<size_t>(g.cell_count()), value)};
}

ScalarField zero_scalar(const Grid2D& g) {
  return ScalarField{g.n, std::vector<double>(static_cast<size_t>(g.interior_count()), 0.0)};
}

double integrate(const DensityField& a, const Grid2D& g) {
  ensure(a.n == g.n && a.a.size() == static_cast<size_t>(g.cell_count()),
         "integrate: density does not match grid");
  double s = 0.0;
  for (double v : a.a) s += v;
  return s * g.h * g.h;
}

double integrate(const ScalarField& u, const Grid2D& g) {
  ensure(u.n == g.n && u.v.size() == static_cast<size_t>(g.interior_count()),
         "integrate: field does not match grid");
  double s = 0.0;
  for (double v : u.v) s += v;
  return s * g.h * g.h;
}

double mass(const DensityField& a, const Grid2D& g) { return integrate(a, g); }

double sup_norm(const ScalarField& u) {
  double s = 0.0;
  for (double v : u.v) s = std::max(s, std::fabs(v));
  return s;
}

DensityField project_density(const std::vector<double>& raw, double m, const Grid2D& g) {
  ensure(m > 0.0 && std::isfinite(m), "project_density: mass budget must be positive");
  ensure(raw.size() == static_cast<size_t>(g.cell_count()),
         "project_density: raw values do not match grid");
  for (double v : raw)
    ensure(std::isfinite(v), "project_density: non-finite input");

  const double cell = g.h * g.h;
  auto shifted_mass = [&](double mu) {
    double s = 0.0;
    for (double v : raw) s += clamp01(v - mu);
    return s * cell;
  };

  DensityField out{g.n, std::vector<double>(raw.size())};
  // mu = 0 feasible: clip only.  The slack makes re-projection a no-op.
  if (shifted_mass(0.0) <= m + 1e-12 * std::max(1.0, m)) {
    for (size_t i = 0; i < raw.size(); ++i) out.a[i] = clamp01(raw[i]);
    return out;
  }

  double lo = 0.0;
  double hi = *std::max_element(raw.begin(), raw.end());  // mass(hi) = 0 <= m
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (shifted_mass(mid) > m)
      lo = mid;
    else
      hi = mid;
  }
  // hi side keeps the iterate feasible
  for (size_t i = 0; i < raw.size(); ++i) out.a[i] = clamp01(raw[i] - hi);
  return out;
}

DensityField disk_indicator(const Grid2D& g, double R) {
  ensure(R >= 0.0 && R < g.L, "disk_indicator: radius must satisfy 0 <= R < L");
  DensityField out{g.n, std::vector<double>(static_cast<size_t>(g.cell_count()), 0.0)};
  const double R2 = R * R;
  for (int cj = 0; cj < g.n; ++cj)
    for (int ci = 0; ci < g.n; ++ci) {
      const double x = g.cell_x(ci), y = g.cell_y(cj);
      if (x * x + y * y < R2) out.a[static_cast<size_t>(g.cell_index(ci, cj))] = 1.0;
    }
  return out;
}

std::vector<double> complement_on_nodes(const DensityField& a, const Grid2D& g) {
  ensure(a.n == g.n, "complement_on_nodes: density does not match grid");
  std::vector<double> out(static_cast<size_t>(g.interior_count()));
  for (int j = 1; j < g.n; ++j)
    for (int i = 1; i < g.n; ++i) {
      const double sum = a.a[static_cast<size_t>(g.cell_index(i - 1, j - 1))] +
                         a.a[static_cast<size_t>(g.cell_index(i, j - 1))] +
                         a.a[static_cast<size_t>(g.cell_index(i - 1, j))] +
                         a.a[static_cast<size_t>(g.cell_index(i, j))];
      out[static_cast<size_t>(g.interior_index(i, j))] = 1.0 - 0.25 * sum;
    }
  return out;
}

std::vector<double> scatter_nodes_to_cells(const ScalarField& u, const Grid2D& g) {
  ensure(u.n == g.n, "scatter_nodes_to_cells: field does not match grid");
  std::vector<double> out(static_cast<size_t>(g.cell_count()), 0.0);
  for (int j = 1; j < g.n; ++j)
    for (int i = 1; i < g.n; ++i) {
      const double w = 0.25 * u.v[static_cast<size_t>(g.interior_index(i, j))];
      out[static_cast<size_t>(g.cell_index(i - 1, j - 1))] += w;
      out[static_cast<size_t>(g.cell_index(i, j - 1))] += w;
      out[static_cast<size_t>(g.cell_index(i - 1, j))] += w;
      out[static_cast<size_t>(g.cell_index(i, j))] += w;
    }
  return out;
}

namespace {

void write_csv_impl(const Grid2D& g, const char* kind, int rows, int cols,
                    const std::function<double(int, int)>& value, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_csv: cannot open " + path);
  os << "n,L,h,kind\n";
  os << g.n << ',' << std::setprecision(17) << g.L << ',' << g.h << ',' << kind << '\n';
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c) os << ',';
      os << std::setprecision(17) << value(r, c);
    }
    os << '\n';
  }
}

nlohmann::json json_header(const Grid2D& g, const char* kind) {
  nlohmann::json j;
  j["n"] = g.n;
  j["L"] = g.L;
  j["h"] = g.h;
  j["kind"] = kind;
  return j;
}

}  // namespace

void write_csv(const DensityField& a, const Grid2D& g, const std::string& path) {
  ensure(a.n == g.n, "write_csv: density does not match grid");
  write_csv_impl(
      g, "density", g.n, g.n,
      [&](int r, int c) { return a.a[static_cast<size_t>(g.cell_index(c, r))]; }, path);
}

void write_csv(const ScalarField& u, const Grid2D& g, const std::string& path) {
  ensure(u.n == g.n, "write_csv: field does not match grid");
  write_csv_impl(
      g, "scalar", g.n + 1, g.n + 1,
      [&](int r, int c) {
        if (r == 0 || c == 0 || r == g.n || c == g.n) return 0.0;
        return u.v[static_cast<size_t>(g.interior_index(c, r))];
      },
      path);
}

void write_json(const DensityField& a, const Grid2D& g, const std::string& path) {
  ensure(a.n == g.n, "write_json: density does not match grid");
  nlohmann::json j = json_header(g, "density");
  j["values"] = a.a;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_json: cannot open " + path);
  os << j.dump(2) << '\n';
}

void write_json(const ScalarField& u, const Grid2D& g, const std::string& path) {
  ensure(u.n == g.n, "write_json: field does not match grid");
  nlohmann::json j = json_header(g, "scalar");
  std::vector<double> full(static_cast<size_t>((g.n + 1) * (g.n + 1)), 0.0);
  for (int j2 = 1; j2 < g.n; ++j2)
    for (int i = 1; i < g.n; ++i)
      full[static_cast<size_t>(j2 * (g.n + 1) + i)] =
          u.v[static_cast<size_t>(g.interior_index(i, j2))];
  j["values"] = full;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_json: cannot open " + path);
  os << j.dump(2) << '\n';
}

DensityField read_density_csv(const std::string& path, const Grid2D& g) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("read_density_csv: cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("read_density_csv: empty file");
  if (!std::getline(is, line)) throw std::invalid_argument("read_density_csv: missing header");
  std::replace(line.begin(), line.end(), ',', ' ');
  std::istringstream hdr(line);
  int n = 0;
  double L = 0, h = 0;
  std::string kind;
  hdr >> n >> L >> h >> kind;
  if (n != g.n || std::fabs(L - g.L) > 1e-12 || kind != "density")
    throw std::invalid_argument("read_density_csv: header does not match grid");
  DensityField out{g.n, std::vector<double>(static_cast<size_t>(g.cell_count()), 0.0)};
  for (int r = 0; r < g.n; ++r) {
    if (!std::getline(is, line))
      throw std::invalid_argument("read_density_csv: truncated data");
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    for (int c = 0; c < g.n; ++c) {
      double v = 0;
      if (!(row >> v)) throw std::invalid_argument("read_density_csv: truncated row");
      out.a[static_cast<size_t>(g.cell_index(c, r))] = v;
    }
  }
  return out;
}

}
