#include "semshape/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace semshape {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kSampleCount = 10000;

void ensure(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const size_t hi = static_cast<size_t>(it - xs.begin());
  const size_t lo = hi - 1;
  const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return (1.0 - t) * ys[lo] + t * ys[hi];
}

}  // namespace

double Nonlinearity::eval(double x, int order) const {
  ensure(order >= 0 && order <= 2, "nonlinearity: derivative order must be 0, 1 or 2");
  if (kind == NonlinearityKind::Zero) return 0.0;
  const bool outside = x < -trunc || x > trunc;
  const double xc = std::min(trunc, std::max(-trunc, x));
  if (order > 0 && outside) return 0.0;  // clamped argument freezes the value
  switch (kind) {
    case NonlinearityKind::Affine:
      if (order == 0) return p0 + p1 * xc;
      if (order == 1) return p1;
      return 0.0;
    case NonlinearityKind::NegExpSquare: {
      const double e = std::exp(xc * xc);
      if (order == 0) return -e;
      if (order == 1) return -2.0 * xc * e;
      return -(2.0 + 4.0 * xc * xc) * e;
    }
    case NonlinearityKind::Table:
      if (order == 0) return interp(tx, tf, xc);
      if (order == 1) return interp(tx, tfp, xc);
      return interp(tx, tfpp, xc);
    default:
      return 0.0;
  }
}

double Nonlinearity::sup_f() const {
  switch (kind) {
    case NonlinearityKind::Zero:
      return 0.0;
    case NonlinearityKind::Affine:
      return std::max(std::fabs(p0 - p1 * trunc), std::fabs(p0 + p1 * trunc));
    case NonlinearityKind::NegExpSquare:
      return std::exp(trunc * trunc);
    case NonlinearityKind::Table: {
      double s = 0.0;
      for (double v : tf) s = std::max(s, std::fabs(v));
      return s;
    }
  }
  return 0.0;
}

double Nonlinearity::sup_fp() const {
  switch (kind) {
    case NonlinearityKind::Zero:
      return 0.0;
    case NonlinearityKind::Affine:
      return std::fabs(p1);
    case NonlinearityKind::NegExpSquare:
      return 2.0 * trunc * std::exp(trunc * trunc);
    case NonlinearityKind::Table: {
      double s = 0.0;
      for (double v : tfp) s = std::max(s, std::fabs(v));
      return s;
    }
  }
  return 0.0;
}

double Nonlinearity::w1inf() const { return std::max(sup_f(), sup_fp()); }

Nonlinearity zero_nonlinearity() { return Nonlinearity{}; }

Nonlinearity affine_nonlinearity(double a, double b, double trunc) {
  ensure(trunc > 0.0 && std::isfinite(trunc), "nonlinearity: truncation window must be positive");
  Nonlinearity f;
  f.kind = NonlinearityKind::Affine;
  f.p0 = a;
  f.p1 = b;
  f.trunc = trunc;
  return f;
}

Nonlinearity neg_exp_square(double trunc) {
  ensure(trunc > 0.0 && std::isfinite(trunc), "nonlinearity: truncation window must be positive");
  Nonlinearity f;
  f.kind = NonlinearityKind::NegExpSquare;
  f.trunc = trunc;
  return f;
}

Nonlinearity one_minus_two_x() { return affine_nonlinearity(1.0, -2.0, 1.0); }

Nonlinearity table_nonlinearity(std::vector<double> x, std::vector<double> f,
                                std::vector<double> fp, std::vector<double> fpp) {
  ensure(x.size() >= 2 && x.size() == f.size() && x.size() == fp.size() && x.size() == fpp.size(),
         "nonlinearity: table needs matching knot/value arrays");
  ensure(std::is_sorted(x.begin(), x.end()), "nonlinearity: table knots must increase");
  Nonlinearity out;
  out.kind = NonlinearityKind::Table;
  out.trunc = std::max(std::fabs(x.front()), std::fabs(x.back()));
  out.tx = std::move(x);
  out.tf = std::move(f);
  out.tfp = std::move(fp);
  out.tfpp = std::move(fpp);
  return out;
}

double Source::at(double x, double y) const {
  switch (kind) {
    case Kind::Constant:
      return c0;
    case Kind::RadialAffine:
      return c0 + c1 * std::sqrt(x * x + y * y);
    case Kind::NodalField:
      throw std::invalid_argument("source: nodal field has no pointwise evaluator");
  }
  return 0.0;
}

double Source::radial(double r) const {
  switch (kind) {
    case Kind::Constant:
      return c0;
    case Kind::RadialAffine:
      return c0 + c1 * r;
    case Kind::NodalField:
      throw std::invalid_argument("source: nodal field has no radial profile");
  }
  return 0.0;
}

Source constant_source(double c) {
  Source s;
  s.kind = Source::Kind::Constant;
  s.c0 = c;
  s.radial_nonincreasing = c >= 0.0;
  return s;
}

Source radial_affine_source(double c0, double c1) {
  Source s;
  s.kind = Source::Kind::RadialAffine;
  s.c0 = c0;
  s.c1 = c1;
  s.radial_nonincreasing = c1 <= 0.0;  // non-negativity still checked per grid
  return s;
}

Source field_source(const Grid2D& g, std::vector<double> interior_values) {
  ensure(interior_values.size() == static_cast<size_t>(g.interior_count()),
         "source: field values do not match grid");
  Source s;
  s.kind = Source::Kind::NodalField;
  s.field_n = g.n;
  s.field = std::move(interior_values);
  return s;
}

std::vector<double> sample_nodes(const Source& g, const Grid2D& grid) {
  if (g.kind == Source::Kind::NodalField) {
    ensure(g.field_n == grid.n, "source: field was built for a different grid");
    return g.field;
  }
  std::vector<double> out(static_cast<size_t>(grid.interior_count()));
  for (int j = 1; j < grid.n; ++j)
    for (int i = 1; i < grid.n; ++i)
      out[static_cast<size_t>(grid.interior_index(i, j))] = g.at(grid.node_x(i), grid.node_y(j));
  return out;
}

double sample_cell(const Source& g, const Grid2D& grid, int ci, int cj) {
  if (g.kind != Source::Kind::NodalField) return g.at(grid.cell_x(ci), grid.cell_y(cj));
  ensure(g.field_n == grid.n, "source: field was built for a different grid");
  // average the interior corner nodes of the cell
  double sum = 0.0;
  int cnt = 0;
  for (int dj = 0; dj <= 1; ++dj)
    for (int di = 0; di <= 1; ++di) {
      const int i = ci + di, j = cj + dj;
      if (i >= 1 && i < grid.n && j >= 1 && j < grid.n) {
        sum += g.field[static_cast<size_t>(grid.interior_index(i, j))];
        ++cnt;
      }
    }
  return cnt ? sum / cnt : 0.0;
}

double lambda1_lower_bound(const Grid2D& g) {
  const double side = 2.0 * g.L;
  return 2.0 * kPi * kPi / (side * side);
}

double rho_bar(const Nonlinearity& f, const Grid2D& g) {
  const double w = f.w1inf();
  if (w <= 0.0) return kRhoBarCeiling;
  return std::min(kRhoBarCeiling, 0.99 * lambda1_lower_bound(g) / w);
}

HypothesisReport check_hypotheses(const Nonlinearity& f, const Source& g,
                                  double m, const Grid2D& grid) {
  ensure(m > 0.0, "check_hypotheses: mass budget must be positive");
  HypothesisReport rep;
  rep.lambda1_lb = lambda1_lower_bound(grid);
  // sup bound of the box torsion function, dimension 2
  rep.torsion_bound = 0.25 * grid.area() / kPi;
  rep.rho_bar = rho_bar(f, grid);

  // positivity box for g
  double g_min = 0.0, g_max = 0.0;
  {
    bool first = true;
    for (int cj = 0; cj < grid.n; ++cj)
      for (int ci = 0; ci < grid.n; ++ci) {
        const double v = sample_cell(g, grid, ci, cj);
        if (first) {
          g_min = g_max = v;
          first = false;
        } else {
          g_min = std::min(g_min, v);
          g_max = std::max(g_max, v);
        }
      }
  }
  if (g.h1_bounds) {
    const auto [g0, g1] = *g.h1_bounds;
    ensure(g0 > 0.0 && g0 < g1, "check_hypotheses: declared bounds need 0 < g0 < g1");
    ensure(g_min >= g0 - 1e-12 && g_max <= g1 + 1e-12,
           "check_hypotheses: sampled g violates the declared bounds");
    rep.h1 = true;
    std::ostringstream os;
    os << "g in [" << g_min << ", " << g_max << "] within declared [" << g0 << ", " << g1 << "]";
    rep.h1_detail = os.str();
  } else {
    rep.h1_detail = "no positivity box declared";
  }

  // a-priori sup bound for states: (g1 + rho_bar ||f||_inf) * torsion bound,
  // with the declared or sampled upper envelope of g
  const double g_hi = g.h1_bounds ? g.h1_bounds->second : std::max(g_max, 0.0);
  rep.n_mg = (g_hi + rep.rho_bar * f.sup_f()) * rep.torsion_bound;
  rep.delta = 0.1 * rep.n_mg;

  // monotone-slope window: x f(x) non-decreasing on [0, n_mg + delta]
  {
    const double hi = rep.n_mg + rep.delta;
    bool mono = f.eval(0.0, 0) <= 0.0;
    std::string why = mono ? "" : "f(0) > 0";
    if (mono && hi > 0.0) {
      double prev = 0.0;
      for (int s = 1; s <= kSampleCount; ++s) {
        const double x = hi * s / kSampleCount;
        const double xi = x * f.eval(x, 0);
        if (xi < prev - 1e-14 * std::max(1.0, std::fabs(prev))) {
          mono = false;
          std::ostringstream os;
          os << "x f(x) decreases near x = " << x;
          why = os.str();
          break;
        }
        prev = xi;
      }
    }
    rep.h2 = mono;
    rep.h2_detail = mono ? "f(0) <= 0 and x f(x) non-decreasing on the state range" : why;
  }

  // steep-decrease window: f(0) < 0 and x f(x) strictly decreasing
  {
    const double hi = std::max(rep.n_mg + rep.delta, f.trunc);
    bool dec = f.eval(0.0, 0) < 0.0;
    std::string why = dec ? "" : "f(0) >= 0";
    if (dec && hi > 0.0) {
      double prev = 0.0;
      for (int s = 1; s <= kSampleCount; ++s) {
        const double x = hi * s / kSampleCount;
        const double xi = x * f.eval(x, 0);
        if (xi >= prev) {
          dec = false;
          std::ostringstream os;
          os << "x f(x) fails to decrease near x = " << x;
          why = os.str();
          break;
        }
        prev = xi;
      }
    }
    rep.h4 = dec;
    rep.h4_detail = dec ? "f(0) < 0 and x f(x) strictly decreasing" : why;
  }

  // small-rho threshold: keeps the state uniformly positive (needs the box)
  // and the linearized operator coercive
  if (rep.h1) {
    const double g0 = g.h1_bounds->first;
    const double denom = f.sup_f() + rep.n_mg * f.sup_fp();
    const double first = denom > 0.0 ? g0 / denom : kRhoBarCeiling;
    const double second = f.sup_fp() > 0.0 ? rep.lambda1_lb / (2.0 * f.sup_fp()) : kRhoBarCeiling;
    // the contraction threshold still applies in the positivity regime
    rep.rho1 = std::min({first, second, rep.rho_bar});
  } else {
    rep.rho1 = rep.rho_bar;
  }
  rep.rho0 = std::min(rep.rho_bar, rep.rho1);
  return rep;
}

}
