#include "semshape/radial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "semshape/numerics.hpp"

namespace semshape {

namespace {

constexpr double kPi = 3.14159265358979323846;
// first zero of the Bessel function J0; (j01/R)^2 is the principal Dirichlet
// eigenvalue of the disk of radius R
constexpr double kBesselJ01 = 2.404825557695773;

void ensure(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Thomas elimination, sub/diag/super of sizes n-1, n, n-1.  Overwrites d with
// the solution.
void solve_tridiag(std::vector<double>& sub, std::vector<double>& diag,
                   std::vector<double>& super, std::vector<double>& d) {
  const size_t n = diag.size();
  for (size_t i = 1; i < n; ++i) {
    if (std::fabs(diag[i - 1]) < 1e-300)
      throw ConvergenceError("radial solve: tridiagonal pivot breakdown");
    const double w = sub[i - 1] / diag[i - 1];
    diag[i] -= w * super[i - 1];
    d[i] -= w * d[i - 1];
  }
  if (std::fabs(diag[n - 1]) < 1e-300)
    throw ConvergenceError("radial solve: tridiagonal pivot breakdown");
  d[n - 1] /= diag[n - 1];
  for (size_t i = n - 1; i-- > 0;) d[i] = (d[i] - super[i] * d[i + 1]) / diag[i];
}

// -(1/r)(r y')' + q y = s with the symmetric axis row (-(1/r)(r y')' tends to
// -2 y''(0)) and y(R) = yR.  q, s are full profiles (index 0..n_r); returns
// the full profile including the boundary value.
std::vector<double> solve_axis_form(const RadialGrid& rg, const std::vector<double>& q,
                                    const std::vector<double>& s, double yR) {
  const int N = rg.n_r;
  const double h2 = rg.h * rg.h;
  std::vector<double> sub(static_cast<size_t>(N - 1)), diag(static_cast<size_t>(N)),
      super(static_cast<size_t>(N - 1)), d(static_cast<size_t>(N));
  diag[0] = 4.0 / h2 + q[0];
  super[0] = -4.0 / h2;
  d[0] = s[0];
  for (int i = 1; i < N; ++i) {
    const double rm = rg.r[static_cast<size_t>(i)] - 0.5 * rg.h;
    const double rp = rg.r[static_cast<size_t>(i)] + 0.5 * rg.h;
    const double ri = rg.r[static_cast<size_t>(i)];
    sub[static_cast<size_t>(i - 1)] = -rm / (ri * h2);
    diag[static_cast<size_t>(i)] = 2.0 / h2 + q[static_cast<size_t>(i)];
    if (i < N - 1) super[static_cast<size_t>(i)] = -rp / (ri * h2);
    d[static_cast<size_t>(i)] = s[static_cast<size_t>(i)];
    if (i == N - 1) d[static_cast<size_t>(i)] += rp / (ri * h2) * yR;
  }
  solve_tridiag(sub, diag, super, d);
  d.push_back(yR);
  return d;
}

// Same operator with both ends pinned: y(0) = y0, y(R) = yR; q, s indexed on
// interior nodes 1..n_r-1 via the full layout.  Used by the angular modes,
// whose k^2/r^2 term rules out an axis row.
std::vector<double> solve_pinned_form(const RadialGrid& rg, const std::vector<double>& q,
                                      const std::vector<double>& s, double y0, double yR) {
  const int N = rg.n_r;
  const int n = N - 1;
  const double h2 = rg.h * rg.h;
  std::vector<double> sub(static_cast<size_t>(n - 1)), diag(static_cast<size_t>(n)),
      super(static_cast<size_t>(n - 1)), d(static_cast<size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const double ri = rg.r[static_cast<size_t>(i)];
    const double rm = ri - 0.5 * rg.h;
    const double rp = ri + 0.5 * rg.h;
    const int row = i - 1;
    if (row > 0) sub[static_cast<size_t>(row - 1)] = -rm / (ri * h2);
    diag[static_cast<size_t>(row)] = 2.0 / h2 + q[static_cast<size_t>(i)];
    if (row < n - 1) super[static_cast<size_t>(row)] = -rp / (ri * h2);
    d[static_cast<size_t>(row)] = s[static_cast<size_t>(i)];
    if (i == 1) d[static_cast<size_t>(row)] += rm / (ri * h2) * y0;
    if (i == N - 1) d[static_cast<size_t>(row)] += rp / (ri * h2) * yR;
  }
  solve_tridiag(sub, diag, super, d);
  std::vector<double> y(static_cast<size_t>(N + 1));
  y[0] = y0;
  for (int i = 1; i < N; ++i) y[static_cast<size_t>(i)] = d[static_cast<size_t>(i - 1)];
  y[static_cast<size_t>(N)] = yR;
  return y;
}

// -(r y')' + y / r = s (the flux form without the 1/r scaling of the
// divergence), y(0) = 0, y(R) = yR.  Carries the first-order expansions of
// the mode data.
std::vector<double> solve_flux_form(const RadialGrid& rg, const std::vector<double>& s,
                                    double yR) {
  const int N = rg.n_r;
  const int n = N - 1;
  const double h2 = rg.h * rg.h;
  std::vector<double> sub(static_cast<size_t>(n - 1)), diag(static_cast<size_t>(n)),
      super(static_cast<size_t>(n - 1)), d(static_cast<size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const double ri = rg.r[static_cast<size_t>(i)];
    const double rm = ri - 0.5 * rg.h;
    const double rp = ri + 0.5 * rg.h;
    const int row = i - 1;
    if (row > 0) sub[static_cast<size_t>(row - 1)] = -rm / h2;
    diag[static_cast<size_t>(row)] = 2.0 * ri / h2 + 1.0 / ri;
    if (row < n - 1) super[static_cast<size_t>(row)] = -rp / h2;
    d[static_cast<size_t>(row)] = s[static_cast<size_t>(i)];
    if (i == N - 1) d[static_cast<size_t>(row)] += rp / h2 * yR;
  }
  solve_tridiag(sub, diag, super, d);
  std::vector<double> y(static_cast<size_t>(N + 1));
  y[0] = 0.0;
  for (int i = 1; i < N; ++i) y[static_cast<size_t>(i)] = d[static_cast<size_t>(i - 1)];
  y[static_cast<size_t>(N)] = yR;
  return y;
}

// one-sided three-point first derivative at the outer boundary
double deriv_at_R(const std::vector<double>& y, double h) {
  const size_t N = y.size() - 1;
  return (3.0 * y[N] - 4.0 * y[N - 1] + y[N - 2]) / (2.0 * h);
}

// one-sided four-point second derivative at the outer boundary
double second_deriv_at_R(const std::vector<double>& y, double h) {
  const size_t N = y.size() - 1;
  return (2.0 * y[N] - 5.0 * y[N - 1] + 4.0 * y[N - 2] - y[N - 3]) / (h * h);
}

std::vector<double> radial_profile(const Source& g, const RadialGrid& rg) {
  ensure(g.analytic(), "radial solve: source must have a radial profile");
  std::vector<double> out(rg.r.size());
  for (size_t i = 0; i < rg.r.size(); ++i) out[i] = g.radial(rg.r[i]);
  return out;
}

double rho_bar_disk(const Nonlinearity& f, double R) {
  const double w = f.w1inf();
  const double lambda1 = (kBesselJ01 / R) * (kBesselJ01 / R);
  if (w <= 0.0) return kRhoBarCeiling;
  return std::min(kRhoBarCeiling, 0.99 * lambda1 / w);
}

double verdict_tolerance(const RadialSolution& rs) {
  return 1e-8 * kPi * rs.grid.R * std::max(1.0, rs.state_dR * rs.state_dR);
}

}  // namespace

RadialGrid make_radial_grid(double R, int n_r) {
  ensure(R > 0.0 && std::isfinite(R), "make_radial_grid: radius must be positive");
  ensure(n_r >= 64, "make_radial_grid: need at least 64 intervals");
  RadialGrid rg;
  rg.R = R;
  rg.n_r = n_r;
  rg.h = R / n_r;
  rg.r.resize(static_cast<size_t>(n_r + 1));
  for (int i = 0; i <= n_r; ++i) rg.r[static_cast<size_t>(i)] = R * i / n_r;
  return rg;
}

RadialSolution solve_radial_state_adjoint(const RadialGrid& rg, double rho,
                                          const Nonlinearity& f, const Source& g,
                                          const PicardOptions& opt) {
  ensure(rho >= 0.0 && std::isfinite(rho), "radial solve: rho must be non-negative");
  const double bar = rho_bar_disk(f, rg.R);
  if (rho >= bar) {
    std::ostringstream os;
    os << "radial solve: rho = " << rho << " is at or above the contraction threshold " << bar;
    throw std::invalid_argument(os.str());
  }

  const std::vector<double> gprof = radial_profile(g, rg);
  const size_t P = rg.r.size();
  const std::vector<double> q0(P, 0.0);

  RadialSolution rs;
  rs.grid = rg;
  rs.rho = rho;
  rs.state.assign(P, 0.0);

  std::vector<double> s(P);
  bool converged = false;
  for (int it = 1; it <= opt.max_iter; ++it) {
    for (size_t i = 0; i < P; ++i) s[i] = gprof[i] - rho * f.eval(rs.state[i], 0);
    std::vector<double> next = solve_axis_form(rg, q0, s, 0.0);
    double inc = 0.0;
    for (size_t i = 0; i < P; ++i) inc = std::max(inc, std::fabs(next[i] - rs.state[i]));
    rs.state = std::move(next);
    if (inc <= opt.tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw ConvergenceError("radial solve: fixed-point sweep exhausted its iteration budget");

  std::vector<double> q(P), sa(P);
  for (size_t i = 0; i < P; ++i) {
    q[i] = rho * f.eval(rs.state[i], 1);
    sa[i] = -rho * f.eval(rs.state[i], 0);
  }
  rs.adjoint = solve_axis_form(rg, q, sa, 0.0);

  rs.state_dR = deriv_at_R(rs.state, rg.h);
  rs.state_d2R = second_deriv_at_R(rs.state, rg.h);
  rs.adjoint_dR = deriv_at_R(rs.adjoint, rg.h);
  rs.boundary_product = rs.adjoint_dR * rs.state_dR - 0.5 * rs.state_dR * rs.state_dR;
  return rs;
}

ModeSolution solve_mode(const RadialSolution& rs, int k, const Nonlinearity& f,
                        const Source& g, const ModeOptions& mopt) {
  ensure(k >= 1, "solve_mode: mode index must be at least 1");
  const RadialGrid& rg = rs.grid;
  const size_t P = rg.r.size();
  const double rho = rs.rho;

  std::vector<double> q(P, 0.0), s(P, 0.0);
  for (size_t i = 1; i + 1 < P; ++i) {
    const double ri = rg.r[i];
    q[i] = static_cast<double>(k) * k / (ri * ri) + rho * f.eval(rs.state[i], 1);
  }

  ModeSolution ms;
  ms.k = k;
  ms.psi = solve_pinned_form(rg, q, s, 0.0, -rs.state_dR);

  for (size_t i = 1; i + 1 < P; ++i) {
    const double w = mopt.xi_source == XiSource::DerivativeWeighted
                         ? f.eval(rs.state[i], 1)
                         : 1.0;
    s[i] = -rho * w * ms.psi[i];
  }
  ms.xi = solve_pinned_form(rg, q, s, 0.0, 0.0);

  for (size_t i = 1; i + 1 < P; ++i)
    s[i] = -rho * ms.psi[i] * rs.adjoint[i] * f.eval(rs.state[i], 2);
  ms.zeta = solve_pinned_form(rg, q, s, 0.0, 0.0);

  ms.psi_dR = deriv_at_R(ms.psi, rg.h);
  ms.xi_dR = deriv_at_R(ms.xi, rg.h);
  ms.zeta_dR = deriv_at_R(ms.zeta, rg.h);

  const double R = rg.R;
  const double gR = g.radial(R);
  const double sp = rs.state_dR;
  const double ap = rs.adjoint_dR;
  // per-mode coefficient of the boundary quadratic form; the pi*R prefactor
  // is the circle average of the squared angular factor
  ms.omega = kPi * R *
             (-2.0 * ms.psi_dR * ap - sp * ms.zeta_dR - rs.state_d2R * ap - ms.xi_dR * sp -
              rs.boundary_product / R + sp * sp / (2.0 * R) + gR * sp - sp * ms.psi_dR);
  return ms;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable:
      return "stable";
    case Verdict::MarginallyStable:
      return "marginally-stable";
    case Verdict::Unstable:
      return "unstable";
  }
  return "unknown";
}

StabilityReport stability_verdict(const RadialSolution& rs, const Nonlinearity& f,
                                  const Source& g, int K, const ModeOptions& mopt) {
  ensure(K >= 8, "stability_verdict: need at least eight modes for the growth fit");
  const RadialGrid& rg = rs.grid;

  // the verdict machinery assumes a radial, non-increasing, non-negative load
  {
    const std::vector<double> prof = radial_profile(g, rg);
    for (size_t i = 0; i < prof.size(); ++i) {
      ensure(prof[i] >= 0.0, "stability_verdict: g must be non-negative");
      if (i) ensure(prof[i] <= prof[i - 1] + 1e-12, "stability_verdict: g must be non-increasing");
    }
  }

  StabilityReport rep;
  rep.K = K;
  rep.rho = rs.rho;
  rep.boundary_product = rs.boundary_product;
  rep.tolerance = verdict_tolerance(rs);

  for (int k = 1; k <= K; ++k) {
    const ModeSolution ms = solve_mode(rs, k, f, g, mopt);
    rep.omega.push_back(ms.omega);
    rep.psi_dR.push_back(ms.psi_dR);
    rep.xi_dR.push_back(ms.xi_dR);
    rep.zeta_dR.push_back(ms.zeta_dR);
  }

  // disk mean of g against its boundary trace
  {
    const double R = rg.R;
    std::vector<double> prof(rg.r.size());
    for (size_t i = 0; i < rg.r.size(); ++i) prof[i] = rg.r[i] * g.radial(rg.r[i]);
    const double integral = 2.0 * kPi * trapezoid(prof, rg.h);
    rep.c1 = integral / (kPi * R * R) - g.radial(R);
    rep.mean_lhs = 2.0 * kPi * R * R * g.radial(R);
    rep.mean_rhs = integral;
    rep.mean_condition = integral > 0.0 && rep.mean_lhs <= integral;
  }

  // linear-growth fit over the upper half of the spectrum
  {
    const int lo = std::max(1, (K + 1) / 2);
    std::vector<double> ks, om;
    for (int k = lo; k <= K; ++k) {
      ks.push_back(static_cast<double>(k));
      om.push_back(rep.omega[static_cast<size_t>(k - 1)]);
    }
    if (ks.size() >= 2) rep.fit_slope = fit_line(ks, om).slope;
  }

  const double min_omega = *std::min_element(rep.omega.begin(), rep.omega.end());
  if (min_omega < -rep.tolerance)
    rep.verdict = Verdict::Unstable;
  else if (min_omega <= rep.tolerance)
    rep.verdict = Verdict::MarginallyStable;
  else
    rep.verdict = Verdict::Stable;
  return rep;
}

PerturbationBundle perturbation_slope(const Nonlinearity& f, const Source& g, int n_r) {
  ensure(g.kind == Source::Kind::Constant && g.c0 == 1.0,
         "perturbation_slope: requires g identically 1");

  PerturbationBundle pb;
  pb.grid = make_radial_grid(1.0, n_r);
  const RadialGrid& rg = pb.grid;
  const size_t P = rg.r.size();

  // base state at rho = 0 and its boundary slope
  {
    const std::vector<double> q0(P, 0.0), s1(P, 1.0);
    pb.phi0 = solve_axis_form(rg, q0, s1, 0.0);
  }
  const double phi0_dR = deriv_at_R(pb.phi0, rg.h);

  // first correction of the state:  -(1/r)(r phi1')' = -f(phi0)
  {
    std::vector<double> q0(P, 0.0), s(P);
    for (size_t i = 0; i < P; ++i) s[i] = -f.eval(pb.phi0[i], 0);
    pb.phi1 = solve_axis_form(rg, q0, s, 0.0);
  }

  // boundary data shared by the mode expansion: the weighted load integral
  std::vector<double> prof(P);
  for (size_t i = 0; i < P; ++i) prof[i] = rg.r[i] * f.eval(pb.phi0[i], 0);
  const double I = trapezoid(prof, rg.h);

  // first-order mode data: y1 carries the derivative-weighted interior
  // coupling and the boundary correction, z1 carries the plain coupling
  std::vector<double> s(P, 0.0);
  for (size_t i = 0; i < P; ++i)
    s[i] = rg.r[i] * rg.r[i] * phi0_dR * f.eval(pb.phi0[i], 1);
  pb.y1 = solve_flux_form(rg, s, -I);
  for (size_t i = 0; i < P; ++i) s[i] = rg.r[i] * rg.r[i] * phi0_dR;
  pb.z1 = solve_flux_form(rg, s, 0.0);

  pb.w1.resize(P);
  for (size_t i = 0; i < P; ++i) pb.w1[i] = pb.y1[i] + pb.z1[i];
  pb.w1_at_R = pb.w1.back();
  pb.w1_dR = deriv_at_R(pb.w1, rg.h);
  pb.sigma = 0.25 * (pb.w1_at_R + pb.w1_dR);
  return pb;
}

InstabilityReport instability_demo(const Nonlinearity& f, const Source& g,
                                   const std::vector<double>& rho_list, int n_r) {
  ensure(g.kind == Source::Kind::Constant && g.c0 == 1.0,
         "instability_demo: requires g identically 1");
  ensure(!rho_list.empty(), "instability_demo: empty rho list");

  const RadialGrid rg = make_radial_grid(1.0, n_r);

  // base state, for the certification window [0, 2 sup phi0)
  double sup_phi0 = 0.0;
  {
    const std::vector<double> q0(rg.r.size(), 0.0), s1(rg.r.size(), 1.0);
    const std::vector<double> phi0 = solve_axis_form(rg, q0, s1, 0.0);
    for (double v : phi0) sup_phi0 = std::max(sup_phi0, v);
  }
  {
    const double hi = 2.0 * sup_phi0;
    for (int i = 0; i < 10000; ++i) {
      const double x = hi * i / 10000.0;  // right-open window
      ensure(f.eval(x, 0) >= 0.0,
             "instability_demo: f must be non-negative on the state range");
      ensure(f.eval(x, 1) < -1.0,
             "instability_demo: f' must stay below -1 on the state range");
    }
  }

  InstabilityReport rep;
  rep.sigma = perturbation_slope(f, g, n_r).sigma;
  rep.all_unstable = true;
  ModeOptions literal;
  literal.xi_source = XiSource::PlainPsi;  // matches the expansion behind sigma

  for (double rho : rho_list) {
    ensure(rho >= 0.0, "instability_demo: rho must be non-negative");
    const RadialSolution rs = solve_radial_state_adjoint(rg, rho, f, g);
    const ModeSolution m1 = solve_mode(rs, 1, f, g, literal);
    InstabilityRow row;
    row.rho = rho;
    row.omega1 = m1.omega;
    row.slope = rho > 0.0 ? m1.omega / (2.0 * kPi * rg.R * rho) : 0.0;
    const double tol = verdict_tolerance(rs);
    row.unstable = m1.omega < -tol;
    row.marginal = std::fabs(m1.omega) <= tol;
    if (rho > 0.0 && !row.unstable) rep.all_unstable = false;
    rep.rows.push_back(row);
  }
  return rep;
}

double radial_energy(const RadialSolution& rs, const Nonlinearity& f, const Source& g) {
  const RadialGrid& rg = rs.grid;
  std::vector<double> load(rg.r.size()), self(rg.r.size());
  for (size_t i = 0; i < rg.r.size(); ++i) {
    load[i] = rg.r[i] * g.radial(rg.r[i]) * rs.state[i];
    self[i] = rg.r[i] * rs.state[i] * f.eval(rs.state[i], 0);
  }
  return -kPi * trapezoid(load, rg.h) - kPi * rs.rho * trapezoid(self, rg.h);
}

}
