#include "semshape/validation.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <vector>

#include "semshape/numerics.hpp"
#include "semshape/objective.hpp"
#include "semshape/optimizer.hpp"
#include "semshape/problem.hpp"
#include "semshape/radial.hpp"

namespace semshape {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error(msg);
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

PicardOptions tight_solve() {
  PicardOptions po;
  po.tol = 1e-12;
  po.linear.tol = 1e-12;
  return po;
}

DensityField random_density(const Grid2D& g, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  DensityField a;
  a.n = g.n;
  a.a.resize(static_cast<size_t>(g.cell_count()));
  for (double& v : a.a) v = dist(rng);
  return a;
}

// staggered sup norm of the derivative of a radial profile
double profile_deriv_sup(const std::vector<double>& y, double h) {
  double s = 0.0;
  for (size_t i = 0; i + 1 < y.size(); ++i) s = std::max(s, std::fabs(y[i + 1] - y[i]) / h);
  return s;
}

LineFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (size_t i = 0; i < x.size(); ++i) {
    lx[i] = std::log10(x[i]);
    ly[i] = std::log10(y[i]);
  }
  return fit_line(lx, ly);
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> out;
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < count; ++i)
    out.push_back(std::pow(10.0, a + (b - a) * i / (count - 1)));
  return out;
}

// ---- the individual release checks ----------------------------------------

void check_radial_state(std::ostringstream& detail) {
  const RadialGrid rg = make_radial_grid(1.0, 4096);
  const RadialSolution rs =
      solve_radial_state_adjoint(rg, 0.0, zero_nonlinearity(), constant_source(1.0));
  double sup = 0.0;
  for (size_t i = 0; i < rg.r.size(); ++i) {
    const double exact = 0.25 * (1.0 - rg.r[i] * rg.r[i]);
    sup = std::max(sup, std::fabs(rs.state[i] - exact));
  }
  const double slope_err = std::fabs(-rs.state_dR - 0.5);
  detail << "sup err " << num(sup) << ", boundary slope err " << num(slope_err);
  require(sup <= 1e-6, "state deviates from the parabolic profile by " + num(sup));
  require(slope_err <= 1e-5, "boundary slope off by " + num(slope_err));
}

std::vector<double> flat_disk_spectrum(int K) {
  const RadialGrid rg = make_radial_grid(1.0, 4096);
  const Source g = constant_source(1.0);
  const Nonlinearity f = zero_nonlinearity();
  const RadialSolution rs = solve_radial_state_adjoint(rg, 0.0, f, g);
  std::vector<double> omega;
  for (int k = 1; k <= K; ++k) omega.push_back(solve_mode(rs, k, f, g).omega);
  return omega;
}

void check_mode_spectrum(std::ostringstream& detail) {
  const std::vector<double> omega = flat_disk_spectrum(20);
  require(std::fabs(omega[0]) <= 1e-6 * kPi,
          "translation mode coefficient is " + num(omega[0]) + ", expected 0");
  double worst = 0.0;
  for (int k = 2; k <= 20; ++k) {
    const double exact = kPi * (k - 1) / 4.0;
    worst = std::max(worst, std::fabs(omega[static_cast<size_t>(k - 1)] - exact) / exact);
  }
  detail << "omega_1 = " << num(omega[0]) << ", worst rel err " << num(worst);
  require(worst <= 1e-3, "spectrum deviates by relative " + num(worst));
}

void check_stable_profile(std::ostringstream& detail) {
  const RadialGrid rg = make_radial_grid(1.0, 4096);
  const Source g = radial_affine_source(2.0, -1.0);
  const Nonlinearity f = zero_nonlinearity();
  const RadialSolution rs = solve_radial_state_adjoint(rg, 0.0, f, g);
  const StabilityReport rep = stability_verdict(rs, f, g, 20);
  const double w1_err = std::fabs(rep.omega[0] - 2.0 * kPi / 9.0);
  const double c1_err = std::fabs(rep.c1 - 1.0 / 3.0);
  detail << "omega_1 = " << num(rep.omega[0]) << ", c1 = " << num(rep.c1) << ", verdict "
         << to_string(rep.verdict);
  require(w1_err <= 1e-3, "leading coefficient off by " + num(w1_err));
  require(rep.verdict == Verdict::Stable, "expected a stable verdict");
  require(c1_err <= 1e-4, "mean criterion off by " + num(c1_err));
}

void check_instability_slope(std::ostringstream& detail) {
  const Nonlinearity f = one_minus_two_x();
  const Source g = constant_source(1.0);
  const double sigma_exact = -7.0 / 32.0;

  const PerturbationBundle pb = perturbation_slope(f, g, 4096);
  require(std::fabs(pb.sigma - sigma_exact) <= 1e-4,
          "closed-form slope is " + num(pb.sigma) + ", expected " + num(sigma_exact));

  const InstabilityReport rep = instability_demo(f, g, {1e-2, 1e-3}, 4096);
  detail << "sigma = " << num(pb.sigma);
  const double windows[2] = {0.10, 0.03};
  for (size_t i = 0; i < rep.rows.size(); ++i) {
    const InstabilityRow& row = rep.rows[i];
    const double ratio = row.slope / sigma_exact;
    detail << ", slope(" << num(row.rho) << ")/sigma = " << num(ratio);
    require(row.unstable, "mode 1 not negative at rho = " + num(row.rho));
    require(ratio >= 1.0 - windows[i] && ratio <= 1.0 + windows[i],
            "normalized slope ratio " + num(ratio) + " outside the " +
                num(windows[i]) + " window at rho = " + num(row.rho));
  }
}

void check_switching_gradient(std::ostringstream& detail, std::uint64_t seed) {
  const Grid2D grid = make_grid(1.0, 64);
  const Nonlinearity f = one_minus_two_x();
  const Source g = constant_source(1.0);
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int round = 0; round < 4; ++round) {
    const DensityField a = random_density(grid, rng, 0.15, 0.85);
    const GradientCheckReport rep =
        gradient_check(grid, a, 100.0, 0.05, f, g, 5, rng(), 1e-5, tight_solve());
    worst = std::max(worst, rep.max_rel_error);
  }
  detail << "max rel mismatch " << num(worst) << " over 20 trials";
  require(worst <= 1e-4, "derivative mismatch " + num(worst));
}

void check_monotonicity(std::ostringstream& detail, std::uint64_t seed) {
  const Grid2D grid = make_grid(1.0, 64);
  const Nonlinearity f = one_minus_two_x();
  Source g = radial_affine_source(2.0, -0.35);
  g.h1_bounds = {1.0, 2.0};
  g.radial_nonincreasing = true;
  const double m = 0.5 * grid.area();
  const HypothesisReport hyp = check_hypotheses(f, g, m, grid);
  require(hyp.h1, "positivity box not certified: " + hyp.h1_detail);
  const double rho = 0.5 * hyp.rho1;
  const MonotonicityReport rep =
      monotonicity_probe(grid, rho, f, g, m, 1e3, 50, seed, tight_solve());
  detail << "rho = " << num(rho) << ", violations " << rep.violations << "/" << rep.trials
         << ", worst gap " << num(rep.worst_gap);
  require(rep.violations == 0,
          std::to_string(rep.violations) + " ordered pairs broke monotonicity");
}

void check_state_rho_slope(std::ostringstream& detail, std::uint64_t seed) {
  const Grid2D grid = make_grid(1.0, 64);
  const Nonlinearity f = one_minus_two_x();
  const Source g = constant_source(1.0);
  std::mt19937_64 rng(seed);
  const DensityField a = random_density(grid, rng, 0.0, 1.0);
  const PicardOptions po = tight_solve();
  const ScalarField base = solve_semilinear(grid, a, 100.0, 0.0, f, g, po);
  const std::vector<double> rhos = log_spaced(1e-3, 1e-1, 5);
  std::vector<double> diffs;
  for (double rho : rhos) {
    const ScalarField u = solve_semilinear(grid, a, 100.0, rho, f, g, po);
    double sup = 0.0;
    for (size_t i = 0; i < u.v.size(); ++i) sup = std::max(sup, std::fabs(u.v[i] - base.v[i]));
    diffs.push_back(sup);
  }
  const LineFit fit = loglog_fit(rhos, diffs);
  detail << "slope " << num(fit.slope) << ", R^2 " << num(fit.r2);
  require(std::fabs(fit.slope - 1.0) <= 0.1, "perturbation order is " + num(fit.slope));
  require(fit.r2 >= 0.99, "power-law fit quality " + num(fit.r2));
}

void check_penalization_limit(std::ostringstream& detail) {
  const Grid2D grid = make_grid(2.0, 256);
  const DensityField a = disk_indicator(grid, 1.0);
  const std::vector<MContinuationRow> rows = m_continuation_probe(
      grid, a, 0.0, zero_nonlinearity(), constant_source(1.0), {1e2, 1e3, 1e4, 1e5});
  std::vector<double> incr;
  for (size_t i = 1; i < rows.size(); ++i)
    incr.push_back(std::fabs(rows[i].value - rows[i - 1].value));
  for (size_t i = 1; i < incr.size(); ++i)
    require(incr[i] <= incr[i - 1], "penalization increments are not contracting");
  for (size_t i = 1; i < rows.size(); ++i)
    require(rows[i].outside_mass_sq <= rows[i - 1].outside_mass_sq,
            "escaped mass grew when the penalty tightened");
  const double target = -kPi / 16.0;
  const double gap = std::fabs(rows.back().value - target);
  detail << "final value " << num(rows.back().value) << ", oracle gap " << num(gap)
         << ", escaped mass " << num(rows.back().outside_mass_sq);
  require(gap <= 3e-2, "limit value misses the disk oracle by " + num(gap));
}

void check_mode_data_scaling(std::ostringstream& detail) {
  const Nonlinearity f = neg_exp_square(1.0);
  const Source g = constant_source(1.0);
  const RadialGrid rg = make_radial_grid(1.0, 2048);
  const std::vector<double> rhos = log_spaced(1e-3, 1e-1, 5);
  std::vector<double> adj_norm, xi_norm, zeta_norm;
  for (double rho : rhos) {
    const RadialSolution rs = solve_radial_state_adjoint(rg, rho, f, g, tight_solve());
    const ModeSolution m1 = solve_mode(rs, 1, f, g);
    adj_norm.push_back(profile_deriv_sup(rs.adjoint, rg.h));
    xi_norm.push_back(profile_deriv_sup(m1.xi, rg.h));
    zeta_norm.push_back(profile_deriv_sup(m1.zeta, rg.h));
  }
  const double s_adj = loglog_fit(rhos, adj_norm).slope;
  const double s_xi = loglog_fit(rhos, xi_norm).slope;
  const double s_zeta = loglog_fit(rhos, zeta_norm).slope;
  detail << "orders: adjoint " << num(s_adj) << ", first companion " << num(s_xi)
         << ", second companion " << num(s_zeta);
  require(std::fabs(s_adj - 1.0) <= 0.15, "adjoint order is " + num(s_adj));
  require(std::fabs(s_xi - 1.0) <= 0.15, "first companion order is " + num(s_xi));
  require(std::fabs(s_zeta - 2.0) <= 0.15, "second companion order is " + num(s_zeta));
}

void check_hole_sensitivity(std::ostringstream& detail) {
  const Grid2D grid = make_grid(1.0, 128);
  const DensityField a = disk_indicator(grid, 0.6);
  const Nonlinearity f = neg_exp_square(1.0);
  const Source g = constant_source(0.0);
  const double rho = 0.05, M = 1e4;
  const PicardOptions po = tight_solve();

  const ScalarField field = topological_sign_field(grid, a, rho, f, g, M, po);
  int material = 0, negative = 0;
  for (int j = 1; j < grid.n; ++j)
    for (int i = 1; i < grid.n; ++i) {
      bool inside = true;
      for (int cj = j - 1; cj <= j && inside; ++cj)
        for (int ci = i - 1; ci <= i && inside; ++ci)
          inside = a.a[static_cast<size_t>(grid.cell_index(ci, cj))] >= 0.5;
      if (!inside) continue;
      ++material;
      if (field.v[static_cast<size_t>(grid.interior_index(i, j))] < 0.0) ++negative;
    }
  require(material > 0, "indicator produced no interior nodes");
  const double frac = static_cast<double>(negative) / material;

  const double eps = 4.0 * grid.h;
  DensityField holed = a;
  for (int cj = 0; cj < grid.n; ++cj)
    for (int ci = 0; ci < grid.n; ++ci) {
      const double x = grid.cell_x(ci), y = grid.cell_y(cj);
      if (x * x + y * y < eps * eps) holed.a[static_cast<size_t>(grid.cell_index(ci, cj))] = 0.0;
    }
  const double before = objective_value(grid, a, M, rho, f, g, po);
  const double after = objective_value(grid, holed, M, rho, f, g, po);
  detail << "negative share " << num(frac) << ", hole gain " << num(after - before);
  require(frac >= 0.99, "sign field negative on only " + num(100 * frac) + "% of nodes");
  require(after < before, "opening the hole did not lower the energy");
}

void check_spectrum_growth(std::ostringstream& detail) {
  const std::vector<double> omega = flat_disk_spectrum(20);
  std::vector<double> ks, om;
  for (int k = 10; k <= 20; ++k) {
    ks.push_back(static_cast<double>(k));
    om.push_back(omega[static_cast<size_t>(k - 1)]);
  }
  const LineFit fit = fit_line(ks, om);
  const double target = kPi / 4.0;
  const double rel = std::fabs(fit.slope - target) / target;
  detail << "growth rate " << num(fit.slope) << " vs " << num(target);
  require(rel <= 0.02, "growth rate off by relative " + num(rel));
}

}  // namespace

std::vector<CheckResult> run_validation_suite(std::ostream& log, std::uint64_t seed) {
  using Clock = std::chrono::steady_clock;
  std::vector<CheckResult> results;

  const auto run = [&](const std::string& name,
                       const std::function<void(std::ostringstream&)>& body) {
    CheckResult r;
    r.name = name;
    std::ostringstream detail;
    const auto t0 = Clock::now();
    try {
      body(detail);
      r.pass = true;
    } catch (const std::exception& e) {
      r.pass = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.detail = detail.str();
    log << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " (" << num(r.seconds)
        << " s): " << r.detail << "\n";
    results.push_back(std::move(r));
  };

  run("radial-state-closed-form", check_radial_state);
  run("mode-spectrum-closed-form", check_mode_spectrum);
  run("stable-profile-spectrum", check_stable_profile);
  run("instability-slope-match", check_instability_slope);
  run("switching-gradient-fd",
      [&](std::ostringstream& d) { check_switching_gradient(d, seed ^ 0x5u); });
  run("nested-density-monotonicity",
      [&](std::ostringstream& d) { check_monotonicity(d, seed ^ 0x6u); });
  run("state-rho-lipschitz-slope",
      [&](std::ostringstream& d) { check_state_rho_slope(d, seed ^ 0x7u); });
  run("penalization-limit", check_penalization_limit);
  run("mode-data-rho-scaling", check_mode_data_scaling);
  run("hole-sensitivity-sign", check_hole_sensitivity);
  run("spectrum-linear-growth", check_spectrum_growth);
  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const CheckResult& r : results)
    if (!r.pass) return false;
  return true;
}

}
