#include "semshape/optimizer.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace semshape {

namespace {

void ensure(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double binariness(const DensityField& a, const Grid2D& g) {
  double s = 0.0;
  for (double v : a.a) s += v * (1.0 - v);
  return s * g.h * g.h / g.area();
}

// scaled L2 distance between densities: ||a - b||_2 / sqrt(|D|)
double scaled_move(const DensityField& a, const DensityField& b, const Grid2D& g) {
  double s = 0.0;
  for (size_t i = 0; i < a.a.size(); ++i) {
    const double d = a.a[i] - b.a[i];
    s += d * d;
  }
  return std::sqrt(s * g.h * g.h / g.area());
}

}  // namespace

OptimizeResult optimize(const OptimizeConfig& cfg) {
  ensure(!cfg.M_schedule.empty(), "optimize: penalization schedule is empty");
  for (size_t i = 1; i < cfg.M_schedule.size(); ++i)
    ensure(cfg.M_schedule[i] > cfg.M_schedule[i - 1],
           "optimize: penalization schedule must increase");
  ensure(cfg.m > 0.0, "optimize: mass budget must be positive");

  const Grid2D& grid = cfg.grid;
  OptimizeResult res;
  res.density = project_density(cfg.initial.a, cfg.m, grid);
  double step = cfg.step0;

  for (size_t stage = 0; stage < cfg.M_schedule.size(); ++stage) {
    const double M = cfg.M_schedule[stage];
    for (int iter = 1; iter <= cfg.max_iter_per_stage; ++iter) {
      const ObjectiveBundle bundle =
          evaluate_objective(grid, res.density, M, cfg.rho, cfg.f, cfg.g, cfg.solve);
      const std::vector<double> grad = switching_on_cells(grid, bundle);

      // Backtracking on the projected step.  The quota compares against the
      // squared projected-gradient norm at the attempted step length.
      double s = step;
      bool accepted = false;
      DensityField trial{grid.n, {}};
      double trial_value = 0.0, pg2 = 0.0, slack = 0.0;
      for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
        std::vector<double> moved(res.density.a);
        for (size_t i = 0; i < moved.size(); ++i) moved[i] -= s * grad[i];
        trial = project_density(moved, cfg.m, grid);
        pg2 = 0.0;
        for (size_t i = 0; i < moved.size(); ++i) {
          const double pg = (res.density.a[i] - trial.a[i]) / s;
          pg2 += pg * pg;
        }
        pg2 *= grid.h * grid.h;
        if (pg2 == 0.0) {  // fixed point of the projected step
          trial_value = bundle.value;
          accepted = true;
          break;
        }
        trial_value = objective_value(grid, trial, M, cfg.rho, cfg.f, cfg.g, cfg.solve);
        const double quota = cfg.armijo_slope * s * pg2;
        if (trial_value <= bundle.value - quota) {
          slack = (bundle.value - trial_value) - quota;
          accepted = true;
          break;
        }
        s *= cfg.backtrack;
      }

      if (!accepted) {
        res.stalled = true;
        std::ostringstream os;
        os << "line search stalled after " << cfg.max_backtracks << " halvings at M = " << M
           << ", iteration " << iter;
        res.stall_reason = os.str();
        break;
      }

      const double move = scaled_move(trial, res.density, grid);
      res.history.push_back(IterationRecord{static_cast<int>(stage), M, iter, trial_value,
                                            mass(trial, grid), binariness(trial, grid), s,
                                            move, slack});
      res.density = trial;
      step = std::min(s * 1.5, 1e3);  // let the next iteration probe a longer step
      if (move <= cfg.move_tol) break;
    }
    res.stage_binariness.push_back(binariness(res.density, grid));
    if (res.stalled) break;
  }

  res.value = objective_value(grid, res.density, cfg.M_schedule.back(), cfg.rho, cfg.f,
                              cfg.g, cfg.solve);
  return res;
}

std::vector<MContinuationRow> m_continuation_probe(const Grid2D& grid, const DensityField& a,
                                                   double rho, const Nonlinearity& f,
                                                   const Source& g,
                                                   const std::vector<double>& Ms,
                                                   const PicardOptions& opt) {
  ensure(!Ms.empty(), "m_continuation_probe: need at least one penalization value");
  std::vector<MContinuationRow> rows;
  const std::vector<double> comp = complement_on_nodes(a, grid);
  for (double M : Ms) {
    ensure(M >= 0.0, "m_continuation_probe: penalization must be non-negative");
    MContinuationRow row;
    row.M = M;
    const ScalarField u = solve_semilinear(grid, a, M, rho, f, g, opt);
    row.value = value_from_state(grid, a, M, u, g);
    double esc = 0.0;
    for (size_t i = 0; i < u.v.size(); ++i) esc += comp[i] * u.v[i] * u.v[i];
    row.outside_mass_sq = esc * grid.h * grid.h;
    rows.push_back(row);
  }
  return rows;
}

MonotonicityReport monotonicity_probe(const Grid2D& grid, double rho, const Nonlinearity& f,
                                      const Source& g, double m, double M, int trials,
                                      std::uint64_t seed, const PicardOptions& opt) {
  ensure(trials > 0, "monotonicity_probe: need at least one trial");
  ensure(m > 0.0, "monotonicity_probe: mass budget must be positive");
  MonotonicityReport rep;
  rep.trials = trials;
  rep.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const size_t C = static_cast<size_t>(grid.cell_count());

  for (int t = 0; t < trials; ++t) {
    DensityField a1{grid.n, std::vector<double>(C)};
    DensityField a2{grid.n, std::vector<double>(C)};
    for (size_t i = 0; i < C; ++i) {
      const double x = uni(rng), y = uni(rng);
      a1.a[i] = std::min(x, y);
      a2.a[i] = std::max(x, y);
    }
    // one common scaling keeps the nesting and lands both inside the budget
    const double m2 = mass(a2, grid);
    if (m2 > m) {
      const double sc = m / m2;
      for (size_t i = 0; i < C; ++i) {
        a1.a[i] *= sc;
        a2.a[i] *= sc;
      }
    }
    const double j1 = objective_value(grid, a1, M, rho, f, g, opt);
    const double j2 = objective_value(grid, a2, M, rho, f, g, opt);
    const double gap = j1 - j2;  // should be >= 0: more material, lower energy
    rep.gaps.push_back(gap);
    rep.worst_gap = std::min(rep.worst_gap, gap);
    if (gap < -1e-10) ++rep.violations;
  }
  return rep;
}

ScalarField topological_sign_field(const Grid2D& grid, const DensityField& a, double rho,
                                   const Nonlinearity& f, const Source& g, double M,
                                   const PicardOptions& opt) {
  // needs the sign structure of a strictly decreasing x f(x) with f(0) < 0
  ensure(f.eval(0.0, 0) < 0.0, "topological_sign_field: requires f(0) < 0");
  {
    const double hi = std::max(1.0, f.trunc * 2.0);
    double prev = 0.0;
    for (int s = 1; s <= 10000; ++s) {
      const double x = hi * s / 10000.0;
      const double xi = x * f.eval(x, 0);
      ensure(xi < prev, "topological_sign_field: requires x f(x) strictly decreasing");
      prev = xi;
    }
  }
  if (g.analytic()) {
    ensure(g.radial(0.0) == 0.0 && g.radial(1.0) == 0.0,
           "topological_sign_field: requires g == 0");
  } else {
    for (double v : g.field)
      ensure(v == 0.0, "topological_sign_field: requires g == 0");
  }

  const ObjectiveBundle b = evaluate_objective(grid, a, M, rho, f, g, opt);
  ScalarField out = zero_scalar(grid);
  for (int j = 1; j < grid.n; ++j)
    for (int i = 1; i < grid.n; ++i) {
      const bool interior_material =
          a.a[static_cast<size_t>(grid.cell_index(i - 1, j - 1))] >= 0.5 &&
          a.a[static_cast<size_t>(grid.cell_index(i, j - 1))] >= 0.5 &&
          a.a[static_cast<size_t>(grid.cell_index(i - 1, j))] >= 0.5 &&
          a.a[static_cast<size_t>(grid.cell_index(i, j))] >= 0.5;
      if (!interior_material) continue;
      const size_t idx = static_cast<size_t>(grid.interior_index(i, j));
      out.v[idx] = b.state.v[idx] * b.combined.v[idx];
    }
  return out;
}

}
