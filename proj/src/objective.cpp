#include "semshape/objective.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace semshape {

namespace {

void ensure(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// 1/2 int |grad u|^2 + M/2 int (1-a) u^2 - int g u, with the gradient energy
// taken as the discrete Dirichlet form and (1-a) averaged to nodes exactly as
// in the operator.  Keeping the three ingredients algebraically aligned makes
// the value identity  J = -(rho/2) int u f(u) - 1/2 int g u  hold to solver
// precision.
double value_impl(const Grid2D& grid, const std::vector<double>& comp_nodes, double M,
                  const ScalarField& u, const std::vector<double>& gvec) {
  const double h2 = grid.h * grid.h;
  double penal = 0.0, load = 0.0;
  for (size_t i = 0; i < u.v.size(); ++i) {
    penal += comp_nodes[i] * u.v[i] * u.v[i];
    load += gvec[i] * u.v[i];
  }
  return 0.5 * dirichlet_form(grid, u) + 0.5 * M * penal * h2 - load * h2;
}

}  // namespace

double value_from_state(const Grid2D& grid, const DensityField& a, double M,
                        const ScalarField& u, const Source& g) {
  return value_impl(grid, complement_on_nodes(a, grid), M, u, sample_nodes(g, grid));
}

ObjectiveBundle evaluate_objective(const Grid2D& grid, const DensityField& a, double M,
                                   double rho, const Nonlinearity& f, const Source& g,
                                   const PicardOptions& opt) {
  ObjectiveBundle b;
  b.M = M;
  b.rho = rho;
  b.state = solve_semilinear(grid, a, M, rho, f, g, opt);

  const std::vector<double> comp = complement_on_nodes(a, grid);
  const std::vector<double> gvec = sample_nodes(g, grid);
  b.value = value_impl(grid, comp, M, b.state, gvec);

  const size_t N = b.state.v.size();
  std::vector<double> coeff(N);
  ScalarField rhs = zero_scalar(grid);
  for (size_t i = 0; i < N; ++i) {
    coeff[i] = M * comp[i] + rho * f.eval(b.state.v[i], 1);
    rhs.v[i] = rho * f.eval(b.state.v[i], 0);
  }
  b.adjoint = solve_linear(grid, coeff, rhs, opt.linear);

  b.combined = zero_scalar(grid);
  b.switching = zero_scalar(grid);
  for (size_t i = 0; i < N; ++i) {
    b.combined.v[i] = 0.5 * b.state.v[i] + b.adjoint.v[i];
    b.switching.v[i] = -M * b.combined.v[i] * b.state.v[i];
  }
  return b;
}

double objective_value(const Grid2D& grid, const DensityField& a, double M, double rho,
                       const Nonlinearity& f, const Source& g, const PicardOptions& opt) {
  const ScalarField u = solve_semilinear(grid, a, M, rho, f, g, opt);
  return value_from_state(grid, a, M, u, g);
}

double directional_derivative(const Grid2D& grid, const ObjectiveBundle& b,
                              const std::vector<double>& h_cells) {
  ensure(h_cells.size() == static_cast<size_t>(grid.cell_count()),
         "directional_derivative: perturbation does not match grid");
  const std::vector<double> psi_cells = scatter_nodes_to_cells(b.switching, grid);
  double s = 0.0;
  for (size_t i = 0; i < h_cells.size(); ++i) s += h_cells[i] * psi_cells[i];
  return s * grid.h * grid.h;
}

std::vector<double> switching_on_cells(const Grid2D& grid, const ObjectiveBundle& b) {
  return scatter_nodes_to_cells(b.switching, grid);
}

GradientCheckReport gradient_check(const Grid2D& grid, const DensityField& a, double M,
                                   double rho, const Nonlinearity& f, const Source& g,
                                   int trials, std::uint64_t seed, double eps,
                                   const PicardOptions& opt) {
  ensure(trials > 0, "gradient_check: need at least one trial");
  ensure(eps > 0.0, "gradient_check: step must be positive");

  GradientCheckReport rep;
  rep.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  const ObjectiveBundle bundle = evaluate_objective(grid, a, M, rho, f, g, opt);
  const size_t C = a.a.size();
  const double bound_pad = 1e-9;

  for (int t = 0; t < trials; ++t) {
    std::vector<double> h(C);
    double mean = 0.0;
    for (size_t i = 0; i < C; ++i) {
      h[i] = uni(rng);
      mean += h[i];
    }
    mean /= static_cast<double>(C);
    for (double& v : h) v -= mean;

    // cells pinned at a bound only admit inward moves
    bool one_sided = false;
    for (size_t i = 0; i < C; ++i) {
      if (a.a[i] <= bound_pad && h[i] < 0.0) {
        h[i] = -h[i];
        one_sided = true;
      } else if (a.a[i] >= 1.0 - bound_pad && h[i] > 0.0) {
        h[i] = -h[i];
        one_sided = true;
      }
    }

    GradientTrial trial;
    trial.eps = eps;
    trial.one_sided = one_sided;
    trial.analytic = directional_derivative(grid, bundle, h);

    DensityField ap{a.n, a.a};
    for (size_t i = 0; i < C; ++i) ap.a[i] = a.a[i] + eps * h[i];
    const double jp = objective_value(grid, ap, M, rho, f, g, opt);
    if (one_sided) {
      trial.finite_difference = (jp - bundle.value) / eps;
    } else {
      DensityField am{a.n, a.a};
      for (size_t i = 0; i < C; ++i) am.a[i] = a.a[i] - eps * h[i];
      const double jm = objective_value(grid, am, M, rho, f, g, opt);
      trial.finite_difference = (jp - jm) / (2.0 * eps);
    }

    const double scale = std::max({std::fabs(trial.analytic), std::fabs(trial.finite_difference), 1e-300});
    trial.rel_error = std::fabs(trial.analytic - trial.finite_difference) / scale;
    rep.max_rel_error = std::max(rep.max_rel_error, trial.rel_error);
    rep.trials.push_back(trial);
  }
  return rep;
}

}
