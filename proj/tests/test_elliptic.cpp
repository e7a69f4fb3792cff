#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "semshape/elliptic.hpp"
#include "semshape/problem.hpp"

using namespace semshape;

namespace {

constexpr double kPi = 3.14159265358979323846;

// lowest box eigenfunction, used as a manufactured solution
double eigenfunction(const Grid2D& g, int i, int j) {
  const double sx = std::sin(kPi * (g.node_x(i) + g.L) / (2.0 * g.L));
  const double sy = std::sin(kPi * (g.node_y(j) + g.L) / (2.0 * g.L));
  return sx * sy;
}

double manufactured_error(int n) {
  const Grid2D g = make_grid(1.0, n);
  const double lambda = 2.0 * kPi * kPi / (4.0 * g.L * g.L);
  const std::vector<double> coeff(static_cast<size_t>(g.interior_count()), 0.0);
  ScalarField rhs = zero_scalar(g);
  for (int j = 1; j < g.n; ++j)
    for (int i = 1; i < g.n; ++i)
      rhs.v[static_cast<size_t>(g.interior_index(i, j))] = lambda * eigenfunction(g, i, j);
  LinearSolveOptions opt;
  opt.tol = 1e-13;
  const ScalarField u = solve_linear(g, coeff, rhs, opt);
  double err = 0.0;
  for (int j = 1; j < g.n; ++j)
    for (int i = 1; i < g.n; ++i)
      err = std::max(err, std::fabs(u.v[static_cast<size_t>(g.interior_index(i, j))] -
                                    eigenfunction(g, i, j)));
  return err;
}

DensityField random_density(const Grid2D& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  DensityField a{g.n, std::vector<double>(static_cast<size_t>(g.cell_count()))};
  for (double& v : a.a) v = dist(rng);
  return a;
}

}  // namespace

TEST_SUITE_BEGIN("elliptic");

TEST_CASE("linear solve converges at second order on the box eigenfunction") {
  const double e1 = manufactured_error(32);
  const double e2 = manufactured_error(64);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("zero right-hand side returns the zero field without iterating") {
  const Grid2D g = make_grid(1.0, 16);
  const std::vector<double> coeff(static_cast<size_t>(g.interior_count()), 3.0);
  LinearSolveStats stats;
  const ScalarField u = solve_linear(g, coeff, zero_scalar(g), {}, &stats);
  for (double v : u.v) CHECK(v == 0.0);
  CHECK(stats.iterations == 0);
}

TEST_CASE("coefficient below the definiteness floor is rejected") {
  const Grid2D g = make_grid(1.0, 16);
  std::vector<double> coeff(static_cast<size_t>(g.interior_count()), 0.0);
  coeff[5] = -0.95 * lambda1_lower_bound(g);
  ScalarField rhs = zero_scalar(g);
  rhs.v[0] = 1.0;
  CHECK_THROWS_AS(solve_linear(g, coeff, rhs), std::invalid_argument);
}

TEST_CASE("iteration budget exhaustion raises the convergence error") {
  const Grid2D g = make_grid(1.0, 64);
  const std::vector<double> coeff(static_cast<size_t>(g.interior_count()), 0.0);
  ScalarField rhs = zero_scalar(g);
  for (double& v : rhs.v) v = 1.0;
  LinearSolveOptions opt;
  opt.max_iter = 2;
  CHECK_THROWS_AS(solve_linear(g, coeff, rhs, opt), ConvergenceError);
}

TEST_CASE("linear limit of the fixed-point solve is bitwise reproducible") {
  const Grid2D g = make_grid(1.0, 32);
  const DensityField ones = uniform_density(g, 1.0);
  const Source src = constant_source(1.0);

  const ScalarField via_picard =
      solve_semilinear(g, ones, 50.0, 0.0, one_minus_two_x(), src);
  const std::vector<double> coeff(static_cast<size_t>(g.interior_count()), 0.0);
  ScalarField rhs = zero_scalar(g);
  for (double& v : rhs.v) v = 1.0;
  const ScalarField direct = solve_linear(g, coeff, rhs);
  for (size_t i = 0; i < direct.v.size(); ++i) CHECK(via_picard.v[i] == direct.v[i]);
}

TEST_CASE("fixed-point sweep contracts at the certified rate") {
  const Grid2D g = make_grid(1.0, 32);
  std::mt19937_64 rng(41);
  const DensityField a = random_density(g, rng);
  const Nonlinearity f = one_minus_two_x();
  const double rho = 0.4;

  PicardDiagnostics diag;
  PicardOptions opt;
  opt.tol = 1e-12;
  opt.linear.tol = 1e-13;
  const ScalarField u = solve_semilinear(g, a, 100.0, rho, f, constant_source(1.0), opt, &diag);
  CHECK(sup_norm(u) > 0.0);
  CHECK(diag.iterations >= 3);

  const double bound = rho * f.w1inf() / lambda1_lower_bound(g) * 1.05;
  for (size_t k = 1; k < diag.increments.size(); ++k) {
    if (diag.increments[k - 1] < 1e-9) break;  // below this the quotient is solver noise
    CHECK(diag.increments[k] <= bound * diag.increments[k - 1]);
  }
}

TEST_CASE("states stay nonnegative and below the a-priori bound in the positive regime") {
  const Grid2D g = make_grid(1.0, 32);
  std::mt19937_64 rng(43);
  const Nonlinearity f = one_minus_two_x();
  Source src = radial_affine_source(2.0, -0.35);
  src.h1_bounds = {1.0, 2.0};
  const HypothesisReport rep = check_hypotheses(f, src, 2.0, g);
  REQUIRE(rep.h1);

  for (int trial = 0; trial < 5; ++trial) {
    const DensityField a = random_density(g, rng);
    const ScalarField u = solve_semilinear(g, a, 500.0, 0.5 * rep.rho1, f, src);
    for (double v : u.v) {
      CHECK(v >= -1e-10);
      CHECK(v <= rep.n_mg + 1e-10);
    }
  }
}

TEST_CASE("rates beyond the contraction threshold are rejected up front") {
  const Grid2D g = make_grid(1.0, 16);
  const DensityField ones = uniform_density(g, 1.0);
  const double bar = rho_bar(one_minus_two_x(), g);
  CHECK_THROWS_AS(
      solve_semilinear(g, ones, 10.0, bar * 1.01, one_minus_two_x(), constant_source(1.0)),
      std::invalid_argument);
}

TEST_CASE("dirichlet form matches the operator pairing") {
  const Grid2D g = make_grid(1.0, 16);
  std::mt19937_64 rng(47);
  ScalarField u = zero_scalar(g);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (double& v : u.v) v = dist(rng);
  const std::vector<double> coeff(static_cast<size_t>(g.interior_count()), 0.0);
  const ScalarField Au = apply_operator(g, coeff, u);
  double pairing = 0.0;
  for (size_t i = 0; i < u.v.size(); ++i) pairing += u.v[i] * Au.v[i];
  pairing *= g.h * g.h;
  CHECK(dirichlet_form(g, u) == doctest::Approx(pairing).epsilon(1e-12));
  CHECK(dirichlet_form(g, u) > 0.0);
}

TEST_SUITE_END();
