#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "semshape/objective.hpp"

using namespace semshape;

namespace {

constexpr double kPi = 3.14159265358979323846;

DensityField random_density(const Grid2D& g, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  DensityField a{g.n, std::vector<double>(static_cast<size_t>(g.cell_count()))};
  for (double& v : a.a) v = dist(rng);
  return a;
}

PicardOptions tight() {
  PicardOptions po;
  po.tol = 1e-12;
  po.linear.tol = 1e-12;
  return po;
}

}  // namespace

TEST_SUITE_BEGIN("objective");

TEST_CASE("linear case: adjoint vanishes and the switching field is explicit") {
  const Grid2D g = make_grid(1.0, 32);
  std::mt19937_64 rng(53);
  const DensityField a = random_density(g, rng, 0.2, 0.9);
  const double M = 80.0;
  const ObjectiveBundle b =
      evaluate_objective(g, a, M, 0.0, one_minus_two_x(), constant_source(1.0));

  for (double v : b.adjoint.v) CHECK(v == 0.0);
  for (size_t i = 0; i < b.state.v.size(); ++i) {
    CHECK(b.combined.v[i] == doctest::Approx(0.5 * b.state.v[i]).epsilon(1e-14));
    CHECK(b.switching.v[i] ==
          doctest::Approx(-0.5 * M * b.state.v[i] * b.state.v[i]).epsilon(1e-13));
  }
}

TEST_CASE("the evaluated energy satisfies the algebraic identity") {
  const Grid2D g = make_grid(1.0, 48);
  std::mt19937_64 rng(59);
  const Nonlinearity f = one_minus_two_x();
  const Source src = constant_source(1.0);
  for (const double rho : {0.0, 0.05, 0.3}) {
    const DensityField a = random_density(g, rng, 0.0, 1.0);
    const ObjectiveBundle b = evaluate_objective(g, a, 150.0, rho, f, src, tight());

    double self = 0.0, load = 0.0;
    for (int j = 1; j < g.n; ++j)
      for (int i = 1; i < g.n; ++i) {
        const double u = b.state.v[static_cast<size_t>(g.interior_index(i, j))];
        self += u * f.eval(u, 0);
        load += src.at(g.node_x(i), g.node_y(j)) * u;
      }
    self *= g.h * g.h;
    load *= g.h * g.h;
    const double identity = -0.5 * rho * self - 0.5 * load;
    CHECK(std::fabs(b.value - identity) <= 5e-9 * std::max(1.0, std::fabs(b.value)));
  }
}

TEST_CASE("stored state reproduces the reported value") {
  const Grid2D g = make_grid(1.0, 32);
  std::mt19937_64 rng(61);
  const DensityField a = random_density(g, rng, 0.0, 1.0);
  const ObjectiveBundle b =
      evaluate_objective(g, a, 120.0, 0.1, one_minus_two_x(), constant_source(1.0), tight());
  const double recomputed = value_from_state(g, a, 120.0, b.state, constant_source(1.0));
  CHECK(std::fabs(recomputed - b.value) <= 1e-12 * std::max(1.0, std::fabs(b.value)));
}

TEST_CASE("derivative pairing is linear and vanishes on the zero direction") {
  const Grid2D g = make_grid(1.0, 24);
  std::mt19937_64 rng(67);
  const DensityField a = random_density(g, rng, 0.2, 0.8);
  const ObjectiveBundle b =
      evaluate_objective(g, a, 60.0, 0.05, one_minus_two_x(), constant_source(1.0));

  const std::vector<double> zero(static_cast<size_t>(g.cell_count()), 0.0);
  CHECK(directional_derivative(g, b, zero) == 0.0);

  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> h1(zero.size()), h2(zero.size()), combo(zero.size());
  for (size_t i = 0; i < zero.size(); ++i) {
    h1[i] = dist(rng);
    h2[i] = dist(rng);
    combo[i] = 2.0 * h1[i] - 3.0 * h2[i];
  }
  const double lhs = directional_derivative(g, b, combo);
  const double rhs =
      2.0 * directional_derivative(g, b, h1) - 3.0 * directional_derivative(g, b, h2);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("adding material never increases the energy in the positive regime") {
  const Grid2D g = make_grid(1.0, 32);
  std::mt19937_64 rng(71);
  const Nonlinearity f = one_minus_two_x();
  Source src = radial_affine_source(2.0, -0.35);
  src.h1_bounds = {1.0, 2.0};
  const HypothesisReport rep = check_hypotheses(f, src, 2.0, g);
  const double rho = 0.5 * rep.rho1;

  const DensityField a = random_density(g, rng, 0.1, 0.9);
  const ObjectiveBundle b = evaluate_objective(g, a, 1e3, rho, f, src);

  // switching field is nonpositive, so any nonnegative direction descends
  for (size_t i = 0; i < b.combined.v.size(); ++i) {
    CHECK(b.combined.v[i] >= -1e-10);
    CHECK(b.switching.v[i] <= 1e-8);
  }
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> h(static_cast<size_t>(g.cell_count()));
  for (double& v : h) v = dist(rng);
  CHECK(directional_derivative(g, b, h) <= 1e-8);
}

TEST_CASE("analytic derivative matches difference quotients in the linear case") {
  const Grid2D g = make_grid(1.0, 32);
  std::mt19937_64 rng(73);
  const DensityField a = random_density(g, rng, 0.25, 0.75);
  const GradientCheckReport rep =
      gradient_check(g, a, 90.0, 0.0, one_minus_two_x(), constant_source(1.0), 5, 1234,
                     1e-5, tight());
  CHECK(rep.max_rel_error <= 1e-6);
}

TEST_CASE("analytic derivative matches difference quotients with the nonlinearity on") {
  const Grid2D g = make_grid(1.0, 32);
  std::mt19937_64 rng(79);
  const DensityField a = random_density(g, rng, 0.25, 0.75);
  const GradientCheckReport rep =
      gradient_check(g, a, 90.0, 0.05, one_minus_two_x(), constant_source(1.0), 5, 4321,
                     1e-5, tight());
  CHECK(rep.max_rel_error <= 1e-4);
}

TEST_CASE("penalized disk value approaches the closed-form disk energy") {
  const Grid2D g = make_grid(2.0, 128);
  const DensityField disk = disk_indicator(g, 1.0);
  const double value =
      objective_value(g, disk, 1e5, 0.0, zero_nonlinearity(), constant_source(1.0));
  CHECK(std::fabs(value - (-kPi / 16.0)) <= 3e-2);
}

TEST_SUITE_END();
