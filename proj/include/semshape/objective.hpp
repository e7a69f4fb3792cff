#pragma once

#include <cstdint>
#include <vector>

#include "semshape/elliptic.hpp"
#include "semshape/grid.hpp"
#include "semshape/problem.hpp"

namespace semshape {

// Everything the density optimizer needs at one density:
//   value     = 1/2 int |grad u|^2 + M/2 int (1-a) u^2 - int g u
//   state u   solves the penalized semilinear equation
//   adjoint v solves (-Delta + M(1-a) + rho f'(u)) v = rho f(u)
//   combined  U = u/2 + v
//   switching Psi = -M * U * u   (nodal derivative density of the value
//                                 with respect to the node-averaged a)
struct ObjectiveBundle {
  double value = 0.0;
  ScalarField state;
  ScalarField adjoint;
  ScalarField combined;
  ScalarField switching;
  double M = 0.0;
  double rho = 0.0;
};

ObjectiveBundle evaluate_objective(const Grid2D& grid, const DensityField& a,
                                   double M, double rho, const Nonlinearity& f,
                                   const Source& g, const PicardOptions& opt = {});

// Value only (one state solve, no adjoint) for line searches and difference
// quotients.
double objective_value(const Grid2D& grid, const DensityField& a, double M,
                       double rho, const Nonlinearity& f, const Source& g,
                       const PicardOptions& opt = {});

// Recomputes the value formula from a stored state; used to audit that the
// bundle's value is a pure function of (a, u).
double value_from_state(const Grid2D& grid, const DensityField& a, double M,
                        const ScalarField& u, const Source& g);

// Exact directional derivative of the value along a cell perturbation:
// pairs h against the switching field scattered to cells.
double directional_derivative(const Grid2D& grid, const ObjectiveBundle& b,
                              const std::vector<double>& h_cells);

// The switching field as a cell gradient (adjoint scatter of Psi).
std::vector<double> switching_on_cells(const Grid2D& grid, const ObjectiveBundle& b);

struct GradientTrial {
  double analytic = 0.0;
  double finite_difference = 0.0;
  double rel_error = 0.0;
  double eps = 0.0;
  bool one_sided = false;
};

struct GradientCheckReport {
  std::vector<GradientTrial> trials;
  double max_rel_error = 0.0;
  std::uint64_t seed = 0;
};

// Compares the adjoint-based derivative against centered difference
// quotients of the value along random zero-mean cell directions.  Cells
// sitting at a bound get their component flipped inward and the trial is
// marked one-sided (forward quotient).
GradientCheckReport gradient_check(const Grid2D& grid, const DensityField& a,
                                   double M, double rho, const Nonlinearity& f,
                                   const Source& g, int trials, std::uint64_t seed,
                                   double eps = 1e-5, const PicardOptions& opt = {});

}
