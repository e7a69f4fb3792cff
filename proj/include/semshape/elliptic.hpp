#pragma once

#include <stdexcept>
#include <vector>

#include "semshape/grid.hpp"
#include "semshape/problem.hpp"

namespace semshape {

// Thrown when an iterative loop exhausts its budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LinearSolveOptions {
  double tol = 1e-10;    // relative residual target, ||r||_2 <= tol * ||rhs||_2
  int max_iter = 50000;
};

struct LinearSolveStats {
  int iterations = 0;
  double rel_residual = 0.0;
};

// y = (-Delta_h + diag(coeff)) u on interior nodes, 5-point stencil, zero
// Dirichlet boundary.  coeff has interior-node layout.
ScalarField apply_operator(const Grid2D& g, const std::vector<double>& coeff,
                           const ScalarField& u);

// Discrete Dirichlet form h^2 * u^T (-Delta_h) u.  Used as the gradient
// energy so that the algebraic energy identity holds exactly.
double dirichlet_form(const Grid2D& g, const ScalarField& u);

// Solves (-Delta_h + diag(coeff)) u = rhs by Jacobi-preconditioned conjugate
// gradients from the zero start.  Deterministic.  Requires
// coeff >= -0.9 * lambda1_lower_bound(g) nodewise so the operator stays
// positive definite with margin; throws std::invalid_argument otherwise and
// ConvergenceError when the iteration budget runs out.
ScalarField solve_linear(const Grid2D& g, const std::vector<double>& coeff,
                         const ScalarField& rhs,
                         const LinearSolveOptions& opt = {},
                         LinearSolveStats* stats = nullptr);

struct PicardOptions {
  double tol = 1e-10;      // sup-norm tolerance on successive iterates
  int max_iter = 500;
  LinearSolveOptions linear{};
};

struct PicardDiagnostics {
  std::vector<double> increments;  // sup |u_{k+1} - u_k| per iteration
  std::vector<int> cg_iterations;
  std::vector<double> cg_residuals;
  int iterations = 0;
};

// Fixed-point solve of
//   -Delta u + M (1 - a) u + rho f(u) = g,  u = 0 on the box boundary,
// with the density averaged onto nodes.  Each sweep solves the linear
// operator with the nonlinearity lagged on the right-hand side.  The sweep
// contracts when rho < rho_bar(f, g); larger rho is rejected up front.
ScalarField solve_semilinear(const Grid2D& grid, const DensityField& a,
                             double M, double rho, const Nonlinearity& f,
                             const Source& g, const PicardOptions& opt = {},
                             PicardDiagnostics* diag = nullptr);

}
