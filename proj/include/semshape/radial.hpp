#pragma once

#include <string>
#include <vector>

#include "semshape/elliptic.hpp"
#include "semshape/problem.hpp"

namespace semshape {

// Uniform grid on [0, R] for the radial solvers.
struct RadialGrid {
  double R = 0.0;
  int n_r = 0;
  double h = 0.0;
  std::vector<double> r;  // n_r + 1 nodes, r[0] = 0, r[n_r] = R
};

// Throws for R <= 0 or n_r < 64.
RadialGrid make_radial_grid(double R, int n_r);

// State and adjoint profiles on the disk of radius R:
//   state:   -(1/r)(r phi')' + rho f(phi) = g,   phi'(0) = 0, phi(R) = 0
//   adjoint: -(1/r)(r q')'  + rho f'(phi) q = -rho f(phi),  same conditions.
// The axis row uses the symmetric limit -(1/r)(r y')' -> -2 y''(0).
// Boundary derivatives come from one-sided three-point stencils, and
//   boundary_product = q'(R) phi'(R) - (phi'(R))^2 / 2
// is the scalar the mode coefficients share.
struct RadialSolution {
  RadialGrid grid;
  double rho = 0.0;
  std::vector<double> state;    // phi
  std::vector<double> adjoint;  // q
  double state_dR = 0.0;        // phi'(R)
  double state_d2R = 0.0;       // phi''(R)
  double adjoint_dR = 0.0;      // q'(R)
  double boundary_product = 0.0;
};

RadialSolution solve_radial_state_adjoint(const RadialGrid& rg, double rho,
                                          const Nonlinearity& f, const Source& g,
                                          const PicardOptions& opt = {});

// Source used in the xi companion problem.  DerivativeWeighted couples the
// mode through f'(state) (the form consistent with the adjoint linearization);
// PlainPsi drops that weight.  PlainPsi is also the form whose small-rho
// expansion matches the closed-form slope oracle below.
enum class XiSource { DerivativeWeighted, PlainPsi };

struct ModeOptions {
  XiSource xi_source = XiSource::DerivativeWeighted;
};

// Angular mode k of the boundary quadratic form.  psi solves the homogeneous
// mode equation driven by the boundary value -phi'(R); xi and zeta are the
// two lower-order companions (both vanish at rho = 0).  omega is the
// coefficient multiplying this mode's squared amplitude in the second-order
// boundary expansion of the energy; it carries the factor pi*R from
// integrating cos^2 around the circle.
struct ModeSolution {
  int k = 0;
  std::vector<double> psi, xi, zeta;
  double psi_dR = 0.0, xi_dR = 0.0, zeta_dR = 0.0;
  double omega = 0.0;
};

ModeSolution solve_mode(const RadialSolution& rs, int k, const Nonlinearity& f,
                        const Source& g, const ModeOptions& mopt = {});

enum class Verdict { Stable, MarginallyStable, Unstable };

std::string to_string(Verdict v);

struct StabilityReport {
  int K = 0;
  double rho = 0.0;
  std::vector<double> omega;        // omega[k-1] for k = 1..K
  std::vector<double> psi_dR, xi_dR, zeta_dR;
  double boundary_product = 0.0;
  double c1 = 0.0;                  // mean of g over the disk minus g(R)
  bool mean_condition = false;      // 2 pi R^2 g(R) <= int g (and int g > 0)
  double mean_lhs = 0.0, mean_rhs = 0.0;
  double fit_slope = 0.0;           // least-squares slope of omega_k on the
                                    // upper half of the mode range
  double tolerance = 0.0;           // margin separating the verdict classes
  Verdict verdict = Verdict::Stable;
};

// Solves modes 1..K and classifies: unstable when min omega < -tol,
// marginally stable when |min omega| <= tol, stable otherwise, with
// tol = 1e-8 * pi * R * max(1, phi'(R)^2).
StabilityReport stability_verdict(const RadialSolution& rs, const Nonlinearity& f,
                                  const Source& g, int K, const ModeOptions& mopt = {});

// Closed-form small-rho slope machinery at g == 1, R == 1.  w1 = y1 + z1
// solves the first-order boundary-coefficient problem and
//   sigma = (w1(1) + w1'(1)) / 4
// is the slope of the normalized mode-1 coefficient:
//   omega_1(rho) = 2 pi R rho sigma + O(rho^2)
// (the 2 pi R converts the per-amplitude coefficient back to the omega
// normalization above).
struct PerturbationBundle {
  RadialGrid grid;
  std::vector<double> phi0;   // state at rho = 0
  std::vector<double> phi1;   // first state correction
  std::vector<double> y1, z1, w1;
  double w1_at_R = 0.0;
  double w1_dR = 0.0;
  double sigma = 0.0;
};

// Requires g identically 1 (and works on the unit disk).  Throws otherwise.
PerturbationBundle perturbation_slope(const Nonlinearity& f, const Source& g, int n_r);

struct InstabilityRow {
  double rho = 0.0;
  double omega1 = 0.0;
  double slope = 0.0;       // omega1 / (2 pi R rho); 0 at rho = 0
  bool unstable = false;
  bool marginal = false;
};

struct InstabilityReport {
  std::vector<InstabilityRow> rows;
  double sigma = 0.0;       // oracle slope from perturbation_slope
  bool all_unstable = false;  // over the strictly positive entries
};

// Demonstrates loss of shape stability of the disk for steep decreasing
// nonlinearities: checks f >= 0 and f' < -1 on [0, 2 sup phi0), then sweeps
// rho_list and reports the mode-1 coefficient and its slope against the
// closed-form oracle.  Uses the PlainPsi companion form, matching the
// expansion that defines sigma.  Requires g == 1; throws when the
// certification fails.
InstabilityReport instability_demo(const Nonlinearity& f, const Source& g,
                                   const std::vector<double>& rho_list, int n_r);

// Energy of the radial state on the disk:
//   -(1/2) int g u - (rho/2) int u f(u),
// by the trapezoid rule in r.  Oracle for the penalized 2-D values.
double radial_energy(const RadialSolution& rs, const Nonlinearity& f, const Source& g);

}
