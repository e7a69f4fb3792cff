#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semshape/objective.hpp"

namespace semshape {

struct OptimizeConfig {
  Grid2D grid;
  DensityField initial;           // projected onto the feasible set up front
  double m = 0.0;                 // mass budget
  double rho = 0.0;
  std::vector<double> M_schedule = {1e2, 1e3, 1e4};
  Nonlinearity f;
  Source g;

  double step0 = 1.0;             // first trial step of every iteration
  double armijo_slope = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 40;
  double move_tol = 1e-6;         // ||a_{k+1}-a_k||_2 / sqrt(|D|)
  int max_iter_per_stage = 500;
  PicardOptions solve{};
};

struct IterationRecord {
  int stage = 0;
  double M = 0.0;
  int iteration = 0;
  double value = 0.0;
  double mass = 0.0;
  double binariness = 0.0;   // int a(1-a) / |D|
  double step = 0.0;
  double move_norm = 0.0;    // scaled L2 move that ended the iteration
  double descent_slack = 0.0;  // achieved decrease minus the Armijo quota
};

struct OptimizeResult {
  DensityField density;
  double value = 0.0;            // value at the final density, final M
  std::vector<IterationRecord> history;
  std::vector<double> stage_binariness;  // one entry per finished M stage
  bool stalled = false;
  std::string stall_reason;
};

// Projected gradient descent on the relaxed energy with Armijo backtracking
// and warm-started continuation along M_schedule.  Every iterate is feasible
// (projection after each trial step).  A stage ends when the scaled move
// drops below move_tol or the iteration budget runs out; 40 failed halvings
// in one line search mark the run stalled instead of raising.
OptimizeResult optimize(const OptimizeConfig& cfg);

struct MContinuationRow {
  double M = 0.0;
  double value = 0.0;
  double outside_mass_sq = 0.0;  // int (1-a) u^2, the escaped mass
};

// Value and escaped mass of the state across a penalization sweep at fixed
// density (typically an indicator).
std::vector<MContinuationRow> m_continuation_probe(
    const Grid2D& grid, const DensityField& a, double rho,
    const Nonlinearity& f, const Source& g, const std::vector<double>& Ms,
    const PicardOptions& opt = {});

struct MonotonicityReport {
  int trials = 0;
  int violations = 0;
  double worst_gap = 0.0;   // most negative value of J(a1) - J(a2)
  std::uint64_t seed = 0;
  std::vector<double> gaps;
};

// Samples random ordered density pairs a1 <= a2 (same mass scaling keeps the
// order and the budget) and checks the value is non-increasing in the
// density up to solver noise.
MonotonicityReport monotonicity_probe(const Grid2D& grid, double rho,
                                      const Nonlinearity& f, const Source& g,
                                      double m, double M, int trials,
                                      std::uint64_t seed,
                                      const PicardOptions& opt = {});

// Nodal u * U inside the material region (cells at density >= 1/2 with all
// four touching cells material), zero elsewhere.  Negative values flag spots
// where opening a small hole lowers the energy.  Requires g == 0 and a
// nonlinearity with f(0) < 0 and x f(x) strictly decreasing; throws
// std::invalid_argument otherwise.
ScalarField topological_sign_field(const Grid2D& grid, const DensityField& a,
                                   double rho, const Nonlinearity& f,
                                   const Source& g, double M,
                                   const PicardOptions& opt = {});

}
