#pragma once

#include <optional>
#include <string>
#include <vector>

#include "semshape/grid.hpp"

namespace semshape {

// Cap applied to the contraction threshold when the nonlinearity vanishes.
inline constexpr double kRhoBarCeiling = 1e6;

enum class NonlinearityKind { Zero, Affine, NegExpSquare, Table };

// Bounded nonlinearity with two derivatives.  All kinds except Zero are
// truncated by clamping the argument to [-trunc, trunc], so outside the
// window the value is frozen and both derivatives vanish.
struct Nonlinearity {
  NonlinearityKind kind = NonlinearityKind::Zero;
  double p0 = 0.0, p1 = 0.0;  // Affine: p0 + p1 * x
  double trunc = 1.0;
  // Table kind: knots with value and derivative samples, interpolated
  // linearly and clamped outside the knot range.
  std::vector<double> tx, tf, tfp, tfpp;

  // order 0, 1, 2 -> f, f', f'' at the clamped argument
  double eval(double x, int order) const;

  double sup_f() const;    // sup |f| over the truncation window
  double sup_fp() const;   // sup |f'|
  double w1inf() const;    // max of the two
  bool is_zero() const { return kind == NonlinearityKind::Zero; }
};

Nonlinearity zero_nonlinearity();
Nonlinearity affine_nonlinearity(double a, double b, double trunc);
// f(x) = -exp(x^2), truncated
Nonlinearity neg_exp_square(double trunc);
// f(x) = 1 - 2x truncated outside [-1, 1]
Nonlinearity one_minus_two_x();
Nonlinearity table_nonlinearity(std::vector<double> x, std::vector<double> f,
                                std::vector<double> fp, std::vector<double> fpp);

// Right-hand side g.  Analytic kinds know their value everywhere (and a
// radial profile); a nodal field is tied to one grid layout.
struct Source {
  enum class Kind { Constant, RadialAffine, NodalField };
  Kind kind = Kind::Constant;
  double c0 = 0.0, c1 = 0.0;  // constant: c0; radial affine: c0 + c1*r
  int field_n = 0;
  std::vector<double> field;  // interior nodal values for NodalField

  // Declared positivity box 0 < g0 < g1; enables the small-rho regime checks.
  std::optional<std::pair<double, double>> h1_bounds;
  // Declared "radial, non-increasing, non-negative" structure.
  bool radial_nonincreasing = false;

  bool analytic() const { return kind != Kind::NodalField; }
  double at(double x, double y) const;  // throws for NodalField
  double radial(double r) const;        // throws for NodalField
};

Source constant_source(double c);
Source radial_affine_source(double c0, double c1);
Source field_source(const Grid2D& g, std::vector<double> interior_values);

// Samples g at the interior nodes (the PDE right-hand side).
std::vector<double> sample_nodes(const Source& g, const Grid2D& grid);
// Value of g associated with a cell (analytic kinds: the cell center).
double sample_cell(const Source& g, const Grid2D& grid, int ci, int cj);

// Exact first Dirichlet eigenvalue of the box [-L, L]^2: 2 * pi^2 / (2L)^2.
double lambda1_lower_bound(const Grid2D& g);

// Picard contraction threshold 0.99 * lambda1 / ||f||_{W^{1,inf}}, capped at
// kRhoBarCeiling when f == 0.
double rho_bar(const Nonlinearity& f, const Grid2D& g);

struct HypothesisReport {
  bool h1 = false;  // declared and verified positivity box for g
  bool h2 = false;  // f(0) <= 0 and x*f(x) non-decreasing on [0, n_mg + delta]
  bool h4 = false;  // f(0) < 0 and x*f(x) strictly decreasing
  std::string h1_detail, h2_detail, h4_detail;

  double lambda1_lb = 0.0;
  double torsion_bound = 0.0;  // sup-norm bound of the box torsion function
  double n_mg = 0.0;           // a-priori sup bound for every admissible state
  double delta = 0.0;          // monotonicity margin, 0.1 * n_mg
  double rho_bar = 0.0;        // Picard contraction threshold
  double rho1 = 0.0;           // small-rho threshold (positivity regime)
  double rho0 = 0.0;           // min of the applicable thresholds
};

// Certifies the structural assumptions for a problem instance and computes
// the explicit thresholds.  Sampling-based monotonicity checks use 1e4
// points.  Throws std::invalid_argument on contradictory declarations
// (e.g. declared bounds with g0 <= 0 or violated by sampling).
HypothesisReport check_hypotheses(const Nonlinearity& f, const Source& g,
                                  double m, const Grid2D& grid);

}
