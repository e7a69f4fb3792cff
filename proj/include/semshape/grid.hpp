#pragma once

#include <string>
#include <vector>

namespace semshape {

// Uniform cell grid on the box [-L, L]^2.
//
// Densities live at cell centers (n x n values in [0,1]).  PDE unknowns live
// at the (n-1)^2 interior nodes; the boundary nodes carry a homogeneous
// Dirichlet condition and are never stored.
struct Grid2D {
  double L = 0.0;  // half-width of the box
  int n = 0;       // cells per side
  double h = 0.0;  // spacing, 2L/n

  int cell_count() const { return n * n; }
  int interior_count() const { return (n - 1) * (n - 1); }

  // cells indexed ci, cj in [0, n)
  int cell_index(int ci, int cj) const { return cj * n + ci; }
  double cell_x(int ci) const { return -L + (ci + 0.5) * h; }
  double cell_y(int cj) const { return -L + (cj + 0.5) * h; }

  // nodes indexed i, j in [0, n]; interior means 1 <= i, j <= n-1
  int interior_index(int i, int j) const { return (j - 1) * (n - 1) + (i - 1); }
  double node_x(int i) const { return -L + i * h; }
  double node_y(int j) const { return -L + j * h; }

  double area() const { return 4.0 * L * L; }

  bool same_layout(const Grid2D& o) const { return n == o.n && L == o.L; }
};

// Throws std::invalid_argument for L <= 0 or n < 8 (too coarse for the
// staggering and the boundary stencils to make sense).
Grid2D make_grid(double L, int n);

// Cell-centered density, values expected in [0,1].
struct DensityField {
  int n = 0;
  std::vector<double> a;
};

// Interior nodal scalar, zero trace implied on the box boundary.
struct ScalarField {
  int n = 0;
  std::vector<double> v;
};

DensityField uniform_density(const Grid2D& g, double value);
ScalarField zero_scalar(const Grid2D& g);

// Midpoint rule for cell data, h^2 * sum.
double integrate(const DensityField& a, const Grid2D& g);
// Nodal quadrature with the implied zero boundary, h^2 * sum.
double integrate(const ScalarField& u, const Grid2D& g);

double mass(const DensityField& a, const Grid2D& g);
double sup_norm(const ScalarField& u);

// Euclidean projection of raw cell values onto
//   { a : 0 <= a <= 1,  integral of a <= m }.
// Computed as clip(raw - mu) with the multiplier mu >= 0 located by bisection
// (tolerance 1e-12 on mu, at most 200 halvings).  Throws for m <= 0 or
// non-finite input.
DensityField project_density(const std::vector<double>& raw, double m, const Grid2D& g);

// Indicator of the centered disk of radius R: cell value 1 when the cell
// center lies strictly inside.  Requires 0 <= R < L; R = 0 gives the zero
// field.
DensityField disk_indicator(const Grid2D& g, double R);

// Average of (1 - a) over the four cells touching each interior node.  This
// is how cell densities enter the node-centered operator.
std::vector<double> complement_on_nodes(const DensityField& a, const Grid2D& g);

// Adjoint of the cell-to-node averaging: each interior node value is
// scattered with weight 1/4 to its four touching cells.  Pairing cell data
// against this equals pairing the node-averaged data against the nodes.
std::vector<double> scatter_nodes_to_cells(const ScalarField& u, const Grid2D& g);

// CSV layout: a two-line header (column names, then n,L,h,kind) followed by
// row-major values.  Scalar fields are written on the full node lattice
// including the zero boundary ring.
void write_csv(const DensityField& a, const Grid2D& g, const std::string& path);
void write_csv(const ScalarField& u, const Grid2D& g, const std::string& path);
void write_json(const DensityField& a, const Grid2D& g, const std::string& path);
void write_json(const ScalarField& u, const Grid2D& g, const std::string& path);

// Reads a density written by write_csv; the header must match the grid.
DensityField read_density_csv(const std::string& path, const Grid2D& g);

}
