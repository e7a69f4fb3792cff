#include "semshape/elliptic.hpp"

#include <cmath>
#include <sstream>

namespace semshape {

namespace {

void ensure(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// 5-point sweep: out = (-Delta_h + diag(coeff)) u.  Zero Dirichlet ring.
void apply(const Grid2D& g, const std::vector<double>& coeff, const std::vector<double>& u,
           std::vector<double>& out) {
  const int w = g.n - 1;
  const double ih2 = 1.0 / (g.h * g.h);
  for (int j = 0; j < w; ++j)
    for (int i = 0; i < w; ++i) {
      const int idx = j * w + i;
      double s = 4.0 * u[idx];
      if (i > 0) s -= u[idx - 1];
      if (i < w - 1) s -= u[idx + 1];
      if (j > 0) s -= u[idx - w];
      if (j < w - 1) s -= u[idx + w];
      out[idx] = s * ih2 + coeff[idx] * u[idx];
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

ScalarField apply_operator(const Grid2D& g, const std::vector<double>& coeff,
                           const ScalarField& u) {
  ensure(u.n == g.n && coeff.size() == u.v.size(), "apply_operator: size mismatch");
  ScalarField out = zero_scalar(g);
  apply(g, coeff, u.v, out.v);
  return out;
}

double dirichlet_form(const Grid2D& g, const ScalarField& u) {
  ensure(u.n == g.n, "dirichlet_form: field does not match grid");
  std::vector<double> zero(u.v.size(), 0.0);
  std::vector<double> lu(u.v.size());
  apply(g, zero, u.v, lu);
  return dot(u.v, lu) * g.h * g.h;
}

ScalarField solve_linear(const Grid2D& g, const std::vector<double>& coeff,
                         const ScalarField& rhs, const LinearSolveOptions& opt,
                         LinearSolveStats* stats) {
  const size_t N = static_cast<size_t>(g.interior_count());
  ensure(rhs.n == g.n && rhs.v.size() == N, "solve_linear: rhs does not match grid");
  ensure(coeff.size() == N, "solve_linear: coefficient does not match grid");
  const double floor = -0.9 * lambda1_lower_bound(g);
  for (double c : coeff)
    ensure(std::isfinite(c) && c >= floor,
           "solve_linear: zeroth-order coefficient below the admissible bound");

  ScalarField x = zero_scalar(g);
  const double bnorm = std::sqrt(dot(rhs.v, rhs.v));
  if (stats) *stats = {0, 0.0};
  if (bnorm == 0.0) return x;  // exact zero stays exactly zero

  const double ih2 = 1.0 / (g.h * g.h);
  std::vector<double> diag(N);
  for (size_t i = 0; i < N; ++i) diag[i] = 4.0 * ih2 + coeff[i];

  std::vector<double> r = rhs.v, z(N), p(N), q(N);
  for (size_t i = 0; i < N; ++i) z[i] = r[i] / diag[i];
  p = z;
  double rz = dot(r, z);
  double rnorm = bnorm;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    apply(g, coeff, p, q);
    const double pq = dot(p, q);
    if (pq <= 0.0) throw ConvergenceError("solve_linear: operator lost definiteness");
    const double alpha = rz / pq;
    for (size_t i = 0; i < N; ++i) x.v[i] += alpha * p[i];
    for (size_t i = 0; i < N; ++i) r[i] -= alpha * q[i];
    rnorm = std::sqrt(dot(r, r));
    if (rnorm <= opt.tol * bnorm) {
      ++it;
      break;
    }
    for (size_t i = 0; i < N; ++i) z[i] = r[i] / diag[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (size_t i = 0; i < N; ++i) p[i] = z[i] + beta * p[i];
  }
  if (rnorm > opt.tol * bnorm) {
    std::ostringstream os;
    os << "solve_linear: no convergence after " << opt.max_iter
       << " iterations, relative residual " << rnorm / bnorm;
    throw ConvergenceError(os.str());
  }
  if (stats) *stats = {it, rnorm / bnorm};
  return x;
}

ScalarField solve_semilinear(const Grid2D& grid, const DensityField& a, double M,
                             double rho, const Nonlinearity& f, const Source& g,
                             const PicardOptions& opt, PicardDiagnostics* diag) {
  ensure(a.n == grid.n && a.a.size() == static_cast<size_t>(grid.cell_count()),
         "solve_semilinear: density does not match grid");
  ensure(M >= 0.0 && std::isfinite(M), "solve_semilinear: penalization must be non-negative");
  ensure(rho >= 0.0 && std::isfinite(rho), "solve_semilinear: rho must be non-negative");
  const double bar = rho_bar(f, grid);
  if (rho >= bar) {
    std::ostringstream os;
    os << "solve_semilinear: rho = " << rho << " is at or above the contraction threshold "
       << bar;
    throw std::invalid_argument(os.str());
  }

  std::vector<double> cnode = complement_on_nodes(a, grid);
  for (double& c : cnode) c *= M;
  const std::vector<double> gvec = sample_nodes(g, grid);

  const size_t N = gvec.size();
  ScalarField u = zero_scalar(grid);
  ScalarField rhs = zero_scalar(grid);
  if (diag) *diag = PicardDiagnostics{};

  for (int it = 1; it <= opt.max_iter; ++it) {
    for (size_t i = 0; i < N; ++i) rhs.v[i] = gvec[i] - rho * f.eval(u.v[i], 0);
    LinearSolveStats ls;
    ScalarField next = solve_linear(grid, cnode, rhs, opt.linear, &ls);
    double inc = 0.0;
    for (size_t i = 0; i < N; ++i) inc = std::max(inc, std::fabs(next.v[i] - u.v[i]));
    u = std::move(next);
    if (diag) {
      diag->increments.push_back(inc);
      diag->cg_iterations.push_back(ls.iterations);
      diag->cg_residuals.push_back(ls.rel_residual);
      diag->iterations = it;
    }
    if (inc <= opt.tol) return u;
  }
  throw ConvergenceError("solve_semilinear: fixed-point sweep exhausted its iteration budget");
}

}
