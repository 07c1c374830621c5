#include "cht/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cht/errors.hpp"

namespace cht {
namespace {

// One level of the operator  diag x - div(w grad x)  with face weights w
// laid out like FaceFluxSet (boundary faces zero).
struct Level {
  int nx = 0;
  int ny = 0;
  bool planar = false;
  std::vector<double> diag, wx, wy;
  std::vector<double> inv_full_diag;  // 1 / (diag + sum of adjacent face weights)
  std::vector<double> x, b, r;        // multigrid scratch

  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }

  void finish() {
    inv_full_diag = diag;
    for (int j = 0; j < ny; ++j)
      for (int i = 1; i < nx; ++i) {
        const double w = wx[static_cast<std::size_t>(j) * (nx + 1) + i];
        inv_full_diag[static_cast<std::size_t>(j) * nx + i - 1] += w;
        inv_full_diag[static_cast<std::size_t>(j) * nx + i] += w;
      }
    if (planar)
      for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          const double w = wy[static_cast<std::size_t>(j) * nx + i];
          inv_full_diag[static_cast<std::size_t>(j - 1) * nx + i] += w;
          inv_full_diag[static_cast<std::size_t>(j) * nx + i] += w;
        }
    for (double& d : inv_full_diag) d = 1.0 / d;
    x.resize(size());
    b.resize(size());
    r.resize(size());
  }

  void apply(const std::vector<double>& in, std::vector<double>& out) const {
    for (std::size_t k = 0; k < in.size(); ++k) out[k] = diag[k] * in[k];
    for (int j = 0; j < ny; ++j) {
      const double* w = wx.data() + static_cast<std::size_t>(j) * (nx + 1);
      const double* xr = in.data() + static_cast<std::size_t>(j) * nx;
      double* yr = out.data() + static_cast<std::size_t>(j) * nx;
      for (int i = 1; i < nx; ++i) {
        const double f = w[i] * (xr[i] - xr[i - 1]);
        yr[i - 1] -= f;
        yr[i] += f;
      }
    }
    if (!planar) return;
    for (int j = 1; j < ny; ++j) {
      const double* w = wy.data() + static_cast<std::size_t>(j) * nx;
      const double* below = in.data() + static_cast<std::size_t>(j - 1) * nx;
      const double* above = in.data() + static_cast<std::size_t>(j) * nx;
      double* yb = out.data() + static_cast<std::size_t>(j - 1) * nx;
      double* ya = out.data() + static_cast<std::size_t>(j) * nx;
      for (int i = 0; i < nx; ++i) {
        const double f = w[i] * (above[i] - below[i]);
        yb[i] -= f;
        ya[i] += f;
      }
    }
  }
};

// Coarsening with piecewise-constant transfer: 2 (1D) or 2 x 2 (2D) fine
// cells per coarse cell. The summed (Galerkin) face weights overstate the
// coarse diffusion by a factor of two; halving them restores the rediscretized
// operator and keeps iteration counts independent of h.
constexpr double kCoarseFaceScale = 0.5;

bool can_coarsen(const Level& f) {
  constexpr std::size_t kCoarsest = 64;
  return f.size() > kCoarsest && f.nx % 2 == 0 && (!f.planar || f.ny % 2 == 0);
}

void coarsen(const Level& f, Level& c) {
  c.planar = f.planar;
  c.nx = f.nx / 2;
  c.ny = f.planar ? f.ny / 2 : 1;
  c.diag.assign(c.size(), 0.0);
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i)
      c.diag[static_cast<std::size_t>(f.planar ? j / 2 : 0) * c.nx + i / 2] += f.diag[static_cast<std::size_t>(j) * f.nx + i];
  c.wx.assign(static_cast<std::size_t>(c.nx + 1) * c.ny, 0.0);
  for (int j = 0; j < f.ny; ++j)
    for (int I = 1; I < c.nx; ++I)
      c.wx[static_cast<std::size_t>(f.planar ? j / 2 : 0) * (c.nx + 1) + I] += kCoarseFaceScale * f.wx[static_cast<std::size_t>(j) * (f.nx + 1) + 2 * I];
  c.wy.clear();
  if (f.planar) {
    c.wy.assign(static_cast<std::size_t>(c.nx) * (c.ny + 1), 0.0);
    for (int J = 1; J < c.ny; ++J)
      for (int i = 0; i < f.nx; ++i)
        c.wy[static_cast<std::size_t>(J) * c.nx + i / 2] += kCoarseFaceScale * f.wy[static_cast<std::size_t>(2 * J) * f.nx + i];
  }
  c.finish();
}

// Scratch reused across solves on the same thread; solves run once or twice
// per time step, so per-call allocation would dominate small grids.
struct Workspace {
  std::vector<Level> levels;
  std::vector<double> b, sol, r, z, p, ap;
};

Workspace& workspace() {
  thread_local Workspace ws;
  return ws;
}

constexpr double kJacobiWeight = 0.8;
constexpr double kMultigridCoupling = 2.0;
constexpr int kSmoothingSweeps = 2;
constexpr int kCoarsestSweeps = 40;

void jacobi(const Level& l, const std::vector<double>& b, std::vector<double>& x, std::vector<double>& scratch,
            int sweeps) {
  for (int s = 0; s < sweeps; ++s) {
    l.apply(x, scratch);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] += kJacobiWeight * l.inv_full_diag[k] * (b[k] - scratch[k]);
  }
}

// Symmetric V-cycle from a zero guess: the same smoother before and after the
// coarse correction and restriction equal to the transposed prolongation, so
// it is a valid preconditioner for conjugate gradients.
void v_cycle(std::vector<Level>& levels, std::size_t k) {
  Level& l = levels[k];
  std::fill(l.x.begin(), l.x.end(), 0.0);
  if (k + 1 == levels.size()) {
    jacobi(l, l.b, l.x, l.r, kCoarsestSweeps);
    return;
  }
  jacobi(l, l.b, l.x, l.r, kSmoothingSweeps);
  l.apply(l.x, l.r);
  for (std::size_t c = 0; c < l.size(); ++c) l.r[c] = l.b[c] - l.r[c];
  Level& coarse = levels[k + 1];
  std::fill(coarse.b.begin(), coarse.b.end(), 0.0);
  auto parent = [&](int i, int j) {
    return static_cast<std::size_t>(l.planar ? j / 2 : 0) * coarse.nx + i / 2;
  };
  for (int j = 0; j < l.ny; ++j)
    for (int i = 0; i < l.nx; ++i) coarse.b[parent(i, j)] += l.r[static_cast<std::size_t>(j) * l.nx + i];
  v_cycle(levels, k + 1);
  for (int j = 0; j < l.ny; ++j)
    for (int i = 0; i < l.nx; ++i) l.x[static_cast<std::size_t>(j) * l.nx + i] += coarse.x[parent(i, j)];
  jacobi(l, l.b, l.x, l.r, kSmoothingSweeps);
}

void build_levels(const Grid& g, std::span<const double> diag, const FaceFluxSet* c, double alpha,
                  std::vector<Level>& levels) {
  if (levels.empty()) levels.resize(1);
  Level& f = levels[0];
  f.nx = g.cells(0);
  f.ny = g.cells(1);
  f.planar = g.dim() == 2;
  f.diag.assign(diag.begin(), diag.end());
  const double ax = alpha / (g.spacing(0) * g.spacing(0));
  f.wx.assign(static_cast<std::size_t>(f.nx + 1) * f.ny, 0.0);
  for (int j = 0; j < f.ny; ++j)
    for (int i = 1; i < f.nx; ++i) {
      const std::size_t face = static_cast<std::size_t>(j) * (f.nx + 1) + i;
      f.wx[face] = ax * (c ? c->x[face] : 1.0);
    }
  f.wy.clear();
  if (f.planar) {
    const double ay = alpha / (g.spacing(1) * g.spacing(1));
    f.wy.assign(static_cast<std::size_t>(f.nx) * (f.ny + 1), 0.0);
    for (int j = 1; j < f.ny; ++j)
      for (int i = 0; i < f.nx; ++i) {
        const std::size_t face = static_cast<std::size_t>(j) * f.nx + i;
        f.wy[face] = ay * (c ? c->y[face] : 1.0);
      }
  }
  f.finish();
  // Nearly diagonal systems (small alpha / h^2) converge in a few Jacobi
  // iterations; multigrid only pays off once the coupling dominates.
  double coupling = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) coupling = std::max(coupling, 1.0 / (f.inv_full_diag[k] * f.diag[k]) - 1.0);
  std::size_t count = 1;
  while (coupling > kMultigridCoupling && can_coarsen(levels[count - 1])) {
    if (levels.size() == count) levels.emplace_back();
    coarsen(levels[count - 1], levels[count]);
    ++count;
  }
  levels.resize(count);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

CgResult solve_face_system(std::span<const double> diag, const FaceFluxSet* coefficients, double alpha,
                           const Field& rhs, Field& x, const CgOptions& options) {
  const Grid& g = rhs.grid();
  require_same_grid(x, g, "solve_face_system");
  if (diag.size() != g.size()) throw ContractViolation("solve_face_system: diagonal size mismatch");
  if (coefficients && !(coefficients->grid == g))
    throw ContractViolation("solve_face_system: coefficients on another grid");
  if (!rhs.all_finite() || !x.all_finite()) throw NumericalFailure("solve_face_system: non-finite input");

  const std::size_t n = g.size();
  const std::size_t max_iterations = options.max_iterations ? options.max_iterations : 10 * n;
  Workspace& ws = workspace();
  build_levels(g, diag, coefficients, alpha, ws.levels);
  Level& op = ws.levels[0];
  const bool multigrid = ws.levels.size() > 1;
  auto precondition = [&](const std::vector<double>& in, std::vector<double>& out) {
    if (!multigrid) {
      for (std::size_t k = 0; k < n; ++k) out[k] = op.inv_full_diag[k] * in[k];
      return;
    }
    std::copy(in.begin(), in.end(), op.b.begin());
    v_cycle(ws.levels, 0);
    std::copy(op.x.begin(), op.x.end(), out.begin());
  };

  std::vector<double>& b = ws.b;
  b.assign(rhs.values().begin(), rhs.values().end());
  const double b_norm = std::sqrt(dot(b, b));
  double b_abs_sum = 0.0;
  for (double v : b) b_abs_sum += std::abs(v);
  if (b_norm == 0.0) {
    for (auto& v : x.values()) v = 0.0;
    return {};
  }

  std::vector<double>& sol = ws.sol;
  sol.assign(x.values().begin(), x.values().end());
  std::vector<double>&r = ws.r, &z = ws.z, &p = ws.p, &ap = ws.ap;
  r.resize(n);
  z.resize(n);
  p.resize(n);
  ap.resize(n);
  op.apply(sol, ap);
  for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - ap[k];

  auto converged = [&](double r_norm) {
    if (r_norm > options.rel_tol * b_norm) return false;
    if (options.sum_tol > 0.0) {
      double r_sum = 0.0;
      for (double v : r) r_sum += v;
      if (std::abs(r_sum) > options.sum_tol * b_abs_sum) return false;
    }
    return true;
  };

  double r_norm = std::sqrt(dot(r, r));
  CgResult result;
  result.relative_residual = r_norm / b_norm;
  if (converged(r_norm)) {
    return result;
  }

  precondition(r, z);
  p = z;
  double rz = dot(r, z);
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    op.apply(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) break;
    const double step = rz / pap;
    for (std::size_t k = 0; k < n; ++k) {
      sol[k] += step * p[k];
      r[k] -= step * ap[k];
    }
    r_norm = std::sqrt(dot(r, r));
    result.iterations = it;
    result.relative_residual = r_norm / b_norm;
    if (converged(r_norm)) {
      std::copy(sol.begin(), sol.end(), x.values().begin());
      return result;
    }
    precondition(r, z);
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
  }
  throw SolverFailure("conjugate gradients did not converge: relative residual " +
                          std::to_string(result.relative_residual) + " after " +
                          std::to_string(result.iterations) + " iterations",
                      result.relative_residual, result.iterations);
}

}  // namespace cht
