#include "cht/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cht/errors.hpp"

namespace cht {

FaceFluxSet::FaceFluxSet(const Grid& g)
    : grid(g),
      x(static_cast<std::size_t>(g.cells(0) + 1) * g.cells(1), 0.0),
      y(g.dim() == 2 ? static_cast<std::size_t>(g.cells(0)) * (g.cells(1) + 1) : 0, 0.0) {}

bool FaceFluxSet::boundary_is_zero() const {
  const int nx = grid.cells(0);
  const int ny = grid.cells(1);
  for (int j = 0; j < ny; ++j)
    if (x_face(0, j) != 0.0 || x_face(nx, j) != 0.0) return false;
  if (grid.dim() == 2)
    for (int i = 0; i < nx; ++i)
      if (y_face(i, 0) != 0.0 || y_face(i, ny) != 0.0) return false;
  return true;
}

namespace {

void require_flux_grid(const FaceFluxSet& flux, const Grid& g, const char* where) {
  if (!(flux.grid == g)) throw ContractViolation(std::string(where) + ": face set is not on the field's grid");
}

// Applies face_value(left_index, right_index, inverse_spacing) to every
// interior face; boundary faces are set to zero.
template <class FaceFn>
void for_interior_faces(const Grid& g, FaceFluxSet& out, FaceFn&& face_value) {
  const int nx = g.cells(0);
  const int ny = g.cells(1);
  const double inv_hx = 1.0 / g.spacing(0);
  for (int j = 0; j < ny; ++j) {
    double* row = out.x.data() + static_cast<std::size_t>(j) * (nx + 1);
    const std::size_t base = g.index(0, j);
    row[0] = 0.0;
    row[nx] = 0.0;
    for (int i = 1; i < nx; ++i) row[i] = face_value(base + i - 1, base + i, inv_hx);
  }
  if (g.dim() == 2) {
    const double inv_hy = 1.0 / g.spacing(1);
    std::fill_n(out.y.begin(), nx, 0.0);
    std::fill_n(out.y.begin() + static_cast<std::ptrdiff_t>(ny) * nx, nx, 0.0);
    for (int j = 1; j < ny; ++j) {
      double* row = out.y.data() + static_cast<std::size_t>(j) * nx;
      const std::size_t below = g.index(0, j - 1);
      const std::size_t above = g.index(0, j);
      for (int i = 0; i < nx; ++i) row[i] = face_value(below + i, above + i, inv_hy);
    }
  }
}

}  // namespace

void gradient_fluxes(const Field& f, FaceFluxSet& out) {
  require_flux_grid(out, f.grid(), "gradient_fluxes");
  const double* v = f.data();
  for_interior_faces(f.grid(), out, [v](std::size_t l, std::size_t r, double inv_h) {
    return (v[r] - v[l]) * inv_h;
  });
}

namespace {

void diffusivity_per_cell(const Field& u, const DiffusionSpec& spec, std::vector<double>& d_cell) {
  d_cell.resize(u.size());
  for (std::size_t k = 0; k < u.size(); ++k)
    if (!(u[k] >= 0.0) || !std::isfinite(u[k]))
      throw ContractViolation("diffusion: negative or non-finite density " + std::to_string(u[k]) +
                              " at cell " + std::to_string(k));
  // Same arithmetic as eval_diffusion, with the exponent dispatch outside the loop.
  const double exponent = spec.m - 1.0;
  auto fill = [&](auto power) {
    for (std::size_t k = 0; k < u.size(); ++k) d_cell[k] = spec.offset + spec.delta * power(u[k] + spec.epsilon);
  };
  if (exponent == 0.0)
    fill([](double) { return 1.0; });
  else if (exponent == 1.0)
    fill([](double b) { return b; });
  else if (exponent == 0.5)
    fill([](double b) { return std::sqrt(b); });
  else
    fill([exponent](double b) { return std::pow(b, exponent); });
}

}  // namespace

void face_diffusivity(const Field& u, const DiffusionSpec& spec, FaceFluxSet& out) {
  require_flux_grid(out, u.grid(), "face_diffusivity");
  std::vector<double> d_cell;
  diffusivity_per_cell(u, spec, d_cell);
  const double* d = d_cell.data();
  for_interior_faces(u.grid(), out, [d](std::size_t l, std::size_t r, double) {
    return 0.5 * (d[l] + d[r]);
  });
}

void diffusion_fluxes(const Field& u, const DiffusionSpec& spec, FaceFluxSet& out) {
  require_flux_grid(out, u.grid(), "diffusion_fluxes");
  thread_local std::vector<double> d_cell;
  diffusivity_per_cell(u, spec, d_cell);
  const double* d = d_cell.data();
  const double* v = u.data();
  for_interior_faces(u.grid(), out, [d, v](std::size_t l, std::size_t r, double inv_h) {
    return 0.5 * (d[l] + d[r]) * ((v[r] - v[l]) * inv_h);
  });
}

void taxis_fluxes(const Field& u, const Field& psi, FaceFluxSet& out) {
  require_same_grid(psi, u.grid(), "taxis_fluxes");
  require_flux_grid(out, u.grid(), "taxis_fluxes");
  const double* a = u.data();
  const double* p = psi.data();
  for_interior_faces(u.grid(), out, [a, p](std::size_t l, std::size_t r, double inv_h) {
    const double velocity = (p[r] - p[l]) * inv_h;
    return (velocity > 0.0 ? a[l] : a[r]) * velocity;
  });
}

void divergence(const FaceFluxSet& flux, Field& out) {
  const Grid& g = flux.grid;
  require_same_grid(out, g, "divergence");
  const int nx = g.cells(0);
  const int ny = g.cells(1);
  const double inv_hx = 1.0 / g.spacing(0);
  for (int j = 0; j < ny; ++j) {
    const double* row = flux.x.data() + static_cast<std::size_t>(j) * (nx + 1);
    double* o = out.data() + g.index(0, j);
    for (int i = 0; i < nx; ++i) o[i] = (row[i + 1] - row[i]) * inv_hx;
  }
  if (g.dim() == 2) {
    const double inv_hy = 1.0 / g.spacing(1);
    for (int j = 0; j < ny; ++j) {
      const double* lower = flux.y.data() + static_cast<std::size_t>(j) * nx;
      const double* upper = lower + nx;
      double* o = out.data() + g.index(0, j);
      for (int i = 0; i < nx; ++i) o[i] += (upper[i] - lower[i]) * inv_hy;
    }
  }
}

Field divergence(const FaceFluxSet& flux) {
  Field out(flux.grid);
  divergence(flux, out);
  return out;
}

Field laplacian(const Field& f, const Grid& g) {
  require_same_grid(f, g, "laplacian");
  FaceFluxSet flux(g);
  gradient_fluxes(f, flux);
  return divergence(flux);
}

Field diffusion_divergence(const Field& u, const DiffusionSpec& spec, const Grid& g) {
  require_same_grid(u, g, "diffusion_divergence");
  FaceFluxSet flux(g);
  diffusion_fluxes(u, spec, flux);
  return divergence(flux);
}

Field taxis_divergence(const Field& u, const Field& psi, const Grid& g) {
  require_same_grid(u, g, "taxis_divergence");
  FaceFluxSet flux(g);
  taxis_fluxes(u, psi, flux);
  return divergence(flux);
}

Field grad_mag_sq(const Field& f, const Grid& g) {
  require_same_grid(f, g, "grad_mag_sq");
  const int nx = g.cells(0);
  const int ny = g.cells(1);
  Field out(g);
  const double cx = 0.5 / g.spacing(0);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double east = f(std::min(i + 1, nx - 1), j);
      const double west = f(std::max(i - 1, 0), j);
      const double dx = (east - west) * cx;
      out(i, j) = dx * dx;
    }
  }
  if (g.dim() == 2) {
    const double cy = 0.5 / g.spacing(1);
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const double north = f(i, std::min(j + 1, ny - 1));
        const double south = f(i, std::max(j - 1, 0));
        const double dy = (north - south) * cy;
        out(i, j) += dy * dy;
      }
    }
  }
  return out;
}

}  // namespace cht
