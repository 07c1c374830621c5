#pragma once

#include <cstddef>
#include <vector>

#include "cht/grid.hpp"
#include "cht/model.hpp"

namespace cht {

/// Per-face normal quantities for every face of a grid, boundary faces
/// included. Boundary entries are zero for fluxes (homogeneous Neumann).
///
/// x-faces: (cells(0) + 1) * cells(1) entries, face i of row j sits between
/// cells i - 1 and i at index j * (cells(0) + 1) + i.
/// y-faces: cells(0) * (cells(1) + 1) entries, face j of column i sits between
/// cells j - 1 and j at index j * cells(0) + i. Empty on 1D grids.
struct FaceFluxSet {
  explicit FaceFluxSet(const Grid& g);

  Grid grid;
  std::vector<double> x;
  std::vector<double> y;

  double& x_face(int i, int j) { return x[static_cast<std::size_t>(j) * (grid.cells(0) + 1) + i]; }
  double x_face(int i, int j) const { return x[static_cast<std::size_t>(j) * (grid.cells(0) + 1) + i]; }
  double& y_face(int i, int j) { return y[static_cast<std::size_t>(j) * grid.cells(0) + i]; }
  double y_face(int i, int j) const { return y[static_cast<std::size_t>(j) * grid.cells(0) + i]; }

  /// True when every boundary face carries exactly zero.
  bool boundary_is_zero() const;
};

// Face flux builders. All leave boundary faces at zero.

/// (f_R - f_L) / h on interior faces.
void gradient_fluxes(const Field& f, FaceFluxSet& out);
/// Arithmetic face mean of D(u): 0.5 * (D(u_L) + D(u_R)).
void face_diffusivity(const Field& u, const DiffusionSpec& spec, FaceFluxSet& out);
/// D_face * (u_R - u_L) / h. Throws ContractViolation (naming the cell) when
/// u has a negative entry.
void diffusion_fluxes(const Field& u, const DiffusionSpec& spec, FaceFluxSet& out);
/// u_donor * (psi_R - psi_L) / h, donor = u_L when the face velocity is
/// positive and u_R otherwise.
void taxis_fluxes(const Field& u, const Field& psi, FaceFluxSet& out);

/// Discrete divergence of a face flux set, written into out.
void divergence(const FaceFluxSet& flux, Field& out);
Field divergence(const FaceFluxSet& flux);

/// Neumann Laplacian, 3-point (1D) / 5-point (2D) stencil with reflected ghosts.
Field laplacian(const Field& f, const Grid& g);

/// div(D(u) grad u) in flux form.
Field diffusion_divergence(const Field& u, const DiffusionSpec& spec, const Grid& g);

/// Unsigned div(u grad psi) with first-order upwinding of u. The transport
/// term of the density equation is the negative of this, times the
/// sensitivity.
Field taxis_divergence(const Field& u, const Field& psi, const Grid& g);

/// Cell-centered |grad f|^2 from central differences; the reflected ghost
/// makes the boundary-normal difference one-sided.
Field grad_mag_sq(const Field& f, const Grid& g);

}  // namespace cht
