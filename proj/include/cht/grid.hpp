#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace cht {

/// Cell-centered rectangular grid on (0, L1) or (0, L1) x (0, L2).
///
/// Cells are stored x-fastest: cell (i, j) lives at index j * cells(0) + i.
/// A 1D grid reports cells(1) == 1 and its second extent is unused.
class Grid {
 public:
  /// Throws DomainError for dim outside {1, 2}, nonpositive extents or counts.
  Grid(int dim, std::array<double, 2> extents, std::array<int, 2> cells);

  static Grid line(double length, int cells);
  static Grid rectangle(double lx, double ly, int nx, int ny);

  int dim() const noexcept { return dim_; }
  double extent(int d) const { return extents_.at(d); }
  int cells(int d) const { return cells_.at(d); }
  double spacing(int d) const { return spacing_.at(d); }
  double h_min() const noexcept;
  std::size_t size() const noexcept { return static_cast<std::size_t>(cells_[0]) * cells_[1]; }

  /// Product of the active spacings.
  double cell_volume() const noexcept;
  /// |Omega|.
  double measure() const noexcept;

  double center(int d, int index) const { return (index + 0.5) * spacing_.at(d); }
  std::size_t index(int i, int j = 0) const noexcept {
    return static_cast<std::size_t>(j) * cells_[0] + i;
  }

  bool operator==(const Grid&) const = default;

 private:
  int dim_;
  std::array<double, 2> extents_;
  std::array<int, 2> cells_;
  std::array<double, 2> spacing_;
};

/// One scalar unknown on a grid.
class Field {
 public:
  explicit Field(const Grid& grid, double fill = 0.0);
  /// Throws ContractViolation when values.size() != grid.size().
  Field(const Grid& grid, std::vector<double> values);

  /// Samples fn(x, y) at cell centers. On 1D grids y is passed as 0.
  template <class Fn>
  static Field from_function(const Grid& grid, Fn&& fn) {
    Field out(grid);
    for (int j = 0; j < grid.cells(1); ++j)
      for (int i = 0; i < grid.cells(0); ++i)
        out.values_[grid.index(i, j)] =
            fn(grid.center(0, i), grid.dim() == 2 ? grid.center(1, j) : 0.0);
    return out;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  double& operator[](std::size_t k) noexcept { return values_[k]; }
  double operator[](std::size_t k) const noexcept { return values_[k]; }
  double& operator()(int i, int j = 0) noexcept { return values_[grid_.index(i, j)]; }
  double operator()(int i, int j = 0) const noexcept { return values_[grid_.index(i, j)]; }

  bool all_finite() const noexcept;

  bool operator==(const Field&) const = default;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Throws ContractViolation unless f lives on g.
void require_same_grid(const Field& f, const Grid& g, const char* where);

/// Fixed-order pairwise summation; results depend only on the input order.
double pairwise_sum(std::span<const double> values) noexcept;

/// Midpoint quadrature: cell_volume * sum of values.
double integrate(const Field& f, const Grid& g);

/// (integral of |f|^p)^(1/p). Throws DomainError for p < 1.
double lp_norm(const Field& f, double p, const Grid& g);

/// Max over cells of |f|.
double linf_norm(const Field& f);

}  // namespace cht
