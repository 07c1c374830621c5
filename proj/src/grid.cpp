#include "cht/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cht/errors.hpp"

namespace cht {

Grid::Grid(int dim, std::array<double, 2> extents, std::array<int, 2> cells)
    : dim_(dim), extents_(extents), cells_(cells), spacing_{} {
  if (dim != 1 && dim != 2) throw DomainError("grid: dim must be 1 or 2");
  if (dim == 1) {
    extents_[1] = 1.0;
    cells_[1] = 1;
  }
  for (int d = 0; d < 2; ++d) {
    if (!(extents_[d] > 0.0) || !std::isfinite(extents_[d]))
      throw DomainError("grid: extents must be positive");
    if (cells_[d] < 1) throw DomainError("grid: cell counts must be positive");
    spacing_[d] = extents_[d] / cells_[d];
  }
}

Grid Grid::line(double length, int cells) { return Grid(1, {length, 1.0}, {cells, 1}); }

Grid Grid::rectangle(double lx, double ly, int nx, int ny) { return Grid(2, {lx, ly}, {nx, ny}); }

double Grid::h_min() const noexcept {
  return dim_ == 1 ? spacing_[0] : std::min(spacing_[0], spacing_[1]);
}

double Grid::cell_volume() const noexcept {
  return dim_ == 1 ? spacing_[0] : spacing_[0] * spacing_[1];
}

double Grid::measure() const noexcept {
  return dim_ == 1 ? extents_[0] : extents_[0] * extents_[1];
}

Field::Field(const Grid& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

Field::Field(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw ContractViolation("field: " + std::to_string(values_.size()) + " values for a grid of " +
                            std::to_string(grid_.size()) + " cells");
}

bool Field::all_finite() const noexcept {
  // x - x is 0 for finite x and NaN otherwise.
  double probe = 0.0;
  for (double x : values_) probe += x - x;
  return probe == 0.0;
}

void require_same_grid(const Field& f, const Grid& g, const char* where) {
  if (!(f.grid() == g)) throw ContractViolation(std::string(where) + ": field is not on the given grid");
}

double pairwise_sum(std::span<const double> values) noexcept {
  constexpr std::size_t kBlock = 128;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double x : values) s += x;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double integrate(const Field& f, const Grid& g) {
  require_same_grid(f, g, "integrate");
  return g.cell_volume() * pairwise_sum(f.values());
}

double lp_norm(const Field& f, double p, const Grid& g) {
  require_same_grid(f, g, "lp_norm");
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("lp_norm: p must be >= 1");
  std::vector<double> powered(f.size());
  const auto values = f.values();
  if (p == 1.0) {
    std::transform(values.begin(), values.end(), powered.begin(), [](double x) { return std::abs(x); });
  } else if (p == 2.0) {
    std::transform(values.begin(), values.end(), powered.begin(), [](double x) { return x * x; });
  } else {
    std::transform(values.begin(), values.end(), powered.begin(),
                   [p](double x) { return std::pow(std::abs(x), p); });
  }
  const double integral = g.cell_volume() * pairwise_sum(powered);
  if (p == 1.0) return integral;
  if (p == 2.0) return std::sqrt(integral);
  return std::pow(integral, 1.0 / p);
}

double linf_norm(const Field& f) {
  double best = 0.0;
  for (double x : f.values()) best = std::max(best, std::abs(x));
  return best;
}

}  // namespace cht
