#include "cht/presets.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "cht/errors.hpp"

namespace cht {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError("initial: " + what);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void validate(const PresetSpec& s) {
  switch (s.kind) {
    case PresetKind::ConstantSteady:
      require(finite(s.w0) && s.w0 > 0.0, "w0 must be positive");
      break;
    case PresetKind::GaussianBump:
      require(finite(s.amplitude) && s.amplitude > 0.0, "amplitude must be positive");
      require(finite(s.width) && s.width > 0.0, "width must be positive");
      require(finite(s.center_x) && finite(s.center_y), "center must be finite");
      require(finite(s.mass) && s.mass >= 0.0, "mass must be >= 0 (0 keeps the amplitude)");
      require(finite(s.w0_perturbation) && std::abs(s.w0_perturbation) < 1.0,
              "w0_perturbation must lie in (-1, 1)");
      break;
    case PresetKind::PerturbedEquilibrium:
      require(finite(s.rho) && s.rho >= 0.0 && s.rho < 1.0, "rho must lie in [0, 1)");
      require(finite(s.w_level) && s.w_level > 0.0, "w_level must be positive");
      break;
  }
}

InitialData make_initial_data(const PresetSpec& s, const Grid& g) {
  validate(s);
  switch (s.kind) {
    case PresetKind::ConstantSteady:
      return {Field(g, 1.0), Field(g, 1.0), Field(g, s.w0)};

    case PresetKind::GaussianBump: {
      const double two_var = 2.0 * s.width * s.width;
      Field u0 = Field::from_function(g, [&](double x, double y) {
        const double dx = x - s.center_x;
        const double dy = g.dim() == 2 ? y - s.center_y : 0.0;
        return s.amplitude * std::exp(-(dx * dx + dy * dy) / two_var);
      });
      if (s.mass > 0.0) {
        const double scale = s.mass / integrate(u0, g);
        for (std::size_t k = 0; k < u0.size(); ++k) u0[k] *= scale;
      }
      const double kx = std::numbers::pi / g.extent(0);
      const double ky = std::numbers::pi / g.extent(1);
      Field w0 = Field::from_function(g, [&](double x, double y) {
        const double mode = std::cos(kx * x) * (g.dim() == 2 ? std::cos(ky * y) : 1.0);
        return 1.0 + s.w0_perturbation * mode;
      });
      return {std::move(u0), Field(g, 0.0), std::move(w0)};
    }

    case PresetKind::PerturbedEquilibrium: {
      std::mt19937_64 rng(s.seed);
      std::uniform_real_distribution<double> r(-1.0, 1.0);
      Field u0(g), v0(g), w0(g);
      for (std::size_t k = 0; k < g.size(); ++k) {
        u0[k] = 1.0 + s.rho * r(rng);
        v0[k] = 1.0 + s.rho * r(rng);
        w0[k] = s.w_level * (1.0 + s.rho * r(rng));
      }
      return {std::move(u0), std::move(v0), std::move(w0)};
    }
  }
  throw ContractViolation("make_initial_data: unknown preset");
}

}  // namespace cht
