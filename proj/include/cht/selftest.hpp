#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cht/config.hpp"

namespace cht {

struct SelfTestResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// Observed order log2(e_coarse / e_fine) for one halving of h.
double observed_order(double coarse_error, double fine_error);

/// Discrete L2 errors of the flux-form operators against closed-form
/// derivatives of smooth Neumann-compatible fields, on n and 2n cells per
/// direction.
struct OrderStudy {
  double coarse = 0.0;
  double fine = 0.0;
  double order() const { return observed_order(coarse, fine); }
};
OrderStudy laplacian_order(int dim, int n);
OrderStudy diffusion_order(const DiffusionSpec& spec, int dim, int n);
OrderStudy taxis_order(int dim, int n);

/// Max |step_v - exact| for the first cosine mode, whose discrete Neumann
/// eigenvalue is known in closed form.
double step_v_eigen_error(int dim, int n, double dt);

/// Largest |integral| / (sum of |cell values|) over the outputs of laplacian,
/// diffusion_divergence and taxis_divergence for `trials` random fields on a
/// small grid with unequal spacings.
double flux_conservation_defect(int dim, const DiffusionSpec& spec, int trials, std::uint64_t seed);

/// Takes one full splitting step at the stable dt from each of `steps` random
/// admissible states (u >= 0 with zero patches, v >= 0, w > 0) and counts the
/// cells that end with u < 0, v < 0, w <= 0 or w above its old value. A
/// step that raises PositivityViolation counts once.
std::size_t random_step_violations(int dim, const ModelParams& params, const DiffusionSpec& spec,
                                   DiffusionScheme scheme, int steps, std::uint64_t seed);

/// Steady-state, operator-order, eigen-solve, conservation and positivity
/// checks on the config's grid and parameters.
std::vector<SelfTestResult> run_self_tests(const RunConfig& config);

}  // namespace cht
