#pragma once

namespace cht {

/// Diffusivity of the cell density,
///
///     D(s) = offset + delta * (s + epsilon)^(m - 1),    s >= 0.
///
/// offset > 0 or epsilon > 0 makes D(0) > 0 (non-degenerate); with both zero
/// and m > 1 the diffusion degenerates at s = 0 like a porous medium.
struct DiffusionSpec {
  double delta = 1.0;
  double m = 1.0;
  double offset = 0.0;
  double epsilon = 0.0;

  bool operator==(const DiffusionSpec&) const = default;
};

/// Taxis sensitivities and logistic rate.
struct ModelParams {
  double chi = 0.0;  // chemotaxis toward the enzyme concentration v
  double xi = 0.0;   // haptotaxis toward the matrix density w
  double mu = 0.0;   // logistic growth rate

  bool operator==(const ModelParams&) const = default;
};

/// Position of m relative to the global-boundedness threshold 2 - 2/n.
struct RegimeVerdict {
  bool within_theorem = false;
  double threshold = 0.0;
  double margin = 0.0;  // m - threshold
};

/// Throws DomainError unless delta > 0, m >= 1, offset >= 0, epsilon >= 0
/// and everything is finite.
void validate(const DiffusionSpec& spec);
void validate(const ModelParams& params);

/// D(s). Throws DomainError for s < 0 or non-finite s.
double eval_diffusion(const DiffusionSpec& spec, double s);

/// Same spec with epsilon replaced by eps, i.e. D_eps(s) = D(s + eps) for the
/// unregularized D. Throws DomainError unless eps > 0.
DiffusionSpec regularize(const DiffusionSpec& spec, double eps);

/// Strict comparison m > 2 - 2/n. Out-of-regime parameters are not an error;
/// simulations below the threshold are allowed.
RegimeVerdict validate_regime(const DiffusionSpec& spec, int analysis_n);

}  // namespace cht
