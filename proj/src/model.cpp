#include "cht/model.hpp"

#include <cmath>
#include <string>

#include "cht/errors.hpp"

namespace cht {

void validate(const DiffusionSpec& spec) {
  if (!std::isfinite(spec.delta) || spec.delta <= 0.0)
    throw DomainError("diffusion: delta must be positive, got " + std::to_string(spec.delta));
  if (!std::isfinite(spec.m) || spec.m < 1.0)
    throw DomainError("diffusion: m must be >= 1, got " + std::to_string(spec.m));
  if (!std::isfinite(spec.offset) || spec.offset < 0.0)
    throw DomainError("diffusion: offset must be >= 0, got " + std::to_string(spec.offset));
  if (!std::isfinite(spec.epsilon) || spec.epsilon < 0.0)
    throw DomainError("diffusion: epsilon must be >= 0, got " + std::to_string(spec.epsilon));
}

void validate(const ModelParams& params) {
  auto check = [](double value, const char* name) {
    if (!std::isfinite(value) || value < 0.0)
      throw DomainError(std::string("params: ") + name + " must be finite and >= 0, got " +
                        std::to_string(value));
  };
  check(params.chi, "chi");
  check(params.xi, "xi");
  check(params.mu, "mu");
}

double eval_diffusion(const DiffusionSpec& spec, double s) {
  if (!(s >= 0.0) || !std::isfinite(s))
    throw DomainError("eval_diffusion: argument must be finite and >= 0, got " + std::to_string(s));
  const double base = s + spec.epsilon;
  const double exponent = spec.m - 1.0;
  double power;
  if (exponent == 0.0)
    power = 1.0;
  else if (exponent == 1.0)
    power = base;
  else if (exponent == 0.5)
    power = std::sqrt(base);
  else
    power = std::pow(base, exponent);
  return spec.offset + spec.delta * power;
}

DiffusionSpec regularize(const DiffusionSpec& spec, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw DomainError("regularize: eps must be positive, got " + std::to_string(eps));
  DiffusionSpec out = spec;
  out.epsilon = eps;
  return out;
}

RegimeVerdict validate_regime(const DiffusionSpec& spec, int analysis_n) {
  if (analysis_n < 1) throw DomainError("validate_regime: analysis dimension must be >= 1");
  RegimeVerdict verdict;
  verdict.threshold = 2.0 - 2.0 / static_cast<double>(analysis_n);
  verdict.margin = spec.m - verdict.threshold;
  verdict.within_theorem = verdict.margin > 0.0;
  return verdict;
}

}  // namespace cht
