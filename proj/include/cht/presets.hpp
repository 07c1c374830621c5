#pragma once

#include "cht/config.hpp"
#include "cht/grid.hpp"
#include "cht/stepper.hpp"

namespace cht {

/// Throws DomainError for parameters that cannot produce admissible data
/// (u0 >= 0 and not identically zero, v0 >= 0, w0 > 0).
void validate(const PresetSpec& preset);

/// Samples the preset at cell centers. Deterministic for a fixed seed.
InitialData make_initial_data(const PresetSpec& preset, const Grid& g);

}  // namespace cht
