#pragma once

#include <optional>

#include "klx/eigenroots.hpp"
#include "klx/spectrum.hpp"
#include "klx/transform.hpp"

namespace klx {

// Catalog example matching the transform's (process, weight) pair, if any.
std::optional<EquationId> match_catalog(const Transform& tr);

// KL spectrum of the transformed process: analytic root-based construction
// for the example catalog, Nystrom on the transformed kernel otherwise.
// Eigenfunctions are L2-normalized on a composite grid of size grid_size and
// sign-fixed (first nonzero value positive).
Spectrum transformed_kl(const Transform& tr, int count, int grid_size = 1024);

}  // namespace klx
