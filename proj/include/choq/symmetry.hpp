#pragma once

#include <optional>

#include "choq/grid.hpp"

namespace choq {

// Symmetry classes for solver projection.
//   Radial: average over the discrete rotation surrogate — all fields with the
//     same integer |k|^2 shell (signed grid indices) share one value; this
//     subsumes axis reflections and permutations.
//   BlockRadial(m): radialize the coordinate blocks x1 in R^m, x2 in R^m,
//     x3 in R^{N-2m} separately (shell-average on the triple of block radii).
//   OddSwap(m): BlockRadial(m) composed with antisymmetrization under the
//     swap (x1,x2,x3) -> (x2,x1,x3).
enum class SymmetryTag { Radial, BlockRadial, OddSwap };

struct SymmetrySpec {
    SymmetryTag tag = SymmetryTag::Radial;
    int m = 0; // block size for BlockRadial/OddSwap
    // The paper guarantees OddSwap classes for 2 <= m <= N/2, m != (N-1)/2;
    // smaller N (e.g. N=2, m=1) is allowed but flagged as a demonstration.
    bool low_dim_demo(int dim) const {
        return tag == SymmetryTag::OddSwap && !(m >= 2 && 2 * m <= dim && 2 * m != dim - 1);
    }
};

// Group-average projection onto the fixed-point set of the spec.
// Idempotent to machine precision. Throws IncompatibleSpec when the spec
// does not fit the grid dimension.
Field symmetrize(const Field& u, const SymmetrySpec& spec);

// Circularly shift so the |u|-maximizing point sits at the origin index n/2.
Field recenter_max(const Field& u);

} // namespace choq
