#pragma once

#include <optional>
#include <vector>

#include "choq/functionals.hpp"
#include "choq/grid.hpp"
#include "choq/params.hpp"
#include "choq/symmetry.hpp"

namespace choq {

struct SolverOptions {
    double dt = 0.5;      // NGF pseudo-time step (halved on energy increase)
    int max_iter = 2000;
    double tol = 1e-9;    // relative gradient / residual tolerance
    unsigned seed = 0;    // seeded init noise; 0 = no noise
    double noise = 0.0;   // relative noise amplitude
    std::optional<SymmetrySpec> symmetry;
    ConvolutionMode mode = ConvolutionMode::FreeSpacePadded;
    bool recenter = true; // circularly shift the converged max to the origin
    // allow the Petviashvili iteration to hand over to the residual-descent
    // polish on stagnation; disable to keep the symmetry-projected fixed
    // point (whose residual floors are documented in the README)
    bool polish = true;
    std::optional<Field> init; // explicit initial iterate (replaces the Gaussian)
};

enum class Termination { Converged, MaxIter, Diverged };

struct HistoryEntry {
    int iteration;
    double energy;
    double residual;
};

struct SolveReport {
    Field field;
    int iterations = 0;
    std::vector<HistoryEntry> history;
    Termination termination = Termination::MaxIter;
    double lambda = 0.0; // NGF: (P-K)/rho^2; Petviashvili: omega
    double rho = 0.0;    // final L2 norm
    bool low_dim_demo = false; // OddSwap outside the paper's N=4 / N>=6 window
    FunctionalValues functionals; // of the final iterate
};

// Constrained minimization of E_0 on the sphere ||u||_2 = rho:
// semi-implicit flow u* = (I + dt(-Delta)^s)^{-1}(u + dt nl(u)), u = rho u*/||u*||,
// followed by a preconditioned projected-gradient refinement
// u <- normalize(u - dt (I+(-Delta)^s)^{-1}(g + lambda u)), lambda = -<g,u>/rho^2.
// Requires the MassSubcritical regime (RegimeUnsupported otherwise).
SolveReport solve_ground_state_ngf(const ProblemParams& params, double rho,
                                   const Grid& grid, const SolverOptions& opts);

// Petviashvili fixed point u <- symmetrize(M_k^gamma resolvent(nl(u), s, omega)),
// M_k = <((-Delta)^s+omega)u, u>/<nl(u), u>, gamma = (2p-1)/(2p-2); converged when
// ||G(u)||_2/||u||_2 <= tol and |M_k - 1| <= tol. When the iteration
// stagnates (the resolvent fixed point sits a small offset away from the zero
// of the discrete first variation in the free-space mode) it switches to a
// damped preconditioned descent on G with an analytic Nehari rescale per
// step, which converges to an exact discrete solution. Requires p strictly
// inside (p_low, p_high) and omega > 0. For OddSwap specs a damped relaxation phase
// (gamma = 1, under-relaxed, followed by a Nehari rescale) precedes the
// standard iteration, which alone is not attracted to sign-changing states.
SolveReport solve_petviashvili(const ProblemParams& params, double omega,
                               const Grid& grid, const SolverOptions& opts);

} // namespace choq
