#pragma once

#include <string>

namespace choq {

// Problem tuple (N, s, alpha, p, omega) for
//   (-Delta)^s u + omega u = (K_alpha * |u|^p) |u|^{p-2} u.
struct ProblemParams {
    int dim = 3;        // N >= 1
    double s = 0.5;     // fractional order, in (0,1)
    double alpha = 2.0; // Riesz order, in (0,N)
    double p = 2.0;     // nonlinearity exponent, > 1
    double omega = 1.0; // frequency, >= 0 (0 only for the zero-mass problem)

    double p_low() const { return 1.0 + alpha / dim; }
    double p_mass() const { return 1.0 + (2.0 * s + alpha) / dim; }
    // Defined only when N > 2s.
    double p_high() const { return (dim + alpha) / (dim - 2.0 * s); }
};

enum class RegimeTag {
    NonexistenceLow,
    MassSubcritical,
    MassCritical,
    MassSupercritical,
    EnergyCritical,
    NonexistenceHigh,
};

struct Regime {
    RegimeTag tag;
    double p_low, p_mass, p_high;
};

const char* regime_name(RegimeTag tag);

// Validates ranges; never clamps. Throws OutOfRange naming the violated bound.
ProblemParams validate_params(int dim, double s, double alpha, double p, double omega);

// Pure threshold classification; exact comparisons, boundaries are
// NonexistenceLow / MassCritical / NonexistenceHigh. Throws DimensionTooSmall
// when N <= 2s (p_high undefined). EnergyCritical is reserved for omega=0
// with p = p_high.
Regime classify_regime(const ProblemParams& params);

} // namespace choq
