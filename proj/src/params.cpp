#include "choq/params.hpp"

#include <cmath>

#include "choq/errors.hpp"

namespace choq {

const char* regime_name(RegimeTag tag) {
    switch (tag) {
    case RegimeTag::NonexistenceLow: return "NonexistenceLow";
    case RegimeTag::MassSubcritical: return "MassSubcritical";
    case RegimeTag::MassCritical: return "MassCritical";
    case RegimeTag::MassSupercritical: return "MassSupercritical";
    case RegimeTag::EnergyCritical: return "EnergyCritical";
    case RegimeTag::NonexistenceHigh: return "NonexistenceHigh";
    }
    return "?";
}

ProblemParams validate_params(int dim, double s, double alpha, double p, double omega) {
    if (dim < 1) throw OutOfRange("dim");
    if (!(s > 0.0 && s < 1.0) || !std::isfinite(s)) throw OutOfRange("s");
    if (!(alpha > 0.0 && alpha < double(dim)) || !std::isfinite(alpha))
        throw OutOfRange("alpha");
    if (!(p > 1.0) || !std::isfinite(p)) throw OutOfRange("p");
    if (!(omega >= 0.0) || !std::isfinite(omega)) throw OutOfRange("omega");
    return ProblemParams{dim, s, alpha, p, omega};
}

Regime classify_regime(const ProblemParams& pp) {
    if (!(pp.dim > 2.0 * pp.s))
        throw DimensionTooSmall("classify_regime requires N > 2s (p_high undefined)");
    Regime r;
    r.p_low = pp.p_low();
    r.p_mass = pp.p_mass();
    r.p_high = pp.p_high();
    const double p = pp.p;
    if (p <= r.p_low)
        r.tag = RegimeTag::NonexistenceLow;
    else if (p >= r.p_high)
        r.tag = (pp.omega == 0.0 && p == r.p_high) ? RegimeTag::EnergyCritical
                                                   : RegimeTag::NonexistenceHigh;
    else if (p < r.p_mass)
        r.tag = RegimeTag::MassSubcritical;
    else if (p == r.p_mass)
        r.tag = RegimeTag::MassCritical;
    else
        r.tag = RegimeTag::MassSupercritical;
    return r;
}

} // namespace choq
