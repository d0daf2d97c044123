#include "choq/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "choq/errors.hpp"

namespace choq {

namespace {

double sq_radius(const Grid& g, const int* idx, int from, int to) {
    double r2 = 0.0;
    for (int d = from; d < to; ++d) {
        double x = g.coord(idx[d]);
        r2 += x * x;
    }
    return r2;
}

Field gaussian_init(const Grid& g, const SolverOptions& opts) {
    if (opts.init) {
        if (!(opts.init->grid == g)) throw IncompatibleSpec("init grid mismatch");
        Field u = *opts.init;
        if (opts.symmetry) u = symmetrize(u, *opts.symmetry);
        return u;
    }
    Field u(g);
    std::vector<int> idx(g.dim);
    const bool odd = opts.symmetry && opts.symmetry->tag == SymmetryTag::OddSwap;
    const int m = odd ? opts.symmetry->m : 0;
    for (std::size_t f = 0; f < u.v.size(); ++f) {
        unravel(f, g.dim, g.n, idx.data());
        double r2 = sq_radius(g, idx.data(), 0, g.dim);
        double amp = std::exp(-r2 / 2.0);
        if (odd) // swap-odd, block-even seed surviving the projection
            amp *= sq_radius(g, idx.data(), 0, m) - sq_radius(g, idx.data(), m, 2 * m);
        u.v[f] = amp;
    }
    if (opts.noise > 0.0) {
        std::mt19937_64 rng(opts.seed);
        std::normal_distribution<double> nd;
        double scale = opts.noise * *std::max_element(u.v.begin(), u.v.end());
        for (auto& x : u.v) x += scale * nd(rng);
    }
    if (opts.symmetry) u = symmetrize(u, *opts.symmetry);
    return u;
}

void sign_normalize(Field& u) {
    double mx = *std::max_element(u.v.begin(), u.v.end());
    double mn = *std::min_element(u.v.begin(), u.v.end());
    if (-mn > mx)
        for (auto& x : u.v) x = -x;
}

void require_open_window(const ProblemParams& params) {
    Regime r = classify_regime(params);
    if (r.tag == RegimeTag::NonexistenceLow || r.tag == RegimeTag::NonexistenceHigh ||
        r.tag == RegimeTag::EnergyCritical) {
        std::ostringstream os;
        os << "regime " << regime_name(r.tag) << " is outside the existence window ("
           << r.p_low << ", " << r.p_high << ")";
        throw RegimeUnsupported(os.str());
    }
}

void finalize(SolveReport& rep, const ProblemParams& params, const SolverOptions& opts,
              bool nehari_rescale = false) {
    sign_normalize(rep.field);
    bool oddswap = opts.symmetry && opts.symmetry->tag == SymmetryTag::OddSwap;
    if (opts.recenter && !oddswap) rep.field = recenter_max(rep.field);
    if (nehari_rescale && rep.termination == Termination::Converged) {
        // Project the converged iterate onto the Nehari set: u -> cu with
        // c^{2p-2} = (K + omega M)/P. The shift is O(tol) in amplitude and
        // zeroes the Nehari residual exactly, removing the small mismatch
        // between the discrete resolvent and the discrete operator.
        FunctionalValues fv = functional_suite(rep.field, params, opts.mode);
        if (fv.P > 0.0) {
            double c = std::pow((fv.K + params.omega * fv.M) / fv.P,
                                1.0 / (2.0 * params.p - 2.0));
            for (auto& x : rep.field.v) x *= c;
        }
    }
    rep.rho = norm2(rep.field);
    rep.functionals = functional_suite(rep.field, params, opts.mode);
    if (opts.symmetry) rep.low_dim_demo = opts.symmetry->low_dim_demo(params.dim);
}

} // namespace

SolveReport solve_ground_state_ngf(const ProblemParams& params, double rho,
                                   const Grid& grid, const SolverOptions& opts) {
    if (!(rho > 0.0)) throw OutOfRange("rho");
    Regime r = classify_regime(params);
    if (r.tag != RegimeTag::MassSubcritical)
        throw RegimeUnsupported(
            std::string("normalized gradient flow requires the MassSubcritical "
                        "regime, got ") +
            regime_name(r.tag));

    SolveReport rep;
    Field u = gaussian_init(grid, opts);
    double nrm = norm2(u);
    if (nrm == 0.0) throw ZeroField();
    for (auto& x : u.v) x *= rho / nrm;

    const double s = params.s, p = params.p;
    double dt = opts.dt;
    double prev_energy = 1e300;
    int bad_streak = 0;
    // The normalized semi-implicit flow converges fast but its fixed point is
    // biased at O(dt lambda); hand over to the projected-gradient polish once
    // the residual is small or has stagnated.
    bool polish = false;
    double step_pol = 0.9, prev_res = 1e300;
    int stagnant = 0;

    for (int it = 1; it <= opts.max_iter; ++it) {
        Field nl = nonlinear_term(u, params, opts.mode);
        Field lap = fractional_laplacian_apply(u, s, opts.mode);
        double K = inner(u, lap), P = inner(nl, u);
        double energy = K / 2.0 - P / (2.0 * p);
        // projected gradient of E_0 on the sphere
        Field pg(grid);
        double lambda = (P - K) / (rho * rho);
        for (std::size_t i = 0; i < u.v.size(); ++i)
            pg.v[i] = lap.v[i] - nl.v[i] + lambda * u.v[i];
        double res = norm2(pg) / rho;
        rep.history.push_back({it, energy, res});
        rep.iterations = it;
        rep.lambda = lambda;
        if (!std::isfinite(energy) || !std::isfinite(res)) {
            rep.termination = Termination::Diverged;
            rep.field = u;
            finalize(rep, params, opts);
            return rep;
        }
        if (res <= opts.tol) {
            rep.termination = Termination::Converged;
            break;
        }
        if (std::abs(res - prev_res) <= 1e-3 * res) ++stagnant;
        else stagnant = 0;
        prev_res = res;
        if (!polish && (res <= 1e-5 || stagnant >= 10)) polish = true;
        if (energy > prev_energy + 1e-14 * std::abs(prev_energy)) {
            if (++bad_streak > 50) {
                rep.termination = Termination::Diverged;
                rep.field = u;
                finalize(rep, params, opts);
                return rep;
            }
            if (it > 10) {
                dt = std::max(dt / 2.0, 1e-4);
                if (polish) step_pol = std::max(step_pol / 2.0, 1e-3);
            }
        } else {
            bad_streak = 0;
        }
        prev_energy = energy;

        Field next(grid);
        if (!polish) {
            // semi-implicit flow step: (I + dt(-Delta)^s)^{-1}(u + dt nl)
            Field rhs(grid);
            for (std::size_t i = 0; i < u.v.size(); ++i)
                rhs.v[i] = u.v[i] + dt * nl.v[i];
            next = resolvent_apply(rhs, s, 1.0 / dt, opts.mode);
            for (auto& x : next.v) x /= dt;
        } else {
            // preconditioned projected-gradient polish
            Field step = resolvent_apply(pg, s, 1.0, opts.mode);
            next = u;
            for (std::size_t i = 0; i < u.v.size(); ++i)
                next.v[i] -= step_pol * step.v[i];
        }
        if (opts.symmetry) next = symmetrize(next, *opts.symmetry);
        double nn = norm2(next);
        if (!(nn > 0.0) || !std::isfinite(nn)) {
            rep.termination = Termination::Diverged;
            rep.field = u;
            finalize(rep, params, opts);
            return rep;
        }
        for (auto& x : next.v) x *= rho / nn;
        u = std::move(next);
        rep.termination = Termination::MaxIter;
    }
    rep.field = u;
    finalize(rep, params, opts);
    return rep;
}

SolveReport solve_petviashvili(const ProblemParams& params, double omega,
                               const Grid& grid, const SolverOptions& opts) {
    if (!(omega > 0.0)) throw OutOfRange("omega");
    ProblemParams pp = params;
    pp.omega = omega;
    require_open_window(pp);

    SolveReport rep;
    rep.lambda = omega;
    Field u = gaussian_init(grid, opts);
    if (norm2(u) == 0.0) throw ZeroField();

    const double s = params.s, p = params.p;
    const double gamma = (2.0 * p - 1.0) / (2.0 * p - 2.0);
    const bool oddswap = opts.symmetry && opts.symmetry->tag == SymmetryTag::OddSwap;

    // Sign-changing classes: the standard iteration is stable at the fixed point
    // but not attracted to it from generic data; run a damped gamma=1 relaxation
    // of the symmetry-projected map first, then rescale onto the Nehari set.
    if (oddswap) {
        const double damp = 0.5;
        int relax = std::min(opts.max_iter, 3000);
        {
            // already near a solution (e.g. re-fed output): skip the relaxation
            Field g0 = first_variation(u, pp, opts.mode);
            if (norm2(g0) / norm2(u) < 1e2 * opts.tol) relax = 0;
        }
        for (int it = 0; it < relax; ++it) {
            Field nl = nonlinear_term(u, params, opts.mode);
            Field lap = fractional_laplacian_apply(u, s, opts.mode);
            double Q = inner(u, lap) + omega * inner(u, u);
            double R = inner(nl, u);
            if (!(R > 0.0) || !std::isfinite(R)) throw Diverged("odd-swap relaxation lost positivity of <nl,u>");
            double Mk = Q / R;
            Field step = resolvent_apply(nl, s, omega, opts.mode);
            if (opts.symmetry) step = symmetrize(step, *opts.symmetry);
            for (std::size_t i = 0; i < u.v.size(); ++i)
                u.v[i] = (1.0 - damp) * u.v[i] + damp * Mk * step.v[i];
        }
        Field nl = nonlinear_term(u, params, opts.mode);
        Field lap = fractional_laplacian_apply(u, s, opts.mode);
        double Q = inner(u, lap) + omega * inner(u, u);
        double P = inner(nl, u);
        double c = std::pow(Q / P, 1.0 / (2.0 * p - 2.0)); // Nehari rescale
        for (auto& x : u.v) x *= c;
    }

    // The fixed point of the resolvent iteration carries a small offset from
    // the exact zero of the discrete first variation (the cropped resolvent is
    // not the exact inverse of the cropped operator in the free-space mode),
    // which shows up as a residual floor. Once the iteration stagnates, switch
    // to a damped preconditioned descent on the first variation itself; its
    // fixed point is an exact discrete solution because the cropped resolvent
    // is positive definite. The analytic Nehari rescale at the top of each
    // polish step removes the single unstable (Morse index one) direction.
    bool polish = false;
    double step_pol = 0.9, prev_res = 1e300, best_res = 1e300;
    int stagnant = 0;

    for (int it = 1; it <= opts.max_iter; ++it) {
        Field nl = nonlinear_term(u, params, opts.mode);
        Field lap = fractional_laplacian_apply(u, s, opts.mode);
        double K = inner(u, lap), M = inner(u, u), P = inner(nl, u);
        double Mk = (K + omega * M) / P;
        if (!std::isfinite(Mk) || Mk <= 1e-12 || Mk >= 1e12)
            throw Diverged("Petviashvili stabilizer left (1e-12, 1e12)");
        if (polish) {
            double c = std::pow(Mk, 1.0 / (2.0 * p - 2.0));
            double cnl = std::pow(c, 2.0 * p - 1.0);
            for (auto& x : u.v) x *= c;
            for (auto& x : lap.v) x *= c;
            for (auto& x : nl.v) x *= cnl;
            K *= c * c;
            M *= c * c;
            P *= cnl * c;
            Mk = 1.0;
        }
        double energy = K / 2.0 + omega * M / 2.0 - P / (2.0 * p);
        Field grad(grid);
        for (std::size_t i = 0; i < u.v.size(); ++i)
            grad.v[i] = lap.v[i] + omega * u.v[i] - nl.v[i];
        double res = norm2(grad) / std::sqrt(M);
        rep.history.push_back({it, energy, res});
        rep.iterations = it;
        if (res <= opts.tol && std::abs(Mk - 1.0) <= opts.tol) {
            rep.termination = Termination::Converged;
            break;
        }
        if (std::abs(res - prev_res) <= 1e-3 * res) ++stagnant;
        else stagnant = 0;
        prev_res = res;
        if (opts.polish && !polish && (stagnant >= 10 || res <= 10.0 * opts.tol))
            polish = true;

        Field next(grid);
        if (!polish) {
            next = resolvent_apply(nl, s, omega, opts.mode);
            double amp = std::pow(Mk, gamma);
            for (auto& x : next.v) x *= amp;
        } else {
            if (res > 1.0001 * best_res) step_pol = std::max(step_pol / 2.0, 1e-3);
            best_res = std::min(best_res, res);
            Field step = resolvent_apply(grad, s, omega, opts.mode);
            next = u;
            for (std::size_t i = 0; i < u.v.size(); ++i)
                next.v[i] -= step_pol * step.v[i];
        }
        // The radial shell average merges lattice orbits the discrete operator
        // distinguishes, so it is not an exact projection and would put a
        // floor under the polish; weaken it there to the per-axis reflection
        // average, which is compatible with the operator and still pins the
        // center against translation drift along the near-zero modes.
        if (opts.symmetry) {
            SymmetrySpec spec = *opts.symmetry;
            if (polish && spec.tag == SymmetryTag::Radial && grid.dim >= 2)
                spec = SymmetrySpec{SymmetryTag::BlockRadial, 1};
            next = symmetrize(next, spec);
        }
        u = std::move(next);
        rep.termination = Termination::MaxIter;
    }
    rep.field = u;
    finalize(rep, pp, opts, /*nehari_rescale=*/true); // functionals with the solved-for omega
    return rep;
}

} // namespace choq
