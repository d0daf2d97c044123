#include "choq/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "choq/errors.hpp"
#include "choq/symmetry.hpp"

namespace choq {

namespace {

// Golden-section extremum of f over [lo, hi]; maximize when max is true.
double golden(const std::function<double(double)>& f, double lo, double hi, bool max,
              int iters = 200) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters && (b - a) > 1e-14; ++i) {
        bool pick_left = max ? (fc > fd) : (fc < fd);
        if (pick_left) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return f(0.5 * (a + b));
}

struct ScalingCoeffs {
    double A, B, Q; // A = N(p-1)-alpha, B = N+alpha-(N-2s)p, Q = K+omega M
};

ScalingCoeffs coeffs(const FunctionalValues& v, const ProblemParams& pp) {
    double A = pp.dim * (pp.p - 1.0) - pp.alpha;
    double B = pp.dim + pp.alpha - (pp.dim - 2.0 * pp.s) * pp.p;
    return {A, B, v.K + pp.omega * v.M};
}

double rel_gap(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

double scaling_item(int item, const FunctionalValues& v, const ProblemParams& pp) {
    if (!(v.P > 0.0)) throw ZeroField();
    const double N = pp.dim, s = pp.s, p = pp.p, omega = pp.omega;
    const auto [A, B, Q] = coeffs(v, pp);
    const double K = v.K, M = v.M, P = v.P;

    switch (item) {
    case 1: {
        // max_t E_omega(t u) = (1/2 - 1/(2p)) S^{p/(p-1)}
        double tstar = std::pow(Q / P, 1.0 / (2.0 * p - 2.0));
        auto f = [&](double lt) {
            double t = std::exp(lt);
            return 0.5 * std::pow(t, 2.0) * Q - std::pow(t, 2.0 * p) * P / (2.0 * p);
        };
        double num = golden(f, std::log(tstar) - 1.0, std::log(tstar) + 1.0, true);
        double S = Q / std::pow(P, 1.0 / p);
        double rhs = (0.5 - 0.5 / p) * std::pow(S, p / (p - 1.0));
        return rel_gap(num, rhs);
    }
    case 2: {
        // min_t S(u_t) = (2sp/B)(B/A)^{A/(2sp)} W; needs the open window and omega>0
        if (!(A > 0.0 && B > 0.0 && omega > 0.0))
            throw RegimeMismatch("item (ii) needs p strictly inside the window and omega>0");
        auto f = [&](double lt) {
            double t = std::exp(lt);
            double Kt = std::pow(t, 2.0 * s - N) * K;
            double Mt = std::pow(t, -N) * M;
            double Pt = std::pow(t, -(N + pp.alpha)) * P;
            return (Kt + omega * Mt) / std::pow(Pt, 1.0 / p);
        };
        // stationary point of the scaled quotient: t^{2s} = A omega M / (B K)
        double tstar = std::pow(A * omega * M / (B * K), 1.0 / (2.0 * s));
        double num = golden(f, std::log(tstar) - 2.0, std::log(tstar) + 2.0, false);
        double W = std::pow(K, A / (2.0 * s * p)) * std::pow(omega * M, B / (2.0 * s * p)) /
                   std::pow(P, 1.0 / p);
        double rhs = (2.0 * s * p / B) * std::pow(B / A, A / (2.0 * s * p)) * W;
        return rel_gap(num, rhs);
    }
    case 3: {
        // at p = p_mass: E_0(t^{N/2} u_t) = t^{2s} E_0(u)
        if (pp.p != pp.p_mass())
            throw RegimeMismatch("item (iii) needs p = p_mass exactly");
        double e0 = 0.5 * K - P / (2.0 * p);
        double worst = 0.0;
        for (double t : {0.5, 0.8, 1.3, 2.0}) {
            double lhs = 0.5 * std::pow(t, 2.0 * s) * K - std::pow(t, A) * P / (2.0 * p);
            double ref = std::pow(t, 2.0 * s) * e0;
            worst = std::max(worst,
                             std::abs(lhs - ref) / (std::abs(ref) + std::abs(lhs) + 1e-300));
        }
        return worst;
    }
    case 4: {
        if (!(A > 0.0)) throw RegimeMismatch("item (iv) needs p > p_low");
        if (A == 2.0 * s) throw RegimeMismatch("item (iv) undefined at p = p_mass");
        auto f = [&](double lt) {
            double t = std::exp(lt);
            return 0.5 * std::pow(t, 2.0 * s) * K - std::pow(t, A) * P / (2.0 * p);
        };
        double tstar = std::pow(2.0 * s * p * K / (A * P), 1.0 / (A - 2.0 * s));
        if (A > 2.0 * s) {
            // mass-supercritical: max = b (K^A / P^{2s})^{1/(A-2s)}
            double num = golden(f, std::log(tstar) - 1.0, std::log(tstar) + 1.0, true);
            double b = (A - 2.0 * s) / (2.0 * A) *
                       std::pow(2.0 * s * p / A, 2.0 * s / (A - 2.0 * s));
            double rhs = b * std::pow(std::pow(K, A) / std::pow(P, 2.0 * s),
                                      1.0 / (A - 2.0 * s));
            return rel_gap(num, rhs);
        }
        // mass-subcritical: min = -a (P^{2s} / K^A)^{1/(2s-A)}
        double num = golden(f, std::log(tstar) - 1.0, std::log(tstar) + 1.0, false);
        double a = (2.0 * s - A) / (4.0 * s * p) *
                   std::pow(A / (2.0 * s * p), A / (2.0 * s - A));
        double rhs = -a * std::pow(std::pow(P, 2.0 * s) / std::pow(K, A),
                                   1.0 / (2.0 * s - A));
        return rel_gap(num, rhs);
    }
    default:
        throw OutOfRange("scaling item");
    }
}

ScalingReport scaling_report(const FunctionalValues& v, const ProblemParams& pp) {
    ScalingReport rep;
    if (!(v.P > 0.0)) throw ZeroField();
    const auto [A, B, Q] = coeffs(v, pp);
    rep.prop41_i_gap = scaling_item(1, v, pp);
    rep.has_i = true;
    if (A > 0.0 && B > 0.0 && pp.omega > 0.0) {
        rep.prop41_ii_gap = scaling_item(2, v, pp);
        rep.has_ii = true;
    }
    if (pp.p == pp.p_mass()) {
        rep.prop41_iii_gap = scaling_item(3, v, pp);
        rep.has_iii = true;
    }
    if (A > 0.0 && A != 2.0 * pp.s) {
        rep.prop41_iv_gap = scaling_item(4, v, pp);
        rep.has_iv = true;
    }
    // W invariance under amplitude and dilation, by exact transformation of
    // (K, M, P); uses A + B = 2sp.
    if (v.w_quot) {
        auto wq = [&](double K, double M, double P) {
            return std::pow(K, A / (2.0 * pp.s * pp.p)) *
                   std::pow(pp.omega * M, B / (2.0 * pp.s * pp.p)) /
                   std::pow(P, 1.0 / pp.p);
        };
        double w0 = *v.w_quot;
        double c = 1.7, t = 1.3;
        double amp = wq(c * c * v.K, c * c * v.M, std::pow(c, 2.0 * pp.p) * v.P);
        double dil = wq(std::pow(t, 2.0 * pp.s - pp.dim) * v.K,
                        std::pow(t, -double(pp.dim)) * v.M,
                        std::pow(t, -(pp.dim + pp.alpha)) * v.P);
        rep.w_invariance_gap = std::max(rel_gap(amp, w0), rel_gap(dil, w0));
    }
    return rep;
}

Certificate certify(const Field& u, const ProblemParams& params, double lambda,
                    const CertifyOptions& opts) {
    double nrm = norm2(u);
    if (!(nrm > 0.0)) throw ZeroField();
    Certificate cert;
    cert.lambda = lambda;
    cert.rho = nrm;
    cert.converged = opts.converged;
    cert.functionals = functional_suite(u, params, opts.mode);

    Field centered = recenter_max(u);
    Field rad = symmetrize(centered, SymmetrySpec{SymmetryTag::Radial, 0});
    double num = 0.0;
    for (std::size_t i = 0; i < u.v.size(); ++i) {
        double d = centered.v[i] - rad.v[i];
        num += d * d;
    }
    cert.symmetry_deviation = std::sqrt(num * std::pow(u.grid.h(), u.grid.dim)) / nrm;

    if (cert.functionals.P > 0.0) cert.scaling = scaling_report(cert.functionals, params);
    if (opts.want_morse && params.p >= 2.0)
        cert.morse = morse_spectrum(u, lambda, params, opts.morse_k, opts.mode);
    if (opts.decay_window) cert.decay = fit_decay_exponent(centered, *opts.decay_window);
    return cert;
}

double rho_energy_check(const Certificate& cert_sigma, const Certificate& cert_nehari,
                        const ProblemParams& params) {
    if (!cert_sigma.converged || !cert_nehari.converged)
        throw NotConverged("rho_energy_check needs converged certificates");
    const double N = params.dim, s = params.s, p = params.p, omega = params.omega;
    if (!(omega > 0.0)) throw OutOfRange("omega");
    double B = N + params.alpha - (N - 2.0 * s) * p;
    double c_rho = B / (omega * s * (p - 1.0));
    double rho2 = cert_sigma.rho * cert_sigma.rho;
    double c = cert_nehari.functionals.e_omega;
    double m = cert_sigma.functionals.e_zero;
    double gap1 = std::abs(rho2 - c_rho * c) / rho2;
    double gap2 = std::abs(m + omega * rho2 / 2.0 - c) / std::abs(c);
    return std::max(gap1, gap2);
}

MorseData morse_spectrum(const Field& u, double lambda, const ProblemParams& params,
                         int k, ConvolutionMode mode, int max_applies) {
    if (k < 1) throw OutOfRange("k");
    HessianOperator H(u, lambda, params, mode);
    const Grid& g = u.grid;

    std::vector<Field> V; // orthonormal in the h^N inner product
    auto push = [&](Field f) -> bool {
        for (int pass = 0; pass < 2; ++pass)
            for (const Field& b : V) {
                double c = inner(b, f);
                for (std::size_t i = 0; i < f.v.size(); ++i) f.v[i] -= c * b.v[i];
            }
        double nn = norm2(f);
        if (!(nn > 1e-10)) return false;
        for (auto& x : f.v) x /= nn;
        V.push_back(std::move(f));
        return true;
    };

    // seed block: state, translation modes, random vectors for degeneracy
    {
        Field f = u;
        double nn = norm2(f);
        if (nn > 0.0) push(std::move(f));
    }
    for (int d = 0; d < g.dim; ++d) {
        Field der = spectral_derivative(u, d);
        if (norm2(der) > 1e-12 * (1.0 + norm2(u))) push(std::move(der));
    }
    std::mt19937_64 rng(20240);
    std::normal_distribution<double> nd;
    for (int r = 0; r < 4; ++r) {
        Field f(g);
        for (auto& x : f.v) x = nd(rng);
        push(std::move(f));
    }
    if (V.empty()) throw ZeroField();

    const int tcap = max_applies + 16;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(tcap, tcap);
    std::vector<double> prev_ritz;
    int pos = 0;
    bool stable = false;
    while (pos < int(V.size()) && pos < max_applies) {
        Field w = H.apply(V[pos]);
        // T(j,pos) = <V_j, H V_pos> accumulated over two Gram-Schmidt passes;
        // the orthogonal remainder becomes the next basis vector with
        // coefficient beta.
        int nv = int(V.size());
        std::vector<double> cacc(nv, 0.0);
        for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j < nv; ++j) {
                double c = inner(V[j], w);
                cacc[j] += c;
                for (std::size_t i = 0; i < w.v.size(); ++i) w.v[i] -= c * V[j].v[i];
            }
        for (int j = 0; j < nv && j < tcap; ++j) {
            T(j, pos) = cacc[j];
            T(pos, j) = cacc[j];
        }
        double beta = norm2(w);
        if (beta > 1e-10 && nv < tcap) {
            for (auto& x : w.v) x /= beta;
            V.push_back(std::move(w));
            T(nv, pos) = beta;
            T(pos, nv) = beta;
        }
        ++pos;
        if (pos >= k + 2 && pos % 8 == 0) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
                T.topLeftCorner(pos, pos));
            std::vector<double> ritz(es.eigenvalues().data(),
                                     es.eigenvalues().data() + std::min(k, pos));
            if (int(prev_ritz.size()) == k) {
                double worst = 0.0;
                for (int i = 0; i < k; ++i)
                    worst = std::max(worst, std::abs(ritz[i] - prev_ritz[i]) /
                                                (std::abs(ritz[i]) + 1e-12));
                if (worst < 1e-10) {
                    stable = true;
                    break;
                }
            }
            prev_ritz = ritz;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(pos, pos));
    if (!stable && pos >= max_applies && prev_ritz.size() == std::size_t(k)) {
        double worst = 0.0;
        for (int i = 0; i < k; ++i)
            worst = std::max(worst, std::abs(es.eigenvalues()(i) - prev_ritz[i]) /
                                        (std::abs(es.eigenvalues()(i)) + 1e-12));
        if (worst > 1e-5)
            throw EigensolverStall("Ritz values not settled within the apply budget");
    }

    MorseData md;
    int kk = std::min(k, pos);
    for (int i = 0; i < kk; ++i) md.eigenvalues.push_back(es.eigenvalues()(i));
    double maxabs = 0.0;
    for (double e : md.eigenvalues) maxabs = std::max(maxabs, std::abs(e));
    md.zero_tol = 1e-4 * maxabs;
    for (double e : md.eigenvalues) {
        if (e < -md.zero_tol) ++md.negative_count;
        else if (std::abs(e) <= md.zero_tol) ++md.zero_modes;
    }

    // principal-angle overlap between the numerical near-kernel and span{d_i u}
    std::vector<int> kernel_cols;
    for (int i = 0; i < pos; ++i)
        if (std::abs(es.eigenvalues()(i)) <= md.zero_tol) kernel_cols.push_back(i);
    if (!kernel_cols.empty()) {
        std::vector<Field> Z;
        for (int c : kernel_cols) {
            Field z(g);
            for (int j = 0; j < pos; ++j) {
                double w = es.eigenvectors()(j, c);
                for (std::size_t i = 0; i < z.v.size(); ++i) z.v[i] += w * V[j].v[i];
            }
            Z.push_back(std::move(z));
        }
        std::vector<Field> D;
        for (int d = 0; d < g.dim; ++d) {
            Field der = spectral_derivative(u, d);
            for (const Field& b : D) {
                double c = inner(b, der);
                for (std::size_t i = 0; i < der.v.size(); ++i) der.v[i] -= c * b.v[i];
            }
            double nn = norm2(der);
            if (nn > 1e-12) {
                for (auto& x : der.v) x /= nn;
                D.push_back(std::move(der));
            }
        }
        double overlap = 1.0;
        for (const Field& dir : D) {
            double proj2 = 0.0;
            for (const Field& z : Z) {
                double c = inner(dir, z);
                proj2 += c * c;
            }
            overlap = std::min(overlap, std::sqrt(std::min(proj2, 1.0)));
        }
        md.translation_overlap = D.empty() ? 0.0 : overlap;
    }
    return md;
}

DecayFit fit_decay_exponent(const Field& u, std::pair<double, double> window) {
    const Grid& g = u.grid;
    auto [rmin, rmax] = window;
    if (!(rmin > 0.0 && rmin < rmax && rmax <= 0.8 * g.L))
        throw OutOfRange("decay window");

    std::map<long, std::array<double, 3>> shells; // key -> {sum, min, max}
    std::map<long, std::size_t> counts;
    std::vector<int> idx(g.dim);
    for (std::size_t f = 0; f < u.v.size(); ++f) {
        unravel(f, g.dim, g.n, idx.data());
        long key = 0;
        for (int d = 0; d < g.dim; ++d) {
            long c = idx[d] - g.n / 2;
            key += c * c;
        }
        double r = g.h() * std::sqrt(double(key));
        if (r < rmin || r > rmax) continue;
        auto it = shells.find(key);
        if (it == shells.end()) {
            shells[key] = {u.v[f], u.v[f], u.v[f]};
            counts[key] = 1;
        } else {
            it->second[0] += u.v[f];
            it->second[1] = std::min(it->second[1], u.v[f]);
            it->second[2] = std::max(it->second[2], u.v[f]);
            counts[key] += 1;
        }
    }
    if (shells.size() < 4) throw OutOfRange("decay window contains too few shells");

    double umax = 0.0;
    for (double x : u.v) umax = std::max(umax, std::abs(x));
    const double floor = 1e3 * std::numeric_limits<double>::epsilon() * umax;

    DecayFit fit;
    fit.r_min = rmin;
    fit.r_max = rmax;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    std::size_t npts = 0;
    for (const auto& [key, acc] : shells) {
        double r = g.h() * std::sqrt(double(key));
        double mean = acc[0] / double(counts.at(key));
        fit.shells.push_back({r, mean, acc[1], acc[2]});
        if (!(mean > floor))
            throw WindowTooNoisy("shell mean below 1e3*eps of the field maximum");
        double x = std::log(r), y = std::log(mean);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++npts;
    }
    double nn = double(npts);
    double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    double intercept = (sy - slope * sx) / nn;
    fit.exponent = slope;
    fit.amplitude = std::exp(intercept);
    double ss_tot = syy - sy * sy / nn;
    double ss_res = 0.0;
    for (const auto& sh : fit.shells) {
        double pred = intercept + slope * std::log(sh[0]);
        double d = std::log(sh[1]) - pred;
        ss_res += d * d;
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
    return fit;
}

std::pair<Field, double> make_bubble(int dim, double s, double t, double x0,
                                     std::optional<double> C_opt, const Grid& grid) {
    if (!(dim > 4.0 * s))
        throw DimensionTooSmall("bubble requires N > 4s");
    const double alpha = dim - 4.0 * s;
    if (!(alpha > 0.0 && alpha < double(dim))) throw AlphaOutOfRange("N - 4s outside (0, N)");
    const double expo = (dim - 2.0 * s) / 2.0;
    const double gam = gamma_alpha(dim, 2.0 * s);

    auto sample = [&](const Grid& g, double C) {
        Field f(g);
        std::vector<int> idx(g.dim);
        for (std::size_t i = 0; i < f.v.size(); ++i) {
            unravel(i, g.dim, g.n, idx.data());
            double r2 = 0.0;
            for (int d = 0; d < g.dim; ++d) {
                double x = g.coord(idx[d]) - x0;
                r2 += x * x;
            }
            f.v[i] = C * std::pow(t / (t * t + r2), expo);
        }
        return f;
    };

    // evaluate on a doubled box so the fat algebraic tails are represented
    Grid big = make_grid(dim, 2 * grid.n, 2.0 * grid.L);
    auto residual = [&](double C) {
        Field u = sample(big, C);
        Field u2(big);
        for (std::size_t i = 0; i < u.v.size(); ++i) u2.v[i] = u.v[i] * u.v[i];
        Field pot = riesz_convolve(u2, alpha, ConvolutionMode::FreeSpacePadded);
        Field rhs(big);
        for (std::size_t i = 0; i < u.v.size(); ++i) rhs.v[i] = pot.v[i] * u.v[i];
        Field w = riesz_convolve(rhs, 2.0 * s, ConvolutionMode::FreeSpacePadded);
        // resolvent form: u = K_{2s} * ((K_alpha*u^2) u) / gamma(2s),
        // compared on the core box only
        double num = 0.0, den = 0.0;
        std::vector<int> idx(big.dim);
        for (std::size_t i = 0; i < u.v.size(); ++i) {
            unravel(i, big.dim, big.n, idx.data());
            bool core = true;
            for (int d = 0; d < big.dim; ++d)
                if (idx[d] < big.n / 4 || idx[d] >= 3 * big.n / 4) core = false;
            if (!core) continue;
            double diff = u.v[i] - w.v[i] / gam;
            num += diff * diff;
            den += u.v[i] * u.v[i];
        }
        return std::sqrt(num / den);
    };

    double C;
    if (C_opt) {
        C = *C_opt;
    } else {
        const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = -6.0, b = 6.0;
        double c = b - phi * (b - a), d = a + phi * (b - a);
        double fc = residual(std::exp(c)), fd = residual(std::exp(d));
        while (b - a > 1e-10) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = residual(std::exp(c));
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = residual(std::exp(d));
            }
        }
        C = std::exp(0.5 * (a + b));
    }
    return {sample(grid, C), residual(C)};
}

double zero_mass_pohozaev_residual(const ProblemParams& params) {
    double lhs = params.dim - 2.0 * params.s;
    double rhs = (params.alpha + params.dim) / params.p;
    return std::abs(lhs - rhs) / (lhs + rhs);
}

double estimate_gn_constant(const Certificate& ground, const ProblemParams& params) {
    if (!ground.converged) throw NotConverged("GN calibration needs a converged ground state");
    if (!(params.omega > 0.0)) throw OutOfRange("omega");
    if (!ground.functionals.w_quot) throw ZeroField();
    double B = params.dim + params.alpha - (params.dim - 2.0 * params.s) * params.p;
    return std::pow(params.omega, B / (2.0 * params.s)) /
           std::pow(*ground.functionals.w_quot, params.p);
}

ObstructionVerdict pohozaev_obstruction(const ProblemParams& params) {
    if (!(params.omega > 0.0)) throw OutOfRange("omega");
    double c1 = params.dim - 2.0 * params.s - (params.alpha + params.dim) / params.p;
    double c2 = params.dim - (params.alpha + params.dim) / params.p;
    ObstructionVerdict v;
    v.sign_c1 = (c1 > 0.0) - (c1 < 0.0);
    v.sign_c2 = (c2 > 0.0) - (c2 < 0.0);
    v.nonexistence = (c1 >= 0.0 && c2 >= 0.0) || (c1 <= 0.0 && c2 <= 0.0);
    return v;
}

} // namespace choq
