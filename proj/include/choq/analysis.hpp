#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "choq/functionals.hpp"
#include "choq/grid.hpp"
#include "choq/params.hpp"
#include "choq/spectral.hpp"

namespace choq {

struct MorseData {
    std::vector<double> eigenvalues; // ascending, k lowest of the Hessian
    int negative_count = 0;
    int zero_modes = 0;          // |lambda_i| < zero_tol
    double zero_tol = 0.0;       // 1e-4 * max |eigenvalue| among the k
    double translation_overlap = 0.0; // principal-angle cosine with span{d_i u}
};

struct DecayFit {
    double exponent = 0.0;  // slope of log u vs log r
    double amplitude = 0.0; // exp(intercept)
    double r_min = 0.0, r_max = 0.0;
    double r2 = 0.0; // log-log fit quality
    // shell columns for plotting: r, mean, min, max
    std::vector<std::array<double, 4>> shells;
};

// Relative gaps of the one-dimensional scaling identities (Proposition 4.1
// style calculus facts about (K, M, P)), checked by golden-section search
// against the closed forms:
//   (i)  max_t E_omega(t u)            = (1/2 - 1/(2p)) S(u)^{p/(p-1)}
//   (ii) min_t S(u_t)                  = (2sp/B)(B/A)^{A/(2sp)} W(u)
//   (iii) at p = p_mass: E_0(t^{N/2}u_t) = t^{2s} E_0(u)
//   (iv) mass-supercritical: max_t E_0(t^{N/2}u_t) = b_const (K^A/P^{2s})^{1/(A-2s)}
//        mass-subcritical:   min_t E_0(t^{N/2}u_t) = -a_const (P^{2s}/K^A)^{1/(2s-A)}
// with A = N(p-1)-alpha, B = N+alpha-(N-2s)p.
struct ScalingReport {
    double prop41_i_gap = 0.0;
    double prop41_ii_gap = 0.0;
    double prop41_iii_gap = 0.0;
    double prop41_iv_gap = 0.0;
    double w_invariance_gap = 0.0;
    double rho_energy_gap = 0.0;
    bool has_i = false, has_ii = false, has_iii = false, has_iv = false;
};

struct Certificate {
    FunctionalValues functionals;
    double lambda = 0.0;
    double rho = 0.0;
    std::optional<MorseData> morse;
    std::optional<DecayFit> decay;
    double symmetry_deviation = 0.0; // L2 distance to the recentered radialization
    ScalingReport scaling;
    bool converged = true;
};

struct CertifyOptions {
    ConvolutionMode mode = ConvolutionMode::FreeSpacePadded;
    bool want_morse = false;
    int morse_k = 8;
    std::optional<std::pair<double, double>> decay_window;
    bool converged = true; // carried into the certificate
};

// Scaling identities; items whose regime precondition fails are skipped
// (has_* = false). scaling_item throws RegimeMismatch instead.
ScalingReport scaling_report(const FunctionalValues& values, const ProblemParams& params);
double scaling_item(int item, const FunctionalValues& values, const ProblemParams& params);

Certificate certify(const Field& u, const ProblemParams& params, double lambda,
                    const CertifyOptions& opts = {});

// max of |rho^2 - c_rho * c| / rho^2 and |m + omega rho^2/2 - c| / |c| with
// c_rho = (N+alpha-(N-2s)p)/(omega s (p-1)), c = min Nehari energy
// (cert_nehari), m = min E_0 on the sphere (cert_sigma).
double rho_energy_check(const Certificate& cert_sigma, const Certificate& cert_nehari,
                        const ProblemParams& params);

// k lowest eigenvalues of the second variation by block Lanczos with full
// reorthogonalization; seed block {u, d_1 u, ..., d_N u, noise}.
MorseData morse_spectrum(const Field& u, double lambda, const ProblemParams& params,
                         int k, ConvolutionMode mode = ConvolutionMode::FreeSpacePadded,
                         int max_applies = 110);

// Least-squares slope of log(shell mean of u) vs log r over the window.
DecayFit fit_decay_exponent(const Field& u, std::pair<double, double> window);

// Bubble C (t/(t^2+|x-x0|^2))^{(N-2s)/2} for the zero-mass critical problem,
// alpha = N-4s, p = 2; returns field and the relative resolvent-form residual
// || u - K_{2s} * ((K_alpha*u^2) u)/gamma(2s) ||/||u|| evaluated on an
// internally doubled box. Calibrates C by golden section when absent.
std::pair<Field, double> make_bubble(int dim, double s, double t, double x0,
                                     std::optional<double> C_opt, const Grid& grid);

// Exponent-algebra residual of the omega=0 Pohozaev identity: the identity
// reduces to proportionality of its two sides when (N-2s) p = alpha+N.
double zero_mass_pohozaev_residual(const ProblemParams& params);

// Sharp Gagliardo-Nirenberg constant from a converged ground state:
// C_opt = omega^{B/(2s)} / W^p = P / (K^{beta p} M^{(1-beta)p}).
double estimate_gn_constant(const Certificate& ground, const ProblemParams& params);

struct ObstructionVerdict {
    int sign_c1 = 0, sign_c2 = 0; // signs of N-2s-(alpha+N)/p and N-(alpha+N)/p
    bool nonexistence = false;
};

ObstructionVerdict pohozaev_obstruction(const ProblemParams& params);

} // namespace choq
