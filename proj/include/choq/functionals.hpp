#pragma once

#include <optional>

#include "choq/grid.hpp"
#include "choq/params.hpp"
#include "choq/spectral.hpp"

namespace choq {

// Functional bundle for one field:
//   K = ||(-Delta)^{s/2} u||^2, M = ||u||^2, P = int (K_alpha*|u|^p)|u|^p,
//   E_omega = K/2 + omega M/2 - P/(2p), E_0 = K/2 - P/(2p),
//   S = (K + omega M)/P^{1/p},
//   W = K^{A/(2sp)} (omega M)^{B/(2sp)} / P^{1/p},
//     A = N(p-1)-alpha, B = N+alpha-(N-2s)p.
// Residuals are scale-free:
//   nehari_res   = (K + omega M - P)/max(K + omega M, P)
//   pohozaev_res = ((N-2s)K + omega N M - ((alpha+N)/p)P)
//                  / ((N-2s)K + omega N M + ((alpha+N)/p)P).
struct FunctionalValues {
    double K = 0.0, M = 0.0, P = 0.0;
    double e_omega = 0.0, e_zero = 0.0;
    std::optional<double> s_quot, w_quot; // absent iff P = 0 (w also needs omega>0)
    double nehari_res = 0.0, pohozaev_res = 0.0;
};

struct LagrangeMultiplier {
    double lambda = 0.0; // (P - K)/rho^2 at a Sigma_rho critical point
};

// (K_alpha * |u|^p) |u|^{p-2} u; for p < 2 the factor |u|^{p-2}u is the
// continuous extension sign(u)|u|^{p-1} (0 at u = 0).
Field nonlinear_term(const Field& u, const ProblemParams& params,
                     ConvolutionMode mode = ConvolutionMode::FreeSpacePadded);

FunctionalValues functional_suite(const Field& u, const ProblemParams& params,
                                  ConvolutionMode mode = ConvolutionMode::FreeSpacePadded);

// Gradient G(u) = (-Delta)^s u + omega u - nonlinear_term(u).
Field first_variation(const Field& u, const ProblemParams& params,
                      ConvolutionMode mode = ConvolutionMode::FreeSpacePadded);

// H(xi) = (-Delta)^s xi + lambda xi - p (K_alpha*(|u|^{p-2}u xi)) |u|^{p-2}u
//         - (p-1) (K_alpha*|u|^p) |u|^{p-2} xi,
// the second variation E''_lambda(u) as an operator. Throws PNotC2 for p < 2.
Field hessian_apply(const Field& u, double lambda, const Field& xi,
                    const ProblemParams& params,
                    ConvolutionMode mode = ConvolutionMode::FreeSpacePadded);

// Same Hessian with K_alpha*|u|^p precomputed (one convolution per apply).
class HessianOperator {
public:
    HessianOperator(const Field& u, double lambda, const ProblemParams& params,
                    ConvolutionMode mode = ConvolutionMode::FreeSpacePadded);
    Field apply(const Field& xi) const;
    const Field& state() const { return u_; }

private:
    Field u_, upm1_; // |u|^{p-2}u
    Field conv_up_;  // K_alpha * |u|^p
    double lambda_;
    ProblemParams params_;
    ConvolutionMode mode_;
};

} // namespace choq
