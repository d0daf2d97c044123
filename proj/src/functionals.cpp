#include "choq/functionals.hpp"

#include <cmath>

#include "choq/errors.hpp"

namespace choq {

namespace {

// |u|^{p-1} sign(u), the continuous extension of |u|^{p-2}u.
Field signed_power(const Field& u, double q) {
    Field out(u.grid);
    for (std::size_t i = 0; i < u.v.size(); ++i) {
        double a = std::abs(u.v[i]);
        out.v[i] = a == 0.0 ? 0.0 : std::copysign(std::pow(a, q), u.v[i]);
    }
    return out;
}

Field abs_power(const Field& u, double q) {
    Field out(u.grid);
    for (std::size_t i = 0; i < u.v.size(); ++i)
        out.v[i] = std::pow(std::abs(u.v[i]), q);
    return out;
}

} // namespace

Field nonlinear_term(const Field& u, const ProblemParams& params, ConvolutionMode mode) {
    if (!(params.p > 1.0)) throw OutOfRange("p");
    Field conv = riesz_convolve(abs_power(u, params.p), params.alpha, mode);
    Field upm1 = signed_power(u, params.p - 1.0);
    Field out(u.grid);
    for (std::size_t i = 0; i < u.v.size(); ++i) out.v[i] = conv.v[i] * upm1.v[i];
    return out;
}

FunctionalValues functional_suite(const Field& u, const ProblemParams& params,
                                  ConvolutionMode mode) {
    const int N = params.dim;
    const double s = params.s, alpha = params.alpha, p = params.p,
                 omega = params.omega;
    FunctionalValues fv;
    Field lap = fractional_laplacian_apply(u, s, mode);
    fv.K = inner(u, lap);
    fv.M = inner(u, u);
    Field conv = riesz_convolve(abs_power(u, p), alpha, mode);
    Field up = abs_power(u, p);
    fv.P = inner(conv, up);
    fv.e_omega = fv.K / 2.0 + omega * fv.M / 2.0 - fv.P / (2.0 * p);
    fv.e_zero = fv.K / 2.0 - fv.P / (2.0 * p);
    double neh_num = fv.K + omega * fv.M - fv.P;
    double neh_den = std::max(fv.K + omega * fv.M, fv.P);
    fv.nehari_res = neh_den == 0.0 ? 0.0 : neh_num / neh_den;
    double a_lhs = (N - 2.0 * s) * fv.K + omega * N * fv.M;
    double a_rhs = (alpha + N) / p * fv.P;
    double poh_den = a_lhs + a_rhs;
    fv.pohozaev_res = poh_den == 0.0 ? 0.0 : (a_lhs - a_rhs) / poh_den;
    if (fv.P > 0.0) {
        fv.s_quot = (fv.K + omega * fv.M) / std::pow(fv.P, 1.0 / p);
        if (omega > 0.0) {
            double A = N * (p - 1.0) - alpha;
            double B = N + alpha - (N - 2.0 * s) * p;
            fv.w_quot = std::pow(fv.K, A / (2.0 * s * p)) *
                        std::pow(omega * fv.M, B / (2.0 * s * p)) /
                        std::pow(fv.P, 1.0 / p);
        }
    }
    return fv;
}

Field first_variation(const Field& u, const ProblemParams& params,
                      ConvolutionMode mode) {
    Field out = fractional_laplacian_apply(u, params.s, mode);
    Field nl = nonlinear_term(u, params, mode);
    for (std::size_t i = 0; i < u.v.size(); ++i)
        out.v[i] += params.omega * u.v[i] - nl.v[i];
    return out;
}

Field hessian_apply(const Field& u, double lambda, const Field& xi,
                    const ProblemParams& params, ConvolutionMode mode) {
    return HessianOperator(u, lambda, params, mode).apply(xi);
}

HessianOperator::HessianOperator(const Field& u, double lambda,
                                 const ProblemParams& params, ConvolutionMode mode)
    : u_(u), lambda_(lambda), params_(params), mode_(mode) {
    if (params.p < 2.0) throw PNotC2();
    upm1_ = signed_power(u, params.p - 1.0);
    conv_up_ = riesz_convolve(abs_power(u, params.p), params.alpha, mode);
}

Field HessianOperator::apply(const Field& xi) const {
    const double p = params_.p;
    Field out = fractional_laplacian_apply(xi, params_.s, mode_);
    Field mixed(u_.grid);
    for (std::size_t i = 0; i < xi.v.size(); ++i) mixed.v[i] = upm1_.v[i] * xi.v[i];
    Field conv_mixed = riesz_convolve(mixed, params_.alpha, mode_);
    Field upm2(u_.grid); // |u|^{p-2}
    for (std::size_t i = 0; i < u_.v.size(); ++i) {
        double a = std::abs(u_.v[i]);
        upm2.v[i] = p == 2.0 ? 1.0 : (a == 0.0 ? 0.0 : std::pow(a, p - 2.0));
    }
    for (std::size_t i = 0; i < xi.v.size(); ++i)
        out.v[i] += lambda_ * xi.v[i] - p * conv_mixed.v[i] * upm1_.v[i] -
                    (p - 1.0) * conv_up_.v[i] * upm2.v[i] * xi.v[i];
    return out;
}

} // namespace choq
