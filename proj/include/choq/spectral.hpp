#pragma once

#include <functional>
#include <vector>

#include "choq/grid.hpp"

namespace choq {

enum class ConvolutionMode { PeriodicMultiplier, FreeSpacePadded };

// gamma(alpha) = pi^{N/2} 2^alpha Gamma(alpha/2) / Gamma(N/2 - alpha/2):
// the constant for which |x|^{alpha-N} has Fourier symbol gamma(alpha)|xi|^{-alpha}
// under the convention uhat(xi) = int u e^{-i xi.x} dx.
double gamma_alpha(int dim, double alpha);

// Applies a real radial Fourier multiplier m(|xi|^2): FFT, multiply, inverse
// FFT, take real part. Guards that the discarded imaginary energy stays below
// 1e-10 of the field norm.
Field apply_multiplier(const Field& u, const std::function<double(double)>& m_of_xi2);

// (-Delta)^{s2} via the symbol |xi|^{2*s2}; zero mode maps to 0. s2 in [0,2].
Field fractional_laplacian_apply(const Field& u, double s2);

// ((-Delta)^s + omega)^{-1}. For omega=0 requires mean-free input
// (SingularResolvent otherwise) and returns the mean-free solution.
Field resolvent_apply(const Field& g, double s, double omega);

// Riesz potential K_alpha * g, kernel |x|^{alpha-N}.
// PeriodicMultiplier: symbol gamma(alpha)|xi|^{-alpha}, zero mode set to 0.
// FreeSpacePadded: zero-padded grid (factor 2 in 1D, 3 in higher dimension)
// with the spectrally evaluated transform of the kernel truncated at the
// box diameter; spectrally accurate for fields supported in the box.
Field riesz_convolve(const Field& g, double alpha, ConvolutionMode mode);

// Mode-aware operator variants. PeriodicMultiplier is the plain torus
// multiplier above. FreeSpacePadded evaluates the same symbol on the
// zero-extended padded grid (padding as in riesz_convolve) and crops back:
// for fields supported in the box this approximates the whole-space operator,
// which keeps the discrete Nehari/Pohozaev identities close to their
// continuum form (the torus operator solves a genuinely different problem
// whose identities deviate at O(L^{-(N+2s)})).
Field fractional_laplacian_apply(const Field& u, double s2, ConvolutionMode mode);
Field resolvent_apply(const Field& g, double s, double omega, ConvolutionMode mode);

// Spectral partial derivative along axis (0-based).
Field spectral_derivative(const Field& u, int axis);

// Clears the cached free-space multipliers (mainly for memory-conscious tests).
void clear_riesz_cache();

} // namespace choq
