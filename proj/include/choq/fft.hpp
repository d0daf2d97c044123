#pragma once

#include <complex>
#include <vector>

namespace choq {

using cplx = std::complex<double>;

// Thin wrapper over FFTW c2c transforms with a process-wide plan cache.
// Plans are created once per (dims, sign) with FFTW_ESTIMATE|FFTW_UNALIGNED
// so they can execute on any buffer; execution itself is thread-safe.
// forward: no scaling; inverse: scales by 1/prod(dims) so that
// inverse(forward(x)) == x.
void fft_forward(std::vector<cplx>& data, const std::vector<int>& dims);
void fft_inverse(std::vector<cplx>& data, const std::vector<int>& dims);

// Real transforms (hermitian-reduced last axis of size dims.back()/2 + 1).
// fft_c2r scales by 1/prod(dims) and destroys its input spectrum.
std::vector<cplx> fft_r2c(const std::vector<double>& data, const std::vector<int>& dims);
std::vector<double> fft_c2r(std::vector<cplx>& spec, const std::vector<int>& dims);

} // namespace choq
