#include "choq/spectral.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "choq/errors.hpp"
#include "choq/fft.hpp"

namespace choq {

namespace {

// 16-point Gauss-Legendre rule on [-1,1], computed once by Newton iteration.
struct GaussLegendre16 {
    double x[16], w[16];
    GaussLegendre16() {
        const int n = 16;
        for (int i = 0; i < n / 2; ++i) {
            double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = t;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = n * (t * p1 - p0) / (t * t - 1.0);
                double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-16) break;
            }
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1.0);
            x[i] = -t;
            x[n - 1 - i] = t;
            w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
    }
};
const GaussLegendre16 GL;

// phi_nu(z) = J_nu(z)/z^nu, the radial Fourier profile; nu = N/2 - 1.
double phi_nu(double nu, double z) {
    if (std::abs(nu + 0.5) < 1e-12) return std::sqrt(2.0 / M_PI) * std::cos(z);
    if (std::abs(nu - 0.5) < 1e-12) {
        if (z < 1e-12) return std::sqrt(2.0 / M_PI);
        return std::sqrt(2.0 / M_PI) * std::sin(z) / z;
    }
    if (z < 1e-6) return 1.0 / (std::pow(2.0, nu) * std::tgamma(nu + 1.0));
    return std::cyl_bessel_j(nu, z) / std::pow(z, nu);
}

// Tabulated transform of the radially truncated Riesz kernel:
//   khat(xi) = (2 pi)^{N/2} xi^{-alpha} F(xi R),
//   F(z) = int_0^z t^{alpha-1} phi_nu(t) dt,
// with F at breakpoints z_k = k*pi/4 precomputed (power series on the first
// segment, Gauss-Legendre panels after), so each evaluation costs one panel.
class KernelTransform {
public:
    KernelTransform(int N, double alpha, double zmax)
        : N_(N), alpha_(alpha), nu_(N / 2.0 - 1.0), dz_(M_PI / 4.0) {
        int nseg = int(std::ceil(zmax / dz_)) + 2;
        F_.resize(nseg + 1);
        F_[0] = 0.0;
        F_[1] = series(dz_);
        for (int k = 1; k < nseg; ++k)
            F_[k + 1] = F_[k] + panel(k * dz_, (k + 1) * dz_);
    }

    double value(double z) const {
        if (z < dz_) return series(z);
        int k = int(z / dz_);
        if (k > int(F_.size()) - 2) k = int(F_.size()) - 2;
        return F_[k] + panel(k * dz_, z);
    }

    double khat(double xi, double R) const {
        if (xi == 0.0)
            return 2.0 * std::pow(M_PI, N_ / 2.0) / std::tgamma(N_ / 2.0) *
                   std::pow(R, alpha_) / alpha_;
        return std::pow(2.0 * M_PI, N_ / 2.0) * std::pow(xi, -alpha_) * value(xi * R);
    }

private:
    double series(double z) const {
        double acc = 0.0;
        for (int m = 0; m < 80; ++m) {
            double c = ((m % 2) ? -1.0 : 1.0) * std::pow(z, alpha_ + 2.0 * m) /
                       ((alpha_ + 2.0 * m) * std::pow(2.0, 2.0 * m + nu_) *
                        std::tgamma(m + 1.0) * std::tgamma(m + nu_ + 1.0));
            acc += c;
            if (std::abs(c) < 1e-18 * std::abs(acc)) break;
        }
        return acc;
    }

    double panel(double a, double b) const {
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double acc = 0.0;
        for (int i = 0; i < 16; ++i) {
            double t = mid + half * GL.x[i];
            acc += half * GL.w[i] * std::pow(t, alpha_ - 1.0) * phi_nu(nu_, t);
        }
        return acc;
    }

    int N_;
    double alpha_, nu_, dz_;
    std::vector<double> F_;
};

struct FreeKey {
    int dim, n, pad;
    double L, alpha;
    bool operator<(const FreeKey& o) const {
        if (dim != o.dim) return dim < o.dim;
        if (n != o.n) return n < o.n;
        if (pad != o.pad) return pad < o.pad;
        if (L != o.L) return L < o.L;
        return alpha < o.alpha;
    }
};

std::mutex riesz_mutex;
std::map<FreeKey, std::shared_ptr<std::vector<double>>> riesz_cache;

// Hermitian-reduced integer shell |k|^2 for index f in an m^{d-1} x (m/2+1)
// spectral layout.
long long reduced_k2(std::size_t f, int dim, int m) {
    const int last = m / 2 + 1;
    long long k2 = 0;
    long long kk = (long long)(f % std::size_t(last)); // last axis: 0..m/2
    k2 += kk * kk;
    std::size_t rem = f / std::size_t(last);
    for (int d = dim - 2; d >= 0; --d) {
        int j = int(rem % std::size_t(m));
        rem /= std::size_t(m);
        kk = j < m / 2 ? j : j - m;
        k2 += kk * kk;
    }
    return k2;
}

std::size_t reduced_total(int dim, int m) {
    std::size_t t = std::size_t(m / 2 + 1);
    for (int d = 0; d < dim - 1; ++d) t *= std::size_t(m);
    return t;
}

std::shared_ptr<std::vector<double>> free_space_multiplier(const Grid& g, double alpha,
                                                           int pad) {
    FreeKey key{g.dim, g.n, pad, g.L, alpha};
    {
        std::lock_guard<std::mutex> lock(riesz_mutex);
        auto it = riesz_cache.find(key);
        if (it != riesz_cache.end()) return it->second;
    }
    const int m = pad * g.n;
    const double Lp = pad * g.L;
    // Kernel truncated at R = (pad-1)*2L: wrapped differences on the padded
    // torus have norm >= (pad-1)*2L, so the circular convolution is alias-free;
    // genuine pair distances beyond R (only box corners when pad=2) are
    // dropped, which is negligible for decaying fields.
    const double R = (pad - 1) * 2.0 * g.L;
    const double dxi = M_PI / Lp;
    double xi_max = dxi * (m / 2) * std::sqrt(double(g.dim));
    KernelTransform kt(g.dim, alpha, xi_max * R * 1.01);

    auto mult = std::make_shared<std::vector<double>>(reduced_total(g.dim, m));

    // Frequencies lie on the lattice dxi * k, so |xi|^2 = dxi^2 * (integer);
    // dedupe khat evaluations by that integer shell.
    std::unordered_map<long long, double> shell;
    for (std::size_t f = 0; f < mult->size(); ++f) {
        long long k2 = reduced_k2(f, g.dim, m);
        auto it = shell.find(k2);
        double val;
        if (it == shell.end()) {
            val = kt.khat(dxi * std::sqrt(double(k2)), R);
            shell.emplace(k2, val);
        } else {
            val = it->second;
        }
        (*mult)[f] = val;
    }
    std::lock_guard<std::mutex> lock(riesz_mutex);
    riesz_cache[key] = mult;
    return mult;
}

std::vector<int> grid_dims(const Grid& g, int factor = 1) {
    return std::vector<int>(std::size_t(g.dim), g.n * factor);
}

// Zero-extend the n^N box to the low corner of an m^N real array.
std::vector<double> embed_padded(const Field& u, int m) {
    const Grid& g = u.grid;
    std::size_t total = 1;
    for (int d = 0; d < g.dim; ++d) total *= std::size_t(m);
    std::vector<double> big(total, 0.0);
    std::vector<int> idx(g.dim);
    for (std::size_t f = 0; f < u.v.size(); ++f) {
        unravel(f, g.dim, g.n, idx.data());
        std::size_t pf = 0;
        for (int d = 0; d < g.dim; ++d) pf = pf * std::size_t(m) + std::size_t(idx[d]);
        big[pf] = u.v[f];
    }
    return big;
}

Field crop_padded(const std::vector<double>& big, const Grid& g, int m) {
    Field out(g);
    std::vector<int> idx(g.dim);
    for (std::size_t f = 0; f < out.v.size(); ++f) {
        unravel(f, g.dim, g.n, idx.data());
        std::size_t pf = 0;
        for (int d = 0; d < g.dim; ++d) pf = pf * std::size_t(m) + std::size_t(idx[d]);
        out.v[f] = big[pf];
    }
    return out;
}

// Apply a radial multiplier on the pad^N-times-extended grid: embed the box
// at the low corner with zero extension, transform (r2c), multiply m(|xi|^2)
// on the padded frequency lattice (spacing pi/(pad*L)), transform back, crop.
Field padded_multiplier_apply(const Field& u,
                              const std::function<double(double)>& m_of_xi2,
                              int pad) {
    const Grid& g = u.grid;
    const int m = pad * g.n;
    const double dxi = M_PI / (pad * g.L);
    std::vector<double> big = embed_padded(u, m);
    std::vector<int> dims(std::size_t(g.dim), m);
    std::vector<cplx> spec = fft_r2c(big, dims);
    for (std::size_t f = 0; f < spec.size(); ++f)
        spec[f] *= m_of_xi2(dxi * dxi * double(reduced_k2(f, g.dim, m)));
    big = fft_c2r(spec, dims);
    return crop_padded(big, g, m);
}

int pad_factor(int) { return 2; }

} // namespace

double gamma_alpha(int dim, double alpha) {
    return std::pow(M_PI, dim / 2.0) * std::pow(2.0, alpha) * std::tgamma(alpha / 2.0) /
           std::tgamma(dim / 2.0 - alpha / 2.0);
}

Field apply_multiplier(const Field& u, const std::function<double(double)>& m_of_xi2) {
    const Grid& g = u.grid;
    auto dims = grid_dims(g);
    const double dxi = M_PI / g.L;
    std::vector<cplx> spec = fft_r2c(u.v, dims);
    for (std::size_t f = 0; f < spec.size(); ++f)
        spec[f] *= m_of_xi2(dxi * dxi * double(reduced_k2(f, g.dim, g.n)));
    Field res(g);
    res.v = fft_c2r(spec, dims);
    return res;
}

Field fractional_laplacian_apply(const Field& u, double s2) {
    if (!(s2 >= 0.0 && s2 <= 2.0)) throw OutOfRange("s2");
    return apply_multiplier(
        u, [s2](double xi2) { return xi2 == 0.0 ? 0.0 : std::pow(xi2, s2); });
}

Field resolvent_apply(const Field& g, double s, double omega) {
    if (omega == 0.0) {
        double mean = 0.0, rms = 0.0;
        for (double x : g.v) {
            mean += x;
            rms += x * x;
        }
        mean /= double(g.v.size());
        rms = std::sqrt(rms / double(g.v.size()));
        if (std::abs(mean) > 1e-12 * (rms + 1e-300)) throw SingularResolvent();
    }
    return apply_multiplier(g, [s, omega](double xi2) {
        if (xi2 == 0.0 && omega == 0.0) return 0.0;
        return 1.0 / (std::pow(xi2, s) + omega);
    });
}

Field fractional_laplacian_apply(const Field& u, double s2, ConvolutionMode mode) {
    if (mode == ConvolutionMode::PeriodicMultiplier)
        return fractional_laplacian_apply(u, s2);
    if (!(s2 >= 0.0 && s2 <= 2.0)) throw OutOfRange("s2");
    return padded_multiplier_apply(
        u, [s2](double xi2) { return xi2 == 0.0 ? 0.0 : std::pow(xi2, s2); },
        pad_factor(u.grid.dim));
}

Field resolvent_apply(const Field& g, double s, double omega, ConvolutionMode mode) {
    if (mode == ConvolutionMode::PeriodicMultiplier)
        return resolvent_apply(g, s, omega);
    if (omega <= 0.0)
        throw SingularResolvent(); // padded mode has no mean-free escape hatch
    return padded_multiplier_apply(
        g, [s, omega](double xi2) { return 1.0 / (std::pow(xi2, s) + omega); },
        pad_factor(g.grid.dim));
}

Field riesz_convolve(const Field& gf, double alpha, ConvolutionMode mode) {
    const Grid& g = gf.grid;
    if (!(alpha > 0.0 && alpha < double(g.dim)))
        throw AlphaOutOfRange("riesz_convolve requires 0 < alpha < N");

    if (mode == ConvolutionMode::PeriodicMultiplier) {
        const double gam = gamma_alpha(g.dim, alpha);
        return apply_multiplier(gf, [gam, alpha](double xi2) {
            return xi2 == 0.0 ? 0.0 : gam * std::pow(xi2, -alpha / 2.0);
        });
    }

    const int pad = pad_factor(g.dim);
    auto mult = free_space_multiplier(g, alpha, pad);
    const int m = pad * g.n;
    std::vector<double> big = embed_padded(gf, m);
    std::vector<int> dims(std::size_t(g.dim), m);
    std::vector<cplx> spec = fft_r2c(big, dims);
    for (std::size_t f = 0; f < spec.size(); ++f) spec[f] *= (*mult)[f];
    big = fft_c2r(spec, dims);
    return crop_padded(big, g, m);
}

Field spectral_derivative(const Field& u, int axis) {
    const Grid& g = u.grid;
    if (axis < 0 || axis >= g.dim)
        throw OutOfRange("axis");
    std::vector<cplx> spec(u.v.begin(), u.v.end());
    auto dims = grid_dims(g);
    fft_forward(spec, dims);
    // stride of `axis` in row-major layout
    std::size_t stride = 1;
    for (int d = g.dim - 1; d > axis; --d) stride *= std::size_t(g.n);
    const std::size_t total = spec.size();
    for (std::size_t f = 0; f < total; ++f) {
        int j = int((f / stride) % std::size_t(g.n));
        double xi = (2 * j == g.n) ? 0.0 : g.freq(j); // drop the odd Nyquist mode
        spec[f] *= cplx(0.0, xi);
    }
    fft_inverse(spec, dims);
    Field res(g);
    for (std::size_t i = 0; i < total; ++i) res.v[i] = spec[i].real();
    return res;
}

void clear_riesz_cache() {
    std::lock_guard<std::mutex> lock(riesz_mutex);
    riesz_cache.clear();
}

} // namespace choq
