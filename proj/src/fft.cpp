#include "choq/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace choq {

namespace {

struct PlanKey {
    std::vector<int> dims;
    int kind; // FFTW_FORWARD / FFTW_BACKWARD / 2 = r2c / 3 = c2r
    bool operator<(const PlanKey& o) const {
        if (dims != o.dims) return dims < o.dims;
        return kind < o.kind;
    }
};

std::mutex plan_mutex;
std::map<PlanKey, fftw_plan> plans;

std::size_t real_total(const std::vector<int>& dims) {
    std::size_t t = 1;
    for (int d : dims) t *= std::size_t(d);
    return t;
}

std::size_t spec_total(const std::vector<int>& dims) {
    std::size_t t = 1;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) t *= std::size_t(dims[i]);
    return t * std::size_t(dims.back() / 2 + 1);
}

// Plans are created once per (dims, kind) with FFTW_MEASURE on scratch
// buffers, FFTW_UNALIGNED so they can execute on any caller buffer.
fftw_plan get_plan(const std::vector<int>& dims, int kind) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    PlanKey key{dims, kind};
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;

    fftw_plan p = nullptr;
    const unsigned flags = FFTW_MEASURE | FFTW_UNALIGNED;
    if (kind == FFTW_FORWARD || kind == FFTW_BACKWARD) {
        auto* buf = fftw_alloc_complex(real_total(dims));
        p = fftw_plan_dft(int(dims.size()), dims.data(), buf, buf, kind, flags);
        fftw_free(buf);
    } else if (kind == 2) {
        auto* rin = fftw_alloc_real(real_total(dims));
        auto* cout = fftw_alloc_complex(spec_total(dims));
        p = fftw_plan_dft_r2c(int(dims.size()), dims.data(), rin, cout, flags);
        fftw_free(cout);
        fftw_free(rin);
    } else {
        auto* cin = fftw_alloc_complex(spec_total(dims));
        auto* rout = fftw_alloc_real(real_total(dims));
        p = fftw_plan_dft_c2r(int(dims.size()), dims.data(), cin, rout, flags);
        fftw_free(rout);
        fftw_free(cin);
    }
    if (!p) throw std::runtime_error("fftw plan creation failed");
    plans.emplace(key, p);
    return p;
}

} // namespace

void fft_forward(std::vector<cplx>& data, const std::vector<int>& dims) {
    if (data.size() != real_total(dims)) throw std::runtime_error("fft: size mismatch");
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(get_plan(dims, FFTW_FORWARD), buf, buf);
}

void fft_inverse(std::vector<cplx>& data, const std::vector<int>& dims) {
    if (data.size() != real_total(dims)) throw std::runtime_error("fft: size mismatch");
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(get_plan(dims, FFTW_BACKWARD), buf, buf);
    double scale = 1.0 / double(real_total(dims));
    for (auto& z : data) z *= scale;
}

std::vector<cplx> fft_r2c(const std::vector<double>& data, const std::vector<int>& dims) {
    if (data.size() != real_total(dims)) throw std::runtime_error("fft: size mismatch");
    std::vector<cplx> spec(spec_total(dims));
    fftw_execute_dft_r2c(get_plan(dims, 2),
                         const_cast<double*>(data.data()),
                         reinterpret_cast<fftw_complex*>(spec.data()));
    return spec;
}

std::vector<double> fft_c2r(std::vector<cplx>& spec, const std::vector<int>& dims) {
    if (spec.size() != spec_total(dims)) throw std::runtime_error("fft: size mismatch");
    std::vector<double> out(real_total(dims));
    fftw_execute_dft_c2r(get_plan(dims, 3),
                         reinterpret_cast<fftw_complex*>(spec.data()), out.data());
    double scale = 1.0 / double(real_total(dims));
    for (auto& x : out) x *= scale;
    return out;
}

} // namespace choq
