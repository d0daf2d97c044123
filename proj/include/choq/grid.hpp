#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace choq {

// Uniform periodic grid on the box [-L, L)^N with n points per axis.
// Point j along an axis sits at x_j = -L + h*j, h = 2L/n; the origin is
// index n/2. Frequencies follow the FFT layout xi_k = pi*k/L with
// k in {0,...,n/2-1, -n/2,...,-1}.
struct Grid {
    int dim = 1;
    int n = 0;
    double L = 0.0;

    double h() const { return 2.0 * L / n; }
    std::size_t size() const {
        std::size_t t = 1;
        for (int d = 0; d < dim; ++d) t *= std::size_t(n);
        return t;
    }
    double coord(int j) const { return -L + h() * j; }
    // Signed lattice index in {-n/2,...,n/2-1} (fftfreq layout).
    int signed_index(int j) const { return j < n / 2 ? j : j - n; }
    double freq(int j) const { return M_PI * signed_index(j) / L; }

    bool operator==(const Grid& o) const {
        return dim == o.dim && n == o.n && L == o.L;
    }
};

struct Field {
    Grid grid;
    std::vector<double> v;

    Field() = default;
    explicit Field(const Grid& g) : grid(g), v(g.size(), 0.0) {}
    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
    std::size_t size() const { return v.size(); }
};

// Throws BudgetExceeded when n^dim exceeds element_cap (default 1e8 elements).
Grid make_grid(int dim, int n, double L, std::size_t element_cap = 100000000);

// Decompose a row-major flat index into per-axis indices.
void unravel(std::size_t flat, int dim, int n, int* idx);

// Discrete inner product h^N * sum u_j v_j.
double inner(const Field& a, const Field& b);
double norm2(const Field& a); // sqrt(inner(a,a))

// Plain l2 norm of raw values (no quadrature weight).
double raw_norm(const Field& a);

} // namespace choq
