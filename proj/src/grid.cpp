#include "choq/grid.hpp"

#include <cmath>
#include <string>

#include "choq/errors.hpp"

namespace choq {

Grid make_grid(int dim, int n, double L, std::size_t element_cap) {
    if (dim < 1) throw OutOfRange("dim");
    if (n < 8 || n % 2 != 0) throw OutOfRange("n");
    if (!(L > 0.0)) throw OutOfRange("L");
    double total = std::pow(double(n), double(dim));
    if (total > double(element_cap))
        throw BudgetExceeded("grid of " + std::to_string(std::size_t(total)) +
                             " elements exceeds cap of " + std::to_string(element_cap));
    return Grid{dim, n, L};
}

void unravel(std::size_t flat, int dim, int n, int* idx) {
    for (int d = dim - 1; d >= 0; --d) {
        idx[d] = int(flat % std::size_t(n));
        flat /= std::size_t(n);
    }
}

double inner(const Field& a, const Field& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) s += a.v[i] * b.v[i];
    return s * std::pow(a.grid.h(), a.grid.dim);
}

double norm2(const Field& a) { return std::sqrt(inner(a, a)); }

double raw_norm(const Field& a) {
    double s = 0.0;
    for (double x : a.v) s += x * x;
    return std::sqrt(s);
}

} // namespace choq
