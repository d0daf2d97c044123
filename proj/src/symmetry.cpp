#include "choq/symmetry.hpp"

#include <array>
#include <map>
#include <vector>

#include "choq/errors.hpp"

namespace choq {

namespace {

// Spatial shell coordinate: x_j = h*(j - n/2), so c = j - n/2 is the integer
// lattice coordinate and reflections/permutations preserve sum-of-squares keys.
inline long lattice_sq(const int* idx, int n, int from, int to) {
    long acc = 0;
    for (int d = from; d < to; ++d) {
        long c = idx[d] - n / 2;
        acc += c * c;
    }
    return acc;
}

// Average u over level sets of the key (r1^2, r2^2, r3^2) for the coordinate
// blocks [0,m), [m,2m), [2m,dim).
Field block_shell_average(const Field& u, int m1, int m2) {
    const Grid& g = u.grid;
    std::map<std::array<long, 3>, std::pair<double, std::size_t>> shells;
    std::vector<int> idx(g.dim);
    std::vector<std::array<long, 3>> keys(u.v.size());
    for (std::size_t f = 0; f < u.v.size(); ++f) {
        unravel(f, g.dim, g.n, idx.data());
        std::array<long, 3> key{lattice_sq(idx.data(), g.n, 0, m1),
                                lattice_sq(idx.data(), g.n, m1, m1 + m2),
                                lattice_sq(idx.data(), g.n, m1 + m2, g.dim)};
        keys[f] = key;
        auto& slot = shells[key];
        slot.first += u.v[f];
        slot.second += 1;
    }
    Field out(g);
    for (std::size_t f = 0; f < u.v.size(); ++f) {
        const auto& slot = shells[keys[f]];
        out.v[f] = slot.first / double(slot.second);
    }
    return out;
}

// Swap the first two m-sized coordinate blocks.
std::size_t swap_blocks(std::size_t f, int dim, int n, int m) {
    std::vector<int> idx(dim);
    unravel(f, dim, n, idx.data());
    for (int d = 0; d < m; ++d) std::swap(idx[d], idx[d + m]);
    std::size_t out = 0;
    for (int d = 0; d < dim; ++d) out = out * std::size_t(n) + std::size_t(idx[d]);
    return out;
}

} // namespace

Field symmetrize(const Field& u, const SymmetrySpec& spec) {
    const Grid& g = u.grid;
    switch (spec.tag) {
    case SymmetryTag::Radial:
        return block_shell_average(u, g.dim, 0);
    case SymmetryTag::BlockRadial: {
        if (!(spec.m >= 1 && 2 * spec.m <= g.dim))
            throw IncompatibleSpec("BlockRadial block size does not fit the dimension");
        return block_shell_average(u, spec.m, spec.m);
    }
    case SymmetryTag::OddSwap: {
        if (!(spec.m >= 1 && 2 * spec.m <= g.dim))
            throw IncompatibleSpec("OddSwap block size does not fit the dimension");
        Field v = block_shell_average(u, spec.m, spec.m);
        Field out(g);
        for (std::size_t f = 0; f < v.v.size(); ++f)
            out.v[f] = 0.5 * (v.v[f] - v.v[swap_blocks(f, g.dim, g.n, spec.m)]);
        return out;
    }
    }
    throw IncompatibleSpec("unknown symmetry tag");
}

Field recenter_max(const Field& u) {
    const Grid& g = u.grid;
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t f = 0; f < u.v.size(); ++f)
        if (std::abs(u.v[f]) > best) {
            best = std::abs(u.v[f]);
            arg = f;
        }
    std::vector<int> shift(g.dim);
    unravel(arg, g.dim, g.n, shift.data());
    bool trivial = true;
    for (int d = 0; d < g.dim; ++d)
        if (shift[d] != g.n / 2) trivial = false;
    if (trivial) return u;
    Field out(g);
    std::vector<int> idx(g.dim);
    for (std::size_t f = 0; f < u.v.size(); ++f) {
        unravel(f, g.dim, g.n, idx.data());
        std::size_t src = 0;
        for (int d = 0; d < g.dim; ++d) {
            int j = (idx[d] + shift[d] - g.n / 2 + g.n) % g.n;
            src = src * std::size_t(g.n) + std::size_t(j);
        }
        out.v[f] = u.v[src];
    }
    return out;
}

} // namespace choq
