#include "doctest.h"

#include <cmath>
#include <random>

#include "choq/errors.hpp"
#include "choq/grid.hpp"
#include "choq/symmetry.hpp"

using namespace choq;

namespace {

Field random_field(const Grid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Field f(g);
    for (auto& x : f.v) x = nd(rng);
    return f;
}

double dist(const Field& a, const Field& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i)
        acc += (a.v[i] - b.v[i]) * (a.v[i] - b.v[i]);
    return std::sqrt(acc);
}

} // namespace

TEST_CASE("symmetrize is idempotent on many random fields") {
    auto g = make_grid(2, 24, 4);
    SymmetrySpec radial{SymmetryTag::Radial, 0};
    SymmetrySpec odd{SymmetryTag::OddSwap, 1};
    for (unsigned seed = 0; seed < 50; ++seed) {
        Field f = random_field(g, seed);
        Field r1 = symmetrize(f, radial);
        Field r2 = symmetrize(r1, radial);
        CHECK(dist(r1, r2) < 1e-12 * (1.0 + norm2(r1)));
        Field o1 = symmetrize(f, odd);
        Field o2 = symmetrize(o1, odd);
        CHECK(dist(o1, o2) < 1e-12 * (1.0 + norm2(o1)));
    }
}

TEST_CASE("radialization leaves a radial field unchanged") {
    auto g = make_grid(3, 16, 4);
    Field f(g);
    std::vector<int> idx(3);
    for (std::size_t i = 0; i < f.v.size(); ++i) {
        unravel(i, 3, g.n, idx.data());
        long long r2 = 0;
        for (int d = 0; d < 3; ++d) {
            long long c = idx[d] - g.n / 2;
            r2 += c * c;
        }
        f.v[i] = std::exp(-0.1 * double(r2));
    }
    Field r = symmetrize(f, {SymmetryTag::Radial, 0});
    CHECK(dist(f, r) < 1e-13);
}

TEST_CASE("symmetrize is an orthogonal projection (self-adjoint)") {
    auto g = make_grid(2, 16, 3);
    SymmetrySpec spec{SymmetryTag::BlockRadial, 1};
    Field a = random_field(g, 3), b = random_field(g, 4);
    CHECK(inner(symmetrize(a, spec), b) ==
          doctest::Approx(inner(a, symmetrize(b, spec))).epsilon(1e-11));
}

TEST_CASE("odd-swap projection kills swap-even fields") {
    auto g = make_grid(2, 24, 4);
    Field f(g);
    std::vector<int> idx(2);
    for (std::size_t i = 0; i < f.v.size(); ++i) {
        unravel(i, 2, g.n, idx.data());
        double x = g.coord(idx[0]), y = g.coord(idx[1]);
        f.v[i] = std::exp(-(x * x + y * y)); // symmetric under (x,y) -> (y,x)
    }
    Field o = symmetrize(f, {SymmetryTag::OddSwap, 1});
    for (double v : o.v) CHECK(std::abs(v) < 1e-13);
}

TEST_CASE("odd-swap output is swap-antisymmetric") {
    auto g = make_grid(2, 16, 3);
    Field f = random_field(g, 11);
    Field o = symmetrize(f, {SymmetryTag::OddSwap, 1});
    // swap the two axes and compare with the negation
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            CHECK(o.v[std::size_t(i) * g.n + j] ==
                  doctest::Approx(-o.v[std::size_t(j) * g.n + i])
                      .epsilon(1e-12)
                      .scale(1.0));
}

TEST_CASE("incompatible specs are rejected") {
    auto g2 = make_grid(2, 16, 3);
    Field f = random_field(g2, 1);
    CHECK_THROWS_AS(symmetrize(f, {SymmetryTag::BlockRadial, 2}), IncompatibleSpec);
    CHECK_THROWS_AS(symmetrize(f, {SymmetryTag::OddSwap, 2}), IncompatibleSpec);
    CHECK_THROWS_AS(symmetrize(f, {SymmetryTag::BlockRadial, 0}), IncompatibleSpec);
}

TEST_CASE("low_dim_demo flag follows the guaranteed window") {
    SymmetrySpec s1{SymmetryTag::OddSwap, 1};
    CHECK(s1.low_dim_demo(2));     // N=2, m=1: demonstration only
    SymmetrySpec s2{SymmetryTag::OddSwap, 2};
    CHECK(!s2.low_dim_demo(4));    // N=4, m=2: guaranteed
    CHECK(s2.low_dim_demo(5));     // N=5, m=2: 2m = N-1 excluded
    CHECK(!s2.low_dim_demo(6));    // N=6, m=2: guaranteed
    SymmetrySpec r{SymmetryTag::Radial, 0};
    CHECK(!r.low_dim_demo(2));
}

TEST_CASE("recenter_max moves the peak to the origin index") {
    auto g = make_grid(1, 64, 8);
    Field f(g);
    for (int j = 0; j < g.n; ++j) {
        double x = g.coord(j) - 2.5; // off-center bump
        f.v[j] = std::exp(-x * x);
    }
    Field r = recenter_max(f);
    std::size_t arg = 0;
    for (std::size_t i = 0; i < r.v.size(); ++i)
        if (std::abs(r.v[i]) > std::abs(r.v[arg])) arg = i;
    CHECK(arg == std::size_t(g.n / 2));
    // recentering is a circular shift: multiset of values preserved
    double s0 = 0.0, s1 = 0.0;
    for (int j = 0; j < g.n; ++j) {
        s0 += f.v[j];
        s1 += r.v[j];
    }
    CHECK(s0 == doctest::Approx(s1).epsilon(1e-13));
}
