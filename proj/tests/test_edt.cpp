#include <doctest.h>

#include <cmath>

#include "panceval/edt.hpp"
#include "panceval/rng.hpp"
#include "oracles.hpp"

using namespace panceval;

TEST_CASE("single seed on an isotropic line gives |i - s| * spacing") {
    GridSpec g{{7, 1, 1}, {2.0, 1.0, 1.0}, {0, 0, 0}};
    BinaryMask m(g);
    m.set(m.index(3, 0, 0));
    const std::vector<double> d = edt(m);
    for (std::size_t i = 0; i < 7; ++i)
        CHECK(d[i] == doctest::Approx(2.0 * std::abs(static_cast<double>(i) - 3.0)));
}

TEST_CASE("single seed in 3D anisotropic volume matches the closed form") {
    GridSpec g{{5, 4, 3}, {1.0, 2.0, 3.0}, {0, 0, 0}};
    BinaryMask m(g);
    m.set(m.index(2, 1, 1));
    const std::vector<double> d = edt(m);
    std::size_t i = 0;
    for (std::size_t z = 0; z < 3; ++z)
        for (std::size_t y = 0; y < 4; ++y)
            for (std::size_t x = 0; x < 5; ++x, ++i) {
                const double dx = (static_cast<double>(x) - 2.0) * 1.0;
                const double dy = (static_cast<double>(y) - 1.0) * 2.0;
                const double dz = (static_cast<double>(z) - 1.0) * 3.0;
                CHECK(d[i] == doctest::Approx(std::sqrt(dx * dx + dy * dy + dz * dz))
                                  .epsilon(1e-12));
            }
}

TEST_CASE("full mask gives an all-zero field") {
    GridSpec g{{4, 4, 4}, {1.3, 0.7, 2.1}, {0, 0, 0}};
    BinaryMask m(g);
    for (std::size_t i = 0; i < m.size(); ++i) m.set(i);
    for (double v : edt(m)) CHECK(v == 0.0);
}

TEST_CASE("empty mask is an error") {
    GridSpec g{{3, 3, 3}, {1, 1, 1}, {0, 0, 0}};
    CHECK_THROWS_AS(edt(BinaryMask(g)), Error);
}

TEST_CASE("edt matches the all-pairs oracle on random masks") {
    Rng rng(404);
    for (int trial = 0; trial < 60; ++trial) {
        const GridSpec g = oracle::random_grid(rng, 7);
        const double p = 0.02 + rng.uniform() * 0.5;
        const BinaryMask m = oracle::random_mask(g, p, rng);
        const std::vector<double> fast = edt(m);
        const std::vector<double> slow = oracle::brute_force_edt(m);
        REQUIRE(fast.size() == slow.size());
        for (std::size_t i = 0; i < fast.size(); ++i)
            CHECK(std::abs(fast[i] - slow[i]) <= 1e-9);
    }
}

TEST_CASE("edt_squared is the square of edt") {
    Rng rng(77);
    const GridSpec g{{6, 5, 4}, {1.5, 1.0, 2.5}, {0, 0, 0}};
    const BinaryMask m = oracle::random_mask(g, 0.1, rng);
    const std::vector<double> sq = edt_squared(m);
    const std::vector<double> d = edt(m);
    for (std::size_t i = 0; i < d.size(); ++i)
        CHECK(d[i] * d[i] == doctest::Approx(sq[i]).epsilon(1e-12));
}

TEST_CASE("sparse planes exercise empty 1d lines") {
    // Foreground confined to one z-slab: every x/y pass over other slabs
    // starts from an all-infinite line.
    GridSpec g{{6, 6, 6}, {1, 1, 4}, {0, 0, 0}};
    BinaryMask m(g);
    for (std::size_t y = 0; y < 6; ++y)
        for (std::size_t x = 0; x < 6; ++x) m.set(m.index(x, y, 2));
    const std::vector<double> d = edt(m);
    std::size_t i = 0;
    for (std::size_t z = 0; z < 6; ++z)
        for (std::size_t y = 0; y < 6; ++y)
            for (std::size_t x = 0; x < 6; ++x, ++i)
                CHECK(d[i] == doctest::Approx(4.0 * std::abs(static_cast<double>(z) - 2.0)));
}
