#include <doctest.h>

#include "segreg/common.hpp"
#include "segreg/grid.hpp"

#include <cmath>
#include <random>

using namespace segreg;

TEST_SUITE_BEGIN("grid");

TEST_CASE("1d lattice covers the unit neighborhood of the bounds") {
    const Grid g = build_grid(0.0, 3.0, 0.5);
    CHECK(g.dim == 1);
    CHECK(g.n[0] == 11);
    CHECK(g.x(0) == doctest::Approx(-1.0));
    CHECK(g.x(g.n[0] - 1) == doctest::Approx(4.0));
    // Omega nodes are 0..3 inclusive (closed membership)
    int count = 0;
    for (int i = 0; i < g.nodes(); ++i)
        if (g.omega[i]) ++count;
    CHECK(count == 7);
    // the discrete collar uses the strict < 1 - h/2 rule
    for (int i = 0; i < g.nodes(); ++i) {
        const double x = g.pos(i)[0];
        const bool expect = (x >= -0.5 && x < 0.0) || (x > 3.0 && x <= 3.5);
        CHECK(static_cast<bool>(g.collar[i]) == expect);
    }
}

TEST_CASE("2d collar contains the half-spacing neighbor") {
    const Grid g = build_grid({0.0, 0.0}, {1.0, 1.0}, 0.5);
    bool found = false;
    for (int i = 0; i < g.nodes(); ++i) {
        const auto p = g.pos(i);
        if (std::abs(p[0] + 0.5) < 1e-12 && std::abs(p[1] - 0.5) < 1e-12) {
            found = true;
            CHECK(g.collar[i] == 1);
        }
    }
    CHECK(found);
}

TEST_CASE("invalid spacing and degenerate intervals are rejected") {
    CHECK_THROWS_AS(build_grid(0.0, 3.0, 0.0), InvalidInput);
    CHECK_THROWS_AS(build_grid(0.0, 3.0, -0.25), InvalidInput);
    CHECK_THROWS_AS(build_grid(0.0, 0.1, 0.25), InvalidInput);
}

TEST_CASE("partition capacity check needs diameter above 1 + 2h") {
    GridSpec s;
    s.dim = 1;
    s.lo = {0.0, 0.0};
    s.hi = {1.0, 0.0};
    s.h = 0.125;
    s.require_partition_capacity = true;
    CHECK_THROWS_AS(build_grid(s), InvalidInput);
    s.hi[0] = 3.0;
    CHECK_NOTHROW(build_grid(s));
}

TEST_CASE("mask invariants hold on boxes and annuli") {
    GridSpec s;
    s.dim = 2;
    s.shape = DomainShape::Annulus;
    s.center = {0.0, 0.0};
    s.r_inner = 0.5;
    s.r_outer = 2.0;
    s.h = 0.125;
    const Grid g = build_grid(s);
    const auto d_omega = distance_to_set(g, g.omega);
    for (int i = 0; i < g.nodes(); ++i) {
        if (g.omega[i]) CHECK(g.omega1[i] == 1);
        CHECK(static_cast<bool>(g.collar[i]) == static_cast<bool>(g.omega1[i] && !g.omega[i]));
        if (g.omega1[i]) CHECK(d_omega[static_cast<std::size_t>(i)] <= 1.0 + g.h);
        if (g.interior[i]) CHECK(g.omega[i] == 1);
    }
}

TEST_CASE("omega1 is monotone under refinement") {
    const Grid gc = build_grid({0.0, 0.0}, {2.0, 1.0}, 0.25);
    const Grid gf = build_grid({0.0, 0.0}, {2.0, 1.0}, 0.125);
    for (int i = 0; i < gc.nodes(); ++i) {
        if (!gc.omega1[i]) continue;
        const auto p = gc.pos(i);
        const int ix = static_cast<int>(std::lround((p[0] - gf.origin[0]) / gf.h));
        const int iy = static_cast<int>(std::lround((p[1] - gf.origin[1]) / gf.h));
        REQUIRE(gf.in_lattice(ix, iy));
        CHECK(gf.omega1[gf.index(ix, iy)] == 1);
    }
}

TEST_CASE("distance between masks matches brute force") {
    const Grid g = build_grid({0.0, 0.0}, {2.0, 1.5}, 0.25);
    std::mt19937_64 rng(7);
    std::vector<std::uint8_t> a(static_cast<std::size_t>(g.nodes()), 0);
    std::vector<std::uint8_t> b(static_cast<std::size_t>(g.nodes()), 0);
    for (int i = 0; i < g.nodes(); ++i) {
        const auto r = rng() % 100;
        if (r < 4) a[static_cast<std::size_t>(i)] = 1;
        else if (r < 8) b[static_cast<std::size_t>(i)] = 1;
    }
    const auto fast = dist_between_masks(g, a, b);
    REQUIRE(fast.has_value());
    double brute = 1e300;
    for (int i = 0; i < g.nodes(); ++i) {
        if (!a[static_cast<std::size_t>(i)]) continue;
        for (int j = 0; j < g.nodes(); ++j) {
            if (!b[static_cast<std::size_t>(j)]) continue;
            const auto pi = g.pos(i), pj = g.pos(j);
            brute = std::min(brute, std::hypot(pi[0] - pj[0], pi[1] - pj[1]));
        }
    }
    CHECK(*fast == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("singleton distances: value, symmetry, triangle inequality") {
    const Grid g = build_grid(0.0, 3.0, 0.25);
    auto single = [&](double x) {
        std::vector<std::uint8_t> m(static_cast<std::size_t>(g.nodes()), 0);
        for (int i = 0; i < g.nodes(); ++i)
            if (std::abs(g.pos(i)[0] - x) < 1e-12) m[static_cast<std::size_t>(i)] = 1;
        return m;
    };
    const auto a = single(0.0), b = single(2.5), c = single(1.0);
    CHECK(*dist_between_masks(g, a, b) == doctest::Approx(2.5));
    CHECK(*dist_between_masks(g, a, b) == *dist_between_masks(g, b, a));
    CHECK(*dist_between_masks(g, a, b) <=
          *dist_between_masks(g, a, c) + *dist_between_masks(g, c, b) + 1e-12);

    const std::vector<std::uint8_t> empty(static_cast<std::size_t>(g.nodes()), 0);
    CHECK(!dist_between_masks(g, empty, b).has_value());
}

TEST_CASE("half planes shifted by 1.5 are 1.5 apart") {
    const Grid g = build_grid({-2.0, -1.0}, {3.0, 1.0}, 0.25);
    std::vector<std::uint8_t> a(static_cast<std::size_t>(g.nodes()), 0);
    std::vector<std::uint8_t> b(static_cast<std::size_t>(g.nodes()), 0);
    for (int i = 0; i < g.nodes(); ++i) {
        const double x = g.pos(i)[0];
        if (x <= 0.0) a[static_cast<std::size_t>(i)] = 1;
        if (x >= 1.5) b[static_cast<std::size_t>(i)] = 1;
    }
    CHECK(*dist_between_masks(g, a, b) == doctest::Approx(1.5));
}

TEST_CASE("erosion peels boundary nodes") {
    const Grid g = build_grid({0.0, 0.0}, {1.0, 1.0}, 0.25);
    std::vector<std::uint8_t> m(static_cast<std::size_t>(g.nodes()), 0);
    for (int i = 0; i < g.nodes(); ++i)
        if (g.omega[i]) m[static_cast<std::size_t>(i)] = 1;
    const auto e1 = erode_mask(g, m, 1);
    int kept = 0;
    for (int i = 0; i < g.nodes(); ++i) {
        if (!e1[static_cast<std::size_t>(i)]) continue;
        ++kept;
        CHECK(m[static_cast<std::size_t>(i)] == 1);
        const auto p = g.pos(i);
        CHECK(g.strictly_inside_omega(p[0], p[1], 0.2));
    }
    CHECK(kept == 9); // 5x5 block of omega nodes loses its ring
}

TEST_SUITE_END();
