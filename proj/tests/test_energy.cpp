#include <doctest.h>

#include "segreg/energy.hpp"
#include "segreg/linear_solve.hpp"
#include "segreg/solver.hpp"

#include <cmath>
#include <memory>
#include <random>

using namespace segreg;

namespace {

std::shared_ptr<const Grid> gptr(Grid g) { return std::make_shared<const Grid>(std::move(g)); }

// random smooth interior perturbation for directional-derivative checks
ScalarField random_bump(std::shared_ptr<const Grid> g, std::uint64_t seed) {
    ScalarField phi(g);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const double cx = 0.5 * (g->spec.lo[0] + g->spec.hi[0]);
    const double cy = 0.5 * (g->spec.lo[1] + g->spec.hi[1]);
    const double a1 = dist(rng), a2 = dist(rng), a3 = dist(rng);
    for (int i = 0; i < g->nodes(); ++i) {
        if (!g->interior[i]) continue;
        const auto p = g->pos(i);
        const double dx = p[0] - cx, dy = p[1] - cy;
        phi[i] = std::exp(-4 * (dx * dx + dy * dy)) *
                 (a1 + a2 * std::sin(3 * p[0]) + a3 * std::cos(2 * p[1]));
    }
    return phi;
}

double inner_hd(const ScalarField& a, const ScalarField& b) { return l2_inner(a, b); }

} // namespace

TEST_SUITE_BEGIN("energy");

TEST_CASE("constant fields carry no Dirichlet energy") {
    const auto g = gptr(build_grid({0.0, 0.0}, {1.0, 1.0}, 0.125));
    ScalarField u(g);
    for (int i = 0; i < g->nodes(); ++i)
        if (g->omega1[i]) u[i] = 3.25;
    CHECK(dirichlet_energy(u) == doctest::Approx(0.0));
}

TEST_CASE("1d linear ramp integrates exactly") {
    const auto g = gptr(build_grid(0.0, 1.0, 1.0 / 64));
    ScalarField u(g);
    for (int i = 0; i < g->nodes(); ++i)
        if (g->omega1[i]) u[i] = g->pos(i)[0];
    CHECK(dirichlet_energy(u) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("2d affine field integrates exactly on the unit square") {
    const auto g = gptr(build_grid({0.0, 0.0}, {1.0, 1.0}, 1.0 / 32));
    ScalarField u(g);
    for (int i = 0; i < g->nodes(); ++i)
        if (g->omega1[i]) {
            const auto p = g->pos(i);
            u[i] = p[0] + 2 * p[1];
        }
    CHECK(dirichlet_energy(u) == doctest::Approx(5.0).epsilon(1e-10));
}

TEST_CASE("Dirichlet energy scales quadratically") {
    const auto g = gptr(build_grid({0.0, 0.0}, {1.0, 1.0}, 0.0625));
    ScalarField u = random_bump(g, 17);
    const double base = dirichlet_energy(u);
    ScalarField v = u;
    for (auto& x : v.v) x *= 3.0;
    CHECK(dirichlet_energy(v) == doctest::Approx(9.0 * base).epsilon(1e-13));
}

namespace {

DensityVector two_ramp_state(std::shared_ptr<const Grid> g) {
    DensityVector state;
    state.problem = ProblemTag::A;
    state.k = 2;
    state.fields.assign(2, ScalarField(g));
    state.dirichlet_data.assign(2, ScalarField(g));
    for (int i = 0; i < g->nodes(); ++i) {
        if (!g->omega1[i]) continue;
        const double x = g->pos(i)[0];
        const double f1 = x <= 0.0 ? 1.0 : 0.0;
        const double f2 = x >= 3.0 ? 1.0 : 0.0;
        state.fields[0][i] = std::max(0.0, std::min(1.0, 1.0 - x));
        state.fields[1][i] = std::max(0.0, std::min(1.0, x - 2.0));
        if (!g->interior[i]) {
            state.dirichlet_data[0][i] = f1;
            state.dirichlet_data[1][i] = f2;
            state.fields[0][i] = f1;
            state.fields[1][i] = f2;
        }
    }
    return state;
}

} // namespace

TEST_CASE("two exact ramps at unit distance have energy 2 and no penalty") {
    const auto g = gptr(build_grid(0.0, 3.0, 1.0 / 128));
    const auto st = build_stencil(g->h, 1);
    auto state = two_ramp_state(g);
    const auto e = energy(state, 1e4, st);
    CHECK(e.penalty == doctest::Approx(0.0));
    CHECK(e.total == doctest::Approx(2.0).epsilon(0.02));
    // disjoint supports: J_beta equals J_infty
    const auto e0 = energy(state, 0.0, st);
    CHECK(e.total == doctest::Approx(e0.total));
}

TEST_CASE("a vanishing second component leaves the first component's energy") {
    const auto g = gptr(build_grid(0.0, 3.0, 1.0 / 64));
    const auto st = build_stencil(g->h, 1);
    auto state = two_ramp_state(g);
    for (int i = 0; i < g->nodes(); ++i) {
        state.fields[1][i] = 0.0;
        state.dirichlet_data[1][i] = 0.0;
    }
    const auto e = energy(state, 0.0, st);
    CHECK(e.total == doctest::Approx(dirichlet_energy(state.fields[0])));
}

TEST_CASE("total is affine in beta with the overlap sum as slope") {
    const auto g = gptr(build_grid({0.0, 0.0}, {2.0, 2.0}, 0.125));
    const auto st = build_stencil(g->h, 2);
    DensityVector state;
    state.problem = ProblemTag::A;
    state.k = 2;
    state.fields.assign(2, ScalarField(g));
    state.dirichlet_data.assign(2, ScalarField(g));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int i = 0; i < g->nodes(); ++i)
        if (g->interior[i]) {
            state.fields[0][i] = dist(rng);
            state.fields[1][i] = dist(rng);
        }
    const auto e0 = energy(state, 0.0, st);
    const auto e1 = energy(state, 1.0, st);
    const auto e10 = energy(state, 10.0, st);
    CHECK(e1.total - e0.total == doctest::Approx(e1.penalty).epsilon(1e-12));
    CHECK(e10.total - e0.total == doctest::Approx(10.0 * e10.penalty).epsilon(1e-12));
    CHECK(e0.penalty == doctest::Approx(e10.penalty));
}

TEST_CASE("gradient vanishes on harmonic segregated supports after an exact solve") {
    const auto g = gptr(build_grid(0.0, 3.0, 1.0 / 64));
    const auto st = build_stencil(g->h, 1);
    auto state = two_ramp_state(g);
    // exact discrete solve on each support
    for (int c = 0; c < 2; ++c) {
        std::vector<std::uint8_t> dof(static_cast<std::size_t>(g->nodes()), 0);
        for (int i = 0; i < g->nodes(); ++i) {
            const double x = g->pos(i)[0];
            const bool inside = c == 0 ? (x < 1.0) : (x > 2.0);
            if (g->interior[i] && inside) dof[static_cast<std::size_t>(i)] = 1;
        }
        solve_poisson(state.fields[static_cast<std::size_t>(c)], dof, nullptr, 1e-12, 10000);
    }
    const auto grad = gradient(state, 1e3, st);
    double worst = 0.0;
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < g->nodes(); ++i) {
            if (!g->interior[i]) continue;
            const double x = g->pos(i)[0];
            const bool inside_supp = c == 0 ? (x < 1.0 - g->h / 2) : (x > 2.0 + g->h / 2);
            if (inside_supp && state.fields[static_cast<std::size_t>(c)][i] > 0)
                worst = std::max(worst, std::abs(grad[static_cast<std::size_t>(c)][i]));
        }
    CHECK(worst <= 1e-8);
}

TEST_CASE("gradient matches the directional derivative for problem A") {
    const auto g = gptr(build_grid({0.0, 0.0}, {2.0, 2.0}, 0.125));
    const auto st = build_stencil(g->h, 2);
    DensityVector state;
    state.problem = ProblemTag::A;
    state.k = 2;
    state.fields.assign(2, ScalarField(g));
    state.dirichlet_data.assign(2, ScalarField(g));
    for (int i = 0; i < g->nodes(); ++i)
        if (g->omega1[i]) {
            const auto p = g->pos(i);
            state.fields[0][i] = 0.5 + 0.3 * std::sin(p[0] + p[1]);
            state.fields[1][i] = 0.4 + 0.2 * std::cos(p[0] - 2 * p[1]);
        }

    for (double beta : {0.0, 1.0, 10.0, 100.0}) {
        const auto grad = gradient(state, beta, st);
        for (int c = 0; c < 2; ++c) {
            const ScalarField phi = random_bump(g, 100 + static_cast<unsigned>(c));
            const double t = 1e-5;
            DensityVector sp = state, sm = state;
            for (int i = 0; i < g->nodes(); ++i) {
                sp.fields[static_cast<std::size_t>(c)][i] += t * phi[i];
                sm.fields[static_cast<std::size_t>(c)][i] -= t * phi[i];
            }
            const double fd =
                (energy(sp, beta, st).total - energy(sm, beta, st).total) / (2 * t);
            const double dir = inner_hd(grad[static_cast<std::size_t>(c)], phi);
            const double scale = std::max({1.0, std::abs(fd), std::abs(dir)});
            CHECK(std::abs(fd - dir) / scale <= 1e-5);
        }
    }
}

TEST_CASE("gradient matches the directional derivative for problem B") {
    const auto g = gptr(build_grid({0.0, 0.0}, {2.0, 2.0}, 0.125));
    const auto st = build_stencil(g->h, 2);
    DensityVector state;
    state.problem = ProblemTag::B;
    state.k = 2;
    state.cost.weights = {1.0, 2.0};
    state.fields.assign(2, ScalarField(g));
    for (int i = 0; i < g->nodes(); ++i)
        if (g->interior[i]) {
            const auto p = g->pos(i);
            state.fields[0][i] = 0.5 + 0.3 * std::sin(p[0] * 2);
            state.fields[1][i] = 0.4 + 0.2 * std::cos(p[1]);
        }

    for (double beta : {0.0, 1.0, 10.0, 100.0}) {
        const auto grad = gradient(state, beta, st);
        for (int c = 0; c < 2; ++c) {
            const ScalarField phi = random_bump(g, 200 + static_cast<unsigned>(c));
            const double t = 1e-5;
            DensityVector sp = state, sm = state;
            for (int i = 0; i < g->nodes(); ++i) {
                sp.fields[static_cast<std::size_t>(c)][i] += t * phi[i];
                sm.fields[static_cast<std::size_t>(c)][i] -= t * phi[i];
            }
            const double fd =
                (energy(sp, beta, st).total - energy(sm, beta, st).total) / (2 * t);
            const double dir = inner_hd(grad[static_cast<std::size_t>(c)], phi);
            const double scale = std::max({1.0, std::abs(fd), std::abs(dir)});
            CHECK(std::abs(fd - dir) / scale <= 1e-5);
        }
    }
}

TEST_CASE("tangent-projected gradient vanishes on the first square eigenmode") {
    const auto g = gptr(build_grid({0.0, 0.0}, {2.0, 2.0}, 0.0625));
    const auto st = build_stencil(g->h, 2);
    DensityVector state;
    state.problem = ProblemTag::B;
    state.k = 1;
    state.fields.assign(1, ScalarField(g));
    for (int i = 0; i < g->nodes(); ++i)
        if (g->interior[i]) {
            const auto p = g->pos(i);
            state.fields[0][i] = std::sin(M_PI * p[0] / 2) * std::sin(M_PI * p[1] / 2);
        }
    const double m = l2_mass(state.fields[0]);
    for (auto& v : state.fields[0].v) v /= std::sqrt(m);

    auto grad = gradient(state, 0.0, st);
    // remove the radial (normalization) direction
    const double gu = l2_inner(grad[0], state.fields[0]);
    const double uu = l2_inner(state.fields[0], state.fields[0]);
    double worst = 0.0;
    for (int i = 0; i < g->nodes(); ++i) {
        if (!g->interior[i]) continue;
        worst = std::max(worst, std::abs(grad[0][i] - gu / uu * state.fields[0][i]));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("strict problem B energies reject unnormalized fields") {
    const auto g = gptr(build_grid({0.0, 0.0}, {2.0, 2.0}, 0.125));
    const auto st = build_stencil(g->h, 2);
    DensityVector state;
    state.problem = ProblemTag::B;
    state.k = 1;
    state.fields.assign(1, ScalarField(g));
    for (int i = 0; i < g->nodes(); ++i)
        if (g->interior[i]) state.fields[0][i] = 1.0;
    CHECK_THROWS(energy(state, 1.0, st, 1, true));
}

TEST_SUITE_END();
