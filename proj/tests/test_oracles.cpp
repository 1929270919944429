#include <doctest.h>

#include "segreg/common.hpp"
#include "segreg/field.hpp"
#include "segreg/oracles.hpp"

#include <cmath>

using namespace segreg;

TEST_SUITE_BEGIN("oracles");

namespace {

// scan reference for the 1d gap energy a^2/s + b^2/(L-1-s)
double scan_1d_minimum(double a, double b, double L, double* s_best) {
    double best = 1e300, sb = 0.0;
    for (double s = 1e-4; s < L - 1.0; s += 1e-4) {
        const double e = a * a / s + b * b / (L - 1.0 - s);
        if (e < best) {
            best = e;
            sb = s;
        }
    }
    if (s_best) *s_best = sb;
    return best;
}

} // namespace

TEST_CASE("1d oracle matches the scan reference") {
    double sb = 0.0;
    const double eb = scan_1d_minimum(1.0, 1.0, 3.0, &sb);
    const auto r = oracle_1d(1.0, 1.0, 3.0);
    CHECK(r.s_star == doctest::Approx(1.0));
    CHECK(r.energy == doctest::Approx(2.0));
    CHECK(r.s_star == doctest::Approx(sb).epsilon(1e-3));
    CHECK(r.energy == doctest::Approx(eb).epsilon(1e-6));
    CHECK(r.slopes[0] == doctest::Approx(1.0));
    CHECK(r.slopes[1] == doctest::Approx(1.0));
}

TEST_CASE("1d oracle with asymmetric data still equalizes slopes") {
    const auto r = oracle_1d(1.0, 2.0, 4.0);
    CHECK(r.s_star == doctest::Approx(1.0));
    CHECK(r.energy == doctest::Approx(3.0));
    CHECK(r.slopes[0] == doctest::Approx(r.slopes[1]).epsilon(1e-14));
    double sb = 0.0;
    scan_1d_minimum(1.0, 2.0, 4.0, &sb);
    CHECK(r.s_star == doctest::Approx(sb).epsilon(1e-3));
}

TEST_CASE("symmetric data centers the gap") {
    for (double L : {2.5, 3.0, 5.0}) {
        const auto r = oracle_1d(0.7, 0.7, L);
        CHECK(r.s_star == doctest::Approx((L - 1.0) / 2.0));
    }
    CHECK_THROWS_AS(oracle_1d(1.0, 1.0, 1.0), InvalidInput);
}

TEST_CASE("radial oracle reproduces the pinned optimum") {
    const auto r = oracle_radial(0.5, 4.0, 1.0, 1.0);
    CHECK(r.R1_star == doctest::Approx(1.1595583056786456).epsilon(1e-9));
    CHECK(r.energy == doctest::Approx(17.662945070361474).epsilon(1e-10));
    CHECK(r.deriv_ratio_sq == doctest::Approx(1.8623973413865875).epsilon(1e-9));
    CHECK(r.curvature_ratio == doctest::Approx(1.8623973413865875).epsilon(1e-9));
    // first-order optimality identity
    CHECK(std::abs(r.deriv_ratio_sq - r.curvature_ratio) <= 1e-8);
    // the unsquared slope ratio is the square root, not the curvature ratio
    const double unsquared = r.slopes[0] / r.slopes[1];
    CHECK(std::abs(unsquared / r.curvature_ratio - 1.0) > 0.15);
}

TEST_CASE("radial oracle respects the inversion relabeling") {
    const auto r = oracle_radial(0.5, 4.0, 1.0, 1.0);
    // relabeled problem: swap roles of the data values
    const auto r2 = oracle_radial(0.5, 4.0, 2.0, 2.0);
    CHECK(r2.R1_star == doctest::Approx(r.R1_star).epsilon(1e-10));
    CHECK(r2.curvature_ratio == doctest::Approx(r.curvature_ratio).epsilon(1e-10));
    CHECK(std::abs(r2.deriv_ratio_sq - r2.curvature_ratio) <= 1e-8);
}

TEST_CASE("infeasible radial geometry is rejected") {
    CHECK_THROWS_AS(oracle_radial(1.0, 2.0, 1.0, 1.0), InvalidInput);
    CHECK_THROWS_AS(oracle_radial(0.0, 4.0, 1.0, 1.0), InvalidInput);
}

TEST_CASE("barrier and Kelvin transform values") {
    CHECK(barrier_w(1.0, {1.0, 0.0}, 2) == doctest::Approx(0.0));
    CHECK(kelvin_w_star(1.0, {1.0, 0.0}, 2) == doctest::Approx(0.0));
    CHECK(kelvin_w_star(1.0, {2.0, 0.0}, 2) == doctest::Approx(3.0 / 16.0));
    CHECK(kelvin_w_star(1.0, {0.0, 0.0}, 2) == doctest::Approx(0.0));
    CHECK(barrier_w(2.0, {1.0, 0.0}, 2) == doctest::Approx(3.0 / 4.0));
}

TEST_CASE("Kelvin transform satisfies its distributional identity") {
    // lap w* = -(R/|x|)^(N+2) away from the sphere, checked by finite differences
    const double R = 1.0, h = 1e-3;
    const auto probe = [&](double x, double y) { return kelvin_w_star(R, {x, y}, 2); };
    const double x0 = 1.5, y0 = 0.0;
    const double lap = (probe(x0 + h, y0) + probe(x0 - h, y0) + probe(x0, y0 + h) +
                        probe(x0, y0 - h) - 4 * probe(x0, y0)) /
                       (h * h);
    const double r = std::hypot(x0, y0);
    CHECK(lap == doctest::Approx(-std::pow(R / r, 4.0)).epsilon(1e-4));
}

TEST_CASE("eigenvalue references") {
    CHECK(eigen_reference_rectangle(2.0, 2.0) == doctest::Approx(M_PI * M_PI / 2));
    CHECK(eigen_reference_disk(1.0) == doctest::Approx(5.783185962946785).epsilon(1e-12));
    CHECK_THROWS_AS(eigen_reference_rectangle(0.0, 1.0), InvalidInput);
    CHECK_THROWS_AS(eigen_reference_disk(0.0), InvalidInput);
}

TEST_SUITE_END();
