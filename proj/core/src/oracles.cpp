#include "segreg/oracles.hpp"
#include "segreg/common.hpp"

#include <cmath>

namespace segreg {

Oracle1DResult oracle_1d(double a, double b, double L) {
    require(a > 0.0 && b > 0.0, "oracle_1d: a, b must be positive");
    require(L > 1.0, "oracle_1d: infeasible, the unit gap does not fit (L <= 1)");
    Oracle1DResult r;
    r.s_star = a * (L - 1.0) / (a + b);
    r.energy = (a + b) * (a + b) / (L - 1.0);
    r.slopes = {a / r.s_star, b / (L - 1.0 - r.s_star)};
    return r;
}

namespace {

double radial_energy(double R1, double r_in, double r_out, double a, double b) {
    const double L1 = std::log(R1 / r_in);
    const double L2 = std::log(r_out / (R1 + 1.0));
    return 2.0 * M_PI * (a * a / L1 + b * b / L2);
}

double radial_denergy(double R1, double r_in, double r_out, double a, double b) {
    const double L1 = std::log(R1 / r_in);
    const double L2 = std::log(r_out / (R1 + 1.0));
    return 2.0 * M_PI * (-a * a / (L1 * L1 * R1) + b * b / (L2 * L2 * (R1 + 1.0)));
}

} // namespace

OracleRadialResult oracle_radial(double r_in, double r_out, double a, double b) {
    require(r_in > 0.0, "oracle_radial: r_in must be positive");
    require(a > 0.0 && b > 0.0, "oracle_radial: a, b must be positive");
    const double margin = 1e-6;
    require(r_out > r_in + 1.0 + margin, "oracle_radial: infeasible geometry (r_out <= r_in + 1)");

    // Golden-section bracket, then Newton on E' to pin the optimality identity
    // below the 1e-8 agreement assertion (function-value search alone cannot
    // localize past sqrt(eps)).
    double lo = r_in * (1.0 + 1e-9), hi = r_out - 1.0 - 1e-9;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - gr * (hi - lo);
    double d = lo + gr * (hi - lo);
    double fc = radial_energy(c, r_in, r_out, a, b);
    double fd = radial_energy(d, r_in, r_out, a, b);
    while (hi - lo > 1e-6) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = radial_energy(c, r_in, r_out, a, b);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = radial_energy(d, r_in, r_out, a, b);
        }
    }
    double R1 = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
        const double g = radial_denergy(R1, r_in, r_out, a, b);
        const double dh = 1e-6 * std::max(1.0, std::abs(R1));
        const double g2 = (radial_denergy(R1 + dh, r_in, r_out, a, b) -
                           radial_denergy(R1 - dh, r_in, r_out, a, b)) / (2 * dh);
        if (g2 == 0.0) break;
        const double step = g / g2;
        R1 -= step;
        if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(R1))) break;
    }

    OracleRadialResult r;
    r.R1_star = R1;
    r.energy = radial_energy(R1, r_in, r_out, a, b);
    const double R2 = R1 + 1.0;
    const double L1 = std::log(R1 / r_in);
    const double L2 = std::log(r_out / R2);
    r.slopes = {a / (R1 * L1), b / (R2 * L2)};
    r.deriv_ratio_sq = (r.slopes[0] * r.slopes[0]) / (r.slopes[1] * r.slopes[1]);
    r.curvature_ratio = R2 / R1;
    if (std::abs(r.deriv_ratio_sq - r.curvature_ratio) > 1e-8)
        throw SolverError("oracle_radial: optimality identity violated beyond 1e-8");
    return r;
}

double barrier_w(double R, std::array<double, 2> x, int dim) {
    require(R > 0.0, "barrier_w: R must be positive");
    const double r2 = x[0] * x[0] + x[1] * x[1];
    const double val = R * R - r2;
    return val > 0.0 ? val / (2.0 * dim) : 0.0;
}

double kelvin_w_star(double R, std::array<double, 2> x, int dim) {
    require(R > 0.0, "kelvin_w_star: R must be positive");
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1]);
    if (r == 0.0) return 0.0; // inside the zero set
    const double val = r * r - R * R;
    if (val <= 0.0) return 0.0;
    return std::pow(R, dim) * val / (2.0 * dim * std::pow(r, dim));
}

double eigen_reference_rectangle(double a, double b) {
    require(a > 0.0 && b > 0.0, "eigen_reference: degenerate rectangle");
    return M_PI * M_PI * (1.0 / (a * a) + 1.0 / (b * b));
}

double eigen_reference_disk(double rho) {
    require(rho > 0.0, "eigen_reference: degenerate disk");
    return (kBesselJ0FirstZero / rho) * (kBesselJ0FirstZero / rho);
}

} // namespace segreg
