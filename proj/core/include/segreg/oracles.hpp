#pragma once

#include <array>

namespace segreg {

// Two ramps on (0, L) with boundary values a (left) and b (right), separated
// by a unit gap starting at s: E(s) = a^2/s + b^2/(L-1-s). Closed form.
struct Oracle1DResult {
    double s_star = 0.0;
    double energy = 0.0;
    std::array<double, 2> slopes{0.0, 0.0}; // |u1'|, |u2'| at the free boundary, equal at optimum
};

Oracle1DResult oracle_1d(double a, double b, double L);

// Concentric annulus split: component 1 on (r_in, R1) with value a at r_in,
// component 2 on (R2, r_out) with value b at r_out, R2 = R1 + 1.
// E(R1) = 2 pi (a^2/log(R1/r_in) + b^2/log(r_out/R2)), minimized by bracketed
// scalar search; the squared-normal-derivative ratio and the curvature ratio
// R2/R1 agree at the optimum (first-order optimality identity).
struct OracleRadialResult {
    double R1_star = 0.0;
    double energy = 0.0;
    double deriv_ratio_sq = 0.0; // (a/(R1 L1))^2 / (b/(R2 L2))^2
    double curvature_ratio = 0.0; // R2/R1
    std::array<double, 2> slopes{0.0, 0.0}; // |u1'(R1)|, |u2'(R2)|
};

OracleRadialResult oracle_radial(double r_in, double r_out, double a, double b);

// Barrier w_R(x) = (R^2 - |x|^2)^+ / (2N) and its Kelvin transform
// w_R^*(x) = R^N (|x|^2 - R^2)^+ / (2N |x|^N); w_R^*(0) = 0.
double barrier_w(double R, std::array<double, 2> x, int dim);
double kelvin_w_star(double R, std::array<double, 2> x, int dim);

// First Dirichlet eigenvalue references: rectangle a x b and disk of radius rho.
double eigen_reference_rectangle(double a, double b);
double eigen_reference_disk(double rho);

// First zero of the Bessel function J0, pinned.
inline constexpr double kBesselJ0FirstZero = 2.404825557695773;

} // namespace segreg
