#pragma once

#include "segreg/energy.hpp"

#include <array>
#include <string>
#include <vector>

namespace segreg {

enum class CheckStatus { Pass, Fail, NotApplicable, Insufficient };

// One theorem-derived check: what was measured, against which tolerance, and
// where the worst violations sit.
struct CheckRecord {
    std::string name;
    CheckStatus status = CheckStatus::NotApplicable;
    double measured = 0.0;
    double tolerance = 0.0;
    std::vector<std::array<double, 2>> worst_locations;
    std::string note;
};

const char* to_string(CheckStatus s);

struct SupportSet {
    int comp = -1;
    double threshold = 0.0;
    std::vector<std::uint8_t> mask;  // {u > eps} within Omega_1
    std::vector<int> boundary;       // support nodes with a non-support 4-neighbor
    // diagnostics derived from Phi = 1_{B1} * u^2 (present when a stencil was supplied)
    std::vector<std::uint8_t> d_mask; // {dist(x, {Phi <= eps'}) > 1}
    std::vector<std::uint8_t> c_mask; // {dist(x, {Phi <= eps'}) < 1}
};

// Thresholded supports plus boundary node lists. When `st` is non-null the
// D_i / C_i diagnostic masks are derived from the disk convolution of u_i^2.
std::vector<SupportSet> support_masks(const DensityVector& state, double eps,
                                      const DiskStencil* st = nullptr);

// Theorem check: every free-boundary node of S_i sees some other support
// within 1 + tol_dist, and no pair of supports is closer than 1 - tol_dist.
// Boundary nodes within `omega_margin` of the domain boundary are not free
// boundary and are skipped.
CheckRecord check_exact_distance(const Grid& g, const std::vector<SupportSet>& supports,
                                 double tol_dist, double omega_margin);

// 1-uniform exterior sphere: for sampled free-boundary nodes x0, searches for
// a center c with |c - x0| near 1 whose unit ball misses S_i while every
// component vanishes on B1(c) n B1(x0). Directions are limited to a 64-ray
// fan around the outward normal estimate.
CheckRecord check_exterior_sphere(const Grid& g, const DensityVector& state,
                                  const SupportSet& support, double eps,
                                  double omega_margin, int max_samples = 256);

struct LipschitzEstimate {
    double sup_gradient = 0.0;    // max |du|/h over edges in the probe window
    double growth_constant = 0.0; // smallest C with u <= C dist(x, dS) near dS
    int samples = 0;
};

// Gradient sup over a compact window (margin from the domain boundary) plus
// the near-boundary linear-growth constant sampled within `band` of dS_i.
LipschitzEstimate lipschitz_estimate(const ScalarField& u, const SupportSet& support,
                                     double margin, double band = 0.25);

// sup |lap u| (A) or |lap u + lambda u| (B) over the support eroded by 2 rings.
double harmonic_residual(const ScalarField& u, const SupportSet& support, ProblemTag tag,
                         double lambda = 0.0);

// lap u >= -lambda u - tol at every interior Omega node (lambda = 0 for A).
CheckRecord subharmonic_check(const ScalarField& u, ProblemTag tag, double lambda, double tol);

struct BoxCountResult {
    double dimension = 0.0;
    double residual = 0.0; // max relative deviation of the log-log fit
    int scales_used = 0;
    bool insufficient = false;
};

// Least-squares slope of log(covering boxes) against log(1/scale) over the
// boundary node set. Needs >= 16 nodes and >= 3 scales.
BoxCountResult box_counting(const Grid& g, const std::vector<int>& boundary_nodes,
                            const std::vector<double>& scales);

// Dyadic scales in [4h, 0.5].
std::vector<double> default_box_scales(double h);

} // namespace segreg
