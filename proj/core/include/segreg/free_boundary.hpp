#pragma once

#include "segreg/contour.hpp"
#include "segreg/energy.hpp"

#include <array>
#include <limits>
#include <string>
#include <vector>

namespace segreg {

// One measured point of the free boundary of component i, matched across the
// unit gap to component j at y0 = x0 + nu.
struct FreeBoundarySample {
    int comp = -1;
    std::array<double, 2> x0{0, 0};
    std::array<double, 2> nu{0, 0}; // outward unit normal
    double chi = 0.0;               // signed curvature, outward-positive
    double dnu = 0.0;               // |d_nu u_i| at x0
    bool dnu_trusted = false;

    std::array<double, 2> y0{0, 0};
    int matched_comp = -1;
    bool matched = false;
    bool unique_ok = true; // no second component within matching reach
    double chi_j = 0.0;
    double dnu_j = 0.0;
    double match_gap = 0.0; // |adjusted boundary of j - x0| - 1

    bool admitted = false;  // curvature gate chi <= 1 - delta on both sides
    bool flat = false;      // |chi| below the flat-branch floor
    bool inconsistent = false; // chi ~ 0 on one side only
    double lhs = 0.0;       // (dnu_i / dnu_j)^2
    double rhs = 0.0;       // |chi_i / chi_j|, or 1 on the flat branch
};

// One-sided second-order difference of u along -nu using bilinear sampling at
// t = h, 2h. Returns |d_nu u|; *trusted is cleared when the inward ray leaves
// the support {u > support_eps} within 3h or the slope is not positive.
// `level` is the known field value at x0 (0 on the zero set, eps on an
// eps-contour); passing it avoids interpolating across the kink of the field
// at the support boundary. NaN falls back to bilinear sampling at x0.
double normal_derivative(const ScalarField& u, std::array<double, 2> x0,
                         std::array<double, 2> nu, bool* trusted, double support_eps,
                         double level = std::numeric_limits<double>::quiet_NaN());

// Geometry and slope measured at one vertex of an eps-level contour and
// transported to the zero level set along the normal (parallel-curve
// correction): x -> x + d nu, chi -> chi/(1 + d chi), |d_nu u| -> (1 - d chi)
// times the measured slope, with d = eps / |d_nu u|.
struct BoundaryPointMeasure {
    bool valid = false;
    bool trusted = false;
    std::array<double, 2> x{0, 0};
    std::array<double, 2> nu{0, 0};
    double chi = 0.0;
    double dnu = 0.0;
};

BoundaryPointMeasure measure_boundary_point(const ScalarField& u, const Polyline& pl,
                                            int vertex, int window, double eps,
                                            double support_eps);

struct FbOptions {
    double contour_eps_factor = 1.5; // eps_i = factor * h * slope scale of u_i
    int window = 0;                  // parabola half-window; 0 = auto (0.25 arc)
    double delta = 0.1;              // curvature admission gate chi <= 1 - delta
    double chi_floor = 0.02;         // flat-branch threshold
    double tol_fb = 0.05;            // PASS when the median relative error is below
    double match_factor = 4.0;       // matching tolerance in units of h
    double omega_margin = 0.25;      // skip samples this close to the domain boundary
    int max_samples_per_comp = 400;
    int min_matched = 8;
};

// Extracts the eps-level contours of every component, measures (nu, chi,
// d_nu u) per sampled vertex, transports the measurements from the eps-level
// to the zero level along the normal (parallel-curve correction), and matches
// x0 + nu against the other components.
std::vector<FreeBoundarySample> sample_free_boundary(const DensityVector& state,
                                                     const FbOptions& opt);

struct ConditionReport {
    int n_samples = 0;
    int n_matched = 0;
    int n_admitted = 0;
    int n_flat = 0;
    int n_untrusted = 0;
    int n_excluded_curvature = 0;
    int n_inconsistent = 0;
    int n_unique_violations = 0;
    double median_rel_err = 0.0;
    double median_lhs = 0.0;         // over admitted samples
    double median_rhs_curved = 0.0;  // over admitted curved samples
    double median_unsquared = 0.0;   // median |dnu_i/dnu_j| (diagnostic)
    double tol = 0.0;
    bool pass = false;
    bool insufficient = false;
    std::string note;
};

// Aggregates per-sample |LHS - RHS| / RHS by the median over admitted samples.
ConditionReport verify_condition(std::vector<FreeBoundarySample>& samples, const FbOptions& opt);

} // namespace segreg
