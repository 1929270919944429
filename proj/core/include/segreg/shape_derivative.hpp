#pragma once

#include "segreg/contour.hpp"
#include "segreg/field.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace segreg {

// Linear homotopy F_t = id + t Y with a nodal vector field Y supported in the
// window omega and vanishing near its rim, so that the deformation never
// touches the fixed part of the boundary data.
struct Deformation {
    ScalarField yx, yy;                 // nodal components of Y
    std::vector<std::uint8_t> window;   // omega node mask

    explicit Deformation(std::shared_ptr<const Grid> g)
        : yx(g), yy(g), window(static_cast<std::size_t>(g->nodes()), 0) {}
};

// Domain S (node mask) with Lipschitz boundary data phi; phi must vanish on
// the deformed part of the boundary.
struct ShapeCase {
    std::shared_ptr<const Grid> grid;
    std::vector<std::uint8_t> s_mask;
    std::function<double(double, double)> phi;
};

// Energy of the harmonic extension on F_t(S), computed on the fixed domain S
// with the pulled-back coefficient matrix A_t = det(DF_t) DF_t^-1 DF_t^-T
// (bilinear elements, 2x2 Gauss quadrature, conjugate gradients). Throws when
// det(DF_t) <= 0 anywhere in the window (t out of range). When `out_u` is
// non-null it receives the solution, extended by the Dirichlet values.
double extension_energy(const ShapeCase& sc, double t, const Deformation& def,
                        ScalarField* out_u = nullptr, double cg_tol = 1e-11,
                        int threads = 1);

// First derivative of I_t at t = 0 in the volume form
// integral over S of <(div Y Id - (DY + DY^T)) grad u, grad u>,
// evaluated with the same Gauss points as the energy so that it is the exact
// derivative of the discrete family t -> I_t.
double volume_form_derivative(const ScalarField& u, const ShapeCase& sc, const Deformation& def,
                              int threads = 1);

// First derivative in the boundary form - integral over (omega n dS) of
// (Y . nu)(d_nu u)^2, quadratured over a contour polyline of u with the
// boundary measurements transported to the zero level. When more than 20% of
// the quadrature nodes carry untrustworthy slope samples, *flagged is set.
double boundary_form_derivative(const ScalarField& u, const Deformation& def,
                                const std::vector<Polyline>& boundary, double contour_eps,
                                int window, bool* flagged = nullptr);

} // namespace segreg
