#pragma once

#include "segreg/grid.hpp"

#include <memory>
#include <vector>

namespace segreg {

// Scalar nodal field on a Grid lattice. Values are meaningful on Omega_1 and
// stored as 0 outside it.
struct ScalarField {
    std::shared_ptr<const Grid> grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(std::shared_ptr<const Grid> g)
        : grid(std::move(g)), v(static_cast<std::size_t>(grid->nodes()), 0.0) {}

    double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
    int size() const { return static_cast<int>(v.size()); }

    double max_abs() const;
    // true when every omega1 node holds a finite value
    bool finite_on_omega1() const;
};

// Bilinear (linear in 1D) interpolation of the nodal values at a physical
// point. Points outside the lattice read as 0.
double sample(const ScalarField& u, double px, double py);

// Fills `out` (same grid) with the 3-point / 5-point Laplacian at interior
// nodes; other nodes are set to 0.
void laplacian(const ScalarField& u, ScalarField& out);

// Laplacian at one node (caller guarantees neighbors exist in the lattice).
double laplacian_at(const ScalarField& u, int ix, int iy);

// h^dim weighted l2 quantities over the whole lattice.
double l2_mass(const ScalarField& u);
double l2_inner(const ScalarField& a, const ScalarField& b);

} // namespace segreg
