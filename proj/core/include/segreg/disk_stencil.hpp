#pragma once

#include "segreg/field.hpp"

#include <vector>

namespace segreg {

// Discrete quadrature of the unit-ball kernel: offsets are lattice steps, a
// weight is the measure of the h-cell around that offset clipped to B_1.
// Interior cells carry the full h^dim; rim cells are weighted by a 4x4
// subsampled cell fraction.
struct DiskStencil {
    int dim = 2;
    double h = 0.0;
    int radius = 0; // max |offset| per axis

    struct Entry {
        int dx = 0, dy = 0;
        double w = 0.0;
    };
    std::vector<Entry> entries; // every nonzero-weight offset

    // Row decomposition used by the convolution: per row offset dy, the
    // maximal contiguous run of full-weight cells, plus the leftover
    // fractional rim entries. Same weights as `entries`, regrouped.
    struct Row {
        int dy = 0;
        int full_lo = 1, full_hi = 0; // empty when lo > hi
    };
    std::vector<Row> rows;
    std::vector<Entry> rim;

    double weight_sum = 0.0;
};

struct StencilOptions {
    // Lifts the h <= 0.25 precondition and the >= 9 node guard; weight-sum
    // accuracy degrades to the subsampled cell-fraction level.
    bool relax_guard = false;
};

DiskStencil build_stencil(double h, int dim, StencilOptions opt = {});

// Phi(x) = sum_offsets w * u^2(x + offset) for every node of Omega_1 (other
// nodes are set to 0). Nodes outside the lattice read as 0. Bit-deterministic
// for any thread count.
void convolve_square(const ScalarField& u, const DiskStencil& st, ScalarField& out, int threads = 1);

ScalarField convolve_square(const ScalarField& u, const DiskStencil& st, int threads = 1);

// Integral of u^2(x) * phi(x) * h^dim over Omega_1; `phi` is a precomputed
// convolution. Deterministic chunked reduction.
double overlap_with_phi(const ScalarField& u, const ScalarField& phi, int threads = 1);

// The pairwise penalty integral: iint 1_{B1}(x-y) u^2(x) v^2(y) dx dy.
double overlap_penalty(const ScalarField& u, const ScalarField& v, const DiskStencil& st, int threads = 1);

} // namespace segreg
