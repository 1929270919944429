#include "segreg/disk_stencil.hpp"
#include "segreg/common.hpp"
#include "segreg/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace segreg {

namespace {

// Fraction of the h-cell centered at lattice offset (dx, dy) inside B_1,
// estimated at 4 subsample points per axis. Exactly symmetric under
// (dx,dy) -> (-dx,-dy) and axis swaps.
double cell_fraction(int dx, int dy, double h, int dim) {
    int hits = 0;
    if (dim == 1) {
        for (int i = 0; i < 4; ++i) {
            const double px = (dx + (2 * i + 1) / 8.0 - 0.5) * h;
            if (std::abs(px) <= 1.0) ++hits;
        }
        return hits / 4.0;
    }
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double px = (dx + (2 * i + 1) / 8.0 - 0.5) * h;
            const double py = (dy + (2 * j + 1) / 8.0 - 0.5) * h;
            if (px * px + py * py <= 1.0) ++hits;
        }
    return hits / 16.0;
}

bool cell_full(int dx, int dy, double h, int dim) {
    // farthest cell corner still inside the unit ball
    const double cx = (std::abs(dx) + 0.5) * h;
    if (dim == 1) return cx <= 1.0;
    const double cy = (std::abs(dy) + 0.5) * h;
    return cx * cx + cy * cy <= 1.0;
}

} // namespace

DiskStencil build_stencil(double h, int dim, StencilOptions opt) {
    require(h > 0.0, "build_stencil: h must be positive");
    require(dim == 1 || dim == 2, "build_stencil: dim must be 1 or 2");
    require(h < 1.0, "build_stencil: h must be < 1");
    if (!opt.relax_guard)
        require(h <= 0.25, "build_stencil: h > 0.25 needs the relaxed guard");

    DiskStencil st;
    st.dim = dim;
    st.h = h;
    st.radius = static_cast<int>(std::ceil((1.0 + h) / h));
    const double hd = (dim == 1) ? h : h * h;

    const int ry = (dim == 1) ? 0 : st.radius;
    for (int dy = -ry; dy <= ry; ++dy) {
        DiskStencil::Row row;
        row.dy = dy;
        int full_lo = 1, full_hi = 0;
        for (int dx = -st.radius; dx <= st.radius; ++dx) {
            double w;
            if (cell_full(dx, dy, h, dim)) {
                w = hd;
                if (full_lo > full_hi) full_lo = full_hi = dx;
                else full_hi = dx;
            } else {
                const double f = cell_fraction(dx, dy, h, dim);
                if (f == 0.0) continue;
                w = f * hd;
                st.rim.push_back({dx, dy, w});
            }
            st.entries.push_back({dx, dy, w});
            st.weight_sum += w;
        }
        row.full_lo = full_lo;
        row.full_hi = full_hi;
        if (full_lo <= full_hi) st.rows.push_back(row);
    }

    if (!opt.relax_guard)
        require(static_cast<int>(st.entries.size()) >= 9,
                "build_stencil: h too coarse, stencil would contain < 9 nodes");
    require(!st.entries.empty(), "build_stencil: empty stencil");
    return st;
}

void convolve_square(const ScalarField& u, const DiskStencil& st, ScalarField& out, int threads) {
    const Grid& g = *u.grid;
    require(st.h == g.h && st.dim == g.dim, "convolve_square: stencil/grid mismatch");
    const int nx = g.n[0], ny = g.n[1];
    out.v.assign(static_cast<std::size_t>(nx) * ny, 0.0);

    // u^2 and its per-row prefix sums
    std::vector<double> usq(static_cast<std::size_t>(nx) * ny);
    for (std::size_t i = 0; i < usq.size(); ++i) usq[i] = u.v[i] * u.v[i];
    std::vector<double> pref(static_cast<std::size_t>(nx + 1) * ny);
    parallel_for(ny, threads, [&](int yb, int ye) {
        for (int iy = yb; iy < ye; ++iy) {
            const double* row = usq.data() + static_cast<std::size_t>(iy) * nx;
            double* p = pref.data() + static_cast<std::size_t>(iy) * (nx + 1);
            p[0] = 0.0;
            for (int ix = 0; ix < nx; ++ix) p[ix + 1] = p[ix] + row[ix];
        }
    });

    const double hd = (g.dim == 1) ? g.h : g.h * g.h;
    parallel_for(ny, threads, [&](int yb, int ye) {
        for (int iy = yb; iy < ye; ++iy) {
            for (int ix = 0; ix < nx; ++ix) {
                const int id = g.index(ix, iy);
                if (!g.omega1[id]) continue;
                double full = 0.0;
                for (const auto& row : st.rows) {
                    const int yy = iy + row.dy;
                    if (yy < 0 || yy >= ny) continue;
                    const int a = std::max(0, ix + row.full_lo);
                    const int b = std::min(nx - 1, ix + row.full_hi);
                    if (a > b) continue;
                    const double* p = pref.data() + static_cast<std::size_t>(yy) * (nx + 1);
                    full += p[b + 1] - p[a];
                }
                double part = 0.0;
                for (const auto& e : st.rim) {
                    const int xx = ix + e.dx, yy = iy + e.dy;
                    if (xx < 0 || xx >= nx || yy < 0 || yy >= ny) continue;
                    part += e.w * usq[static_cast<std::size_t>(yy) * nx + xx];
                }
                out[id] = full * hd + part;
            }
        }
    });
}

ScalarField convolve_square(const ScalarField& u, const DiskStencil& st, int threads) {
    ScalarField out(u.grid);
    convolve_square(u, st, out, threads);
    return out;
}

double overlap_with_phi(const ScalarField& u, const ScalarField& phi, int threads) {
    const Grid& g = *u.grid;
    const double hd = (g.dim == 1) ? g.h : g.h * g.h;
    const int n = g.nodes();
    const double s = parallel_sum(n, threads, [&](int b, int e) {
        double acc = 0.0;
        for (int i = b; i < e; ++i)
            if (g.omega1[i]) acc += u[i] * u[i] * phi[i];
        return acc;
    });
    return hd * s;
}

double overlap_penalty(const ScalarField& u, const ScalarField& v, const DiskStencil& st, int threads) {
    const ScalarField phi = convolve_square(v, st, threads);
    return overlap_with_phi(u, phi, threads);
}

} // namespace segreg
