#include "segreg/shape_derivative.hpp"
#include "segreg/common.hpp"
#include "segreg/free_boundary.hpp"
#include "segreg/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace segreg {

namespace {

// 2x2 Gauss points on the unit square
constexpr double kG1 = 0.5 - 0.28867513459481287; // (1 - 1/sqrt(3)) / 2
constexpr double kG2 = 0.5 + 0.28867513459481287;
constexpr double kGp[4][2] = {{kG1, kG1}, {kG2, kG1}, {kG2, kG2}, {kG1, kG2}};

// Bilinear basis gradients at (xi, eta), scaled by 1/h outside.
inline void basis_grad(double xi, double eta, double gx[4], double gy[4]) {
    gx[0] = -(1 - eta); gy[0] = -(1 - xi);
    gx[1] = (1 - eta);  gy[1] = -xi;
    gx[2] = eta;        gy[2] = xi;
    gx[3] = -eta;       gy[3] = (1 - xi);
}

struct FemMesh {
    const Grid* g = nullptr;
    std::vector<int> cells;              // lower-left node index per active cell
    std::vector<std::uint8_t> is_node;   // node belongs to some active cell
    std::vector<std::uint8_t> is_dof;    // node interior to the active mesh
    std::vector<int> cell_rows_begin;    // cells grouped by lattice row (for parity passes)
    std::vector<int> rows;               // distinct rows, matching cell_rows_begin

    FemMesh(const Grid& grid, const std::vector<std::uint8_t>& s_mask) : g(&grid) {
        const int nx = grid.n[0], ny = grid.n[1];
        std::vector<int> incident(static_cast<std::size_t>(grid.nodes()), 0);
        is_node.assign(static_cast<std::size_t>(grid.nodes()), 0);
        for (int iy = 0; iy + 1 < ny; ++iy) {
            bool row_open = false;
            for (int ix = 0; ix + 1 < nx; ++ix) {
                const int a = grid.index(ix, iy);
                if (!(s_mask[static_cast<std::size_t>(a)] && s_mask[static_cast<std::size_t>(a + 1)] &&
                      s_mask[static_cast<std::size_t>(a + nx)] && s_mask[static_cast<std::size_t>(a + nx + 1)]))
                    continue;
                if (!row_open) {
                    rows.push_back(iy);
                    cell_rows_begin.push_back(static_cast<int>(cells.size()));
                    row_open = true;
                }
                cells.push_back(a);
                for (int c : {a, a + 1, a + nx, a + nx + 1}) {
                    is_node[static_cast<std::size_t>(c)] = 1;
                    ++incident[static_cast<std::size_t>(c)];
                }
            }
        }
        cell_rows_begin.push_back(static_cast<int>(cells.size()));
        is_dof.assign(static_cast<std::size_t>(grid.nodes()), 0);
        for (int i = 0; i < grid.nodes(); ++i)
            if (is_node[static_cast<std::size_t>(i)] && incident[static_cast<std::size_t>(i)] == 4)
                is_dof[static_cast<std::size_t>(i)] = 1;
    }
};

// det(DF) DF^-1 DF^-T for DF = I + t DY; symmetric 2x2 stored (axx, axy, ayy)
inline void pullback_matrix(double t, double dyxx, double dyxy, double dyyx, double dyyy,
                            double out[3]) {
    const double f11 = 1.0 + t * dyxx, f12 = t * dyxy;
    const double f21 = t * dyyx, f22 = 1.0 + t * dyyy;
    const double det = f11 * f22 - f12 * f21;
    if (det <= 0.0)
        throw SolverError("extension_energy: det(DF_t) <= 0, t out of range");
    // DF^-1 = [f22 -f12; -f21 f11] / det; A = det * DF^-1 DF^-T
    out[0] = (f22 * f22 + f12 * f12) / det;
    out[1] = -(f21 * f22 + f11 * f12) / det;
    out[2] = (f21 * f21 + f11 * f11) / det;
}

// Per-cell 4x4 element matrices of the form sum_gp w <A grad phi_a, grad phi_b>.
std::vector<std::array<double, 16>> element_matrices(const FemMesh& mesh, double t,
                                                     const Deformation& def, int threads) {
    const Grid& g = *mesh.g;
    const int nx = g.n[0];
    const double h = g.h;
    std::vector<std::array<double, 16>> elems(mesh.cells.size());
    parallel_for(static_cast<int>(mesh.cells.size()), threads, [&](int b, int e) {
        for (int ci = b; ci < e; ++ci) {
            const int a = mesh.cells[static_cast<std::size_t>(ci)];
            const int corner[4] = {a, a + 1, a + nx + 1, a + nx};
            auto& K = elems[static_cast<std::size_t>(ci)];
            K.fill(0.0);
            for (const auto& gp : kGp) {
                double gx[4], gy[4];
                basis_grad(gp[0], gp[1], gx, gy);
                // DY at the Gauss point from the nodal field
                double dyxx = 0, dyxy = 0, dyyx = 0, dyyy = 0;
                for (int q = 0; q < 4; ++q) {
                    const double yxq = def.yx[corner[q]];
                    const double yyq = def.yy[corner[q]];
                    dyxx += yxq * gx[q];
                    dyxy += yxq * gy[q];
                    dyyx += yyq * gx[q];
                    dyyy += yyq * gy[q];
                }
                dyxx /= h; dyxy /= h; dyyx /= h; dyyy /= h;
                double A[3];
                pullback_matrix(t, dyxx, dyxy, dyyx, dyyy, A);
                const double w = h * h / 4.0; // gp weight
                for (int r = 0; r < 4; ++r)
                    for (int c = 0; c < 4; ++c) {
                        const double brx = gx[r] / h, bry = gy[r] / h;
                        const double bcx = gx[c] / h, bcy = gy[c] / h;
                        K[static_cast<std::size_t>(4 * r + c)] +=
                            w * (brx * (A[0] * bcx + A[1] * bcy) + bry * (A[1] * bcx + A[2] * bcy));
                    }
            }
        }
    });
    return elems;
}

// y = K x over the mesh (x, y full lattice fields; non-mesh nodes untouched).
// Even/odd cell-row passes keep the scatter race-free and deterministic.
void apply_K(const FemMesh& mesh, const std::vector<std::array<double, 16>>& elems,
             const std::vector<double>& x, std::vector<double>& y, int threads) {
    const int nx = mesh.g->n[0];
    std::fill(y.begin(), y.end(), 0.0);
    const int nrows = static_cast<int>(mesh.rows.size());
    for (int parity = 0; parity < 2; ++parity) {
        std::vector<int> rows_sel;
        for (int r = 0; r < nrows; ++r)
            if (mesh.rows[static_cast<std::size_t>(r)] % 2 == parity) rows_sel.push_back(r);
        parallel_for(static_cast<int>(rows_sel.size()), threads, [&](int b, int e) {
            for (int ri = b; ri < e; ++ri) {
                const int r = rows_sel[static_cast<std::size_t>(ri)];
                for (int ci = mesh.cell_rows_begin[static_cast<std::size_t>(r)];
                     ci < mesh.cell_rows_begin[static_cast<std::size_t>(r) + 1]; ++ci) {
                    const int a = mesh.cells[static_cast<std::size_t>(ci)];
                    const int corner[4] = {a, a + 1, a + nx + 1, a + nx};
                    const auto& K = elems[static_cast<std::size_t>(ci)];
                    const double xv[4] = {x[static_cast<std::size_t>(corner[0])],
                                          x[static_cast<std::size_t>(corner[1])],
                                          x[static_cast<std::size_t>(corner[2])],
                                          x[static_cast<std::size_t>(corner[3])]};
                    for (int rr = 0; rr < 4; ++rr) {
                        double s = 0.0;
                        for (int cc = 0; cc < 4; ++cc)
                            s += K[static_cast<std::size_t>(4 * rr + cc)] * xv[cc];
                        y[static_cast<std::size_t>(corner[rr])] += s;
                    }
                }
            }
        });
    }
}

double quad_energy(const FemMesh& mesh, const std::vector<std::array<double, 16>>& elems,
                   const std::vector<double>& x, int threads) {
    const int nx = mesh.g->n[0];
    return parallel_sum(static_cast<int>(mesh.cells.size()), threads, [&](int b, int e) {
        double s = 0.0;
        for (int ci = b; ci < e; ++ci) {
            const int a = mesh.cells[static_cast<std::size_t>(ci)];
            const int corner[4] = {a, a + 1, a + nx + 1, a + nx};
            const auto& K = elems[static_cast<std::size_t>(ci)];
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c)
                    s += x[static_cast<std::size_t>(corner[r])] *
                         K[static_cast<std::size_t>(4 * r + c)] *
                         x[static_cast<std::size_t>(corner[c])];
        }
        return s;
    });
}

} // namespace

double extension_energy(const ShapeCase& sc, double t, const Deformation& def,
                        ScalarField* out_u, double cg_tol, int threads) {
    require(static_cast<bool>(sc.grid) && sc.grid->dim == 2, "extension_energy: 2D grid required");
    require(static_cast<bool>(sc.phi), "extension_energy: missing boundary data");
    const Grid& g = *sc.grid;
    const FemMesh mesh(g, sc.s_mask);
    require(!mesh.cells.empty(), "extension_energy: empty domain");
    const auto elems = element_matrices(mesh, t, def, threads);

    // full-lattice solution vector: Dirichlet values at non-DOF mesh nodes
    std::vector<double> u(static_cast<std::size_t>(g.nodes()), 0.0);
    std::vector<int> dofs;
    for (int i = 0; i < g.nodes(); ++i) {
        if (!mesh.is_node[static_cast<std::size_t>(i)]) continue;
        if (mesh.is_dof[static_cast<std::size_t>(i)]) {
            dofs.push_back(i);
        } else {
            const auto p = g.pos(i);
            u[static_cast<std::size_t>(i)] = sc.phi(p[0], p[1]);
        }
    }
    if (out_u && out_u->grid) {
        // warm start from a previous solve on the same grid
        for (int i : dofs) u[static_cast<std::size_t>(i)] = (*out_u)[i];
    }

    // CG on K u = 0 over the DOFs
    std::vector<double> r(u.size()), p(u.size(), 0.0), Ap(u.size());
    apply_K(mesh, elems, u, r, threads);
    for (int i : dofs) r[static_cast<std::size_t>(i)] = -r[static_cast<std::size_t>(i)];
    double rr = 0.0;
    for (int i : dofs) {
        const double v = r[static_cast<std::size_t>(i)];
        p[static_cast<std::size_t>(i)] = v;
        rr += v * v;
    }
    const int max_iter = 20000;
    for (int it = 0; it < max_iter; ++it) {
        double rinf = 0.0;
        for (int i : dofs) rinf = std::max(rinf, std::abs(r[static_cast<std::size_t>(i)]));
        if (rinf <= cg_tol) break;
        apply_K(mesh, elems, p, Ap, threads);
        double pAp = 0.0;
        for (int i : dofs) pAp += p[static_cast<std::size_t>(i)] * Ap[static_cast<std::size_t>(i)];
        if (pAp <= 0.0) throw SolverError("extension_energy: CG breakdown");
        const double alpha = rr / pAp;
        for (int i : dofs) {
            u[static_cast<std::size_t>(i)] += alpha * p[static_cast<std::size_t>(i)];
            r[static_cast<std::size_t>(i)] -= alpha * Ap[static_cast<std::size_t>(i)];
        }
        double rr2 = 0.0;
        for (int i : dofs) rr2 += r[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i)];
        const double beta = rr2 / rr;
        rr = rr2;
        for (int i : dofs)
            p[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(i)] +
                                             beta * p[static_cast<std::size_t>(i)];
    }
    if (out_u) {
        if (!out_u->grid) *out_u = ScalarField(sc.grid);
        out_u->v = u;
    }
    return quad_energy(mesh, elems, u, threads);
}

double volume_form_derivative(const ScalarField& u, const ShapeCase& sc, const Deformation& def,
                              int threads) {
    const Grid& g = *sc.grid;
    const FemMesh mesh(g, sc.s_mask);
    const int nx = g.n[0];
    const double h = g.h;
    return parallel_sum(static_cast<int>(mesh.cells.size()), threads, [&](int b, int e) {
        double s = 0.0;
        for (int ci = b; ci < e; ++ci) {
            const int a = mesh.cells[static_cast<std::size_t>(ci)];
            const int corner[4] = {a, a + 1, a + nx + 1, a + nx};
            for (const auto& gp : kGp) {
                double gx[4], gy[4];
                basis_grad(gp[0], gp[1], gx, gy);
                double dyxx = 0, dyxy = 0, dyyx = 0, dyyy = 0, ux = 0, uy = 0;
                for (int q = 0; q < 4; ++q) {
                    const double yxq = def.yx[corner[q]];
                    const double yyq = def.yy[corner[q]];
                    const double uq = u[corner[q]];
                    dyxx += yxq * gx[q];
                    dyxy += yxq * gy[q];
                    dyyx += yyq * gx[q];
                    dyyy += yyq * gy[q];
                    ux += uq * gx[q];
                    uy += uq * gy[q];
                }
                dyxx /= h; dyxy /= h; dyyx /= h; dyyy /= h;
                ux /= h; uy /= h;
                const double div = dyxx + dyyy;
                // M = div Y Id - (DY + DY^T)
                const double mxx = div - 2 * dyxx;
                const double mxy = -(dyxy + dyyx);
                const double myy = div - 2 * dyyy;
                const double w = h * h / 4.0;
                s += w * (ux * (mxx * ux + mxy * uy) + uy * (mxy * ux + myy * uy));
            }
        }
        return s;
    });
}

double boundary_form_derivative(const ScalarField& u, const Deformation& def,
                                const std::vector<Polyline>& boundary, double contour_eps,
                                int window, bool* flagged) {
    int total = 0, untrusted = 0;
    double acc = 0.0;
    for (const auto& pl : boundary) {
        if (pl.size() < 2 * window + 2) continue;
        std::vector<BoundaryPointMeasure> ms(static_cast<std::size_t>(pl.size()));
        for (int v = 0; v < pl.size(); ++v)
            ms[static_cast<std::size_t>(v)] =
                measure_boundary_point(u, pl, v, window, contour_eps, 0.1 * contour_eps);
        const int nseg = pl.closed ? pl.size() : pl.size() - 1;
        for (int v = 0; v < nseg; ++v) {
            const auto& m0 = ms[static_cast<std::size_t>(v)];
            const auto& m1 = ms[static_cast<std::size_t>((v + 1) % pl.size())];
            if (!m0.valid || !m1.valid) continue;
            auto f = [&](const BoundaryPointMeasure& m) {
                const double yx = sample(def.yx, m.x[0], m.x[1]);
                const double yy = sample(def.yy, m.x[0], m.x[1]);
                return -(yx * m.nu[0] + yy * m.nu[1]) * m.dnu * m.dnu;
            };
            const double f0 = f(m0), f1 = f(m1);
            if (f0 != 0.0 || f1 != 0.0) {
                ++total;
                if (!m0.trusted || !m1.trusted) ++untrusted;
            }
            const double len = std::hypot(m1.x[0] - m0.x[0], m1.x[1] - m0.x[1]);
            acc += 0.5 * (f0 + f1) * len;
        }
    }
    if (flagged) *flagged = total > 0 && untrusted > total / 5;
    return acc;
}

} // namespace segreg
