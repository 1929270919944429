#include "segreg/linear_solve.hpp"
#include "segreg/common.hpp"
#include "segreg/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace segreg {

namespace {

// y = (-lap x) restricted to DOFs, with x read as 0 outside the DOF set.
// Operating on packed DOF vectors keeps CG kernels dense.
struct MaskedLaplacian {
    const Grid* g = nullptr;
    std::vector<int> nodes;     // DOF linear indices
    std::vector<int> pack;      // lattice index -> packed index (-1 outside)
    int threads = 1;

    MaskedLaplacian(const Grid& grid, const std::vector<std::uint8_t>& dof, int nthreads)
        : g(&grid), threads(nthreads) {
        pack.assign(static_cast<std::size_t>(grid.nodes()), -1);
        for (int i = 0; i < grid.nodes(); ++i)
            if (dof[static_cast<std::size_t>(i)]) {
                const int ix = i % grid.n[0], iy = i / grid.n[0];
                require(ix > 0 && ix < grid.n[0] - 1 &&
                            (grid.dim == 1 || (iy > 0 && iy < grid.n[1] - 1)),
                        "MaskedLaplacian: DOF node on the lattice border");
                pack[static_cast<std::size_t>(i)] = static_cast<int>(nodes.size());
                nodes.push_back(i);
            }
    }

    int size() const { return static_cast<int>(nodes.size()); }

    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        const int nx = g->n[0];
        const double inv_h2 = 1.0 / (g->h * g->h);
        const int twod = 2 * g->dim;
        parallel_for(size(), threads, [&](int b, int e) {
            for (int p = b; p < e; ++p) {
                const int id = nodes[static_cast<std::size_t>(p)];
                double s = twod * x[static_cast<std::size_t>(p)];
                const int l = pack[static_cast<std::size_t>(id - 1)];
                const int r = pack[static_cast<std::size_t>(id + 1)];
                if (l >= 0) s -= x[static_cast<std::size_t>(l)];
                if (r >= 0) s -= x[static_cast<std::size_t>(r)];
                if (g->dim == 2) {
                    const int d = pack[static_cast<std::size_t>(id - nx)];
                    const int u = pack[static_cast<std::size_t>(id + nx)];
                    if (d >= 0) s -= x[static_cast<std::size_t>(d)];
                    if (u >= 0) s -= x[static_cast<std::size_t>(u)];
                }
                y[static_cast<std::size_t>(p)] = s * inv_h2;
            }
        });
    }

    // rhs induced by the fixed boundary values around the DOF set (+ f).
    std::vector<double> rhs(const ScalarField& u, const ScalarField* f) const {
        const int nx = g->n[0];
        const double inv_h2 = 1.0 / (g->h * g->h);
        std::vector<double> b(static_cast<std::size_t>(size()), 0.0);
        for (int p = 0; p < size(); ++p) {
            const int id = nodes[static_cast<std::size_t>(p)];
            double s = f ? (*f)[id] : 0.0;
            auto bdry = [&](int nb) {
                if (pack[static_cast<std::size_t>(nb)] < 0) s += u[nb] * inv_h2;
            };
            bdry(id - 1);
            bdry(id + 1);
            if (g->dim == 2) {
                bdry(id - nx);
                bdry(id + nx);
            }
            b[static_cast<std::size_t>(p)] = s;
        }
        return b;
    }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Plain CG on the packed system; result written back through `x`.
int cg(const MaskedLaplacian& A, const std::vector<double>& b, std::vector<double>& x,
       double tol_inf, int max_iter) {
    const int n = A.size();
    std::vector<double> r(static_cast<std::size_t>(n)), p, Ap(static_cast<std::size_t>(n));
    A.apply(x, Ap);
    for (int i = 0; i < n; ++i)
        r[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)] - Ap[static_cast<std::size_t>(i)];
    p = r;
    double rr = dot(r, r);
    int it = 0;
    for (; it < max_iter; ++it) {
        double rinf = 0.0;
        for (double v : r) rinf = std::max(rinf, std::abs(v));
        if (rinf <= tol_inf) break;
        A.apply(p, Ap);
        const double pAp = dot(p, Ap);
        if (pAp <= 0.0) throw SolverError("cg: operator lost positive definiteness");
        const double alpha = rr / pAp;
        for (int i = 0; i < n; ++i) {
            x[static_cast<std::size_t>(i)] += alpha * p[static_cast<std::size_t>(i)];
            r[static_cast<std::size_t>(i)] -= alpha * Ap[static_cast<std::size_t>(i)];
        }
        const double rr_new = dot(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (int i = 0; i < n; ++i)
            p[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(i)] + beta * p[static_cast<std::size_t>(i)];
    }
    return it;
}

} // namespace

int solve_poisson(ScalarField& u, const std::vector<std::uint8_t>& dof,
                  const ScalarField* f, double tol_inf, int max_iter, int threads) {
    const MaskedLaplacian A(*u.grid, dof, threads);
    if (A.size() == 0) return 0;
    const auto b = A.rhs(u, f);
    std::vector<double> x(static_cast<std::size_t>(A.size()));
    for (int p = 0; p < A.size(); ++p)
        x[static_cast<std::size_t>(p)] = u[A.nodes[static_cast<std::size_t>(p)]];
    const int iters = cg(A, b, x, tol_inf, max_iter);
    for (int p = 0; p < A.size(); ++p)
        u[A.nodes[static_cast<std::size_t>(p)]] = x[static_cast<std::size_t>(p)];
    return iters;
}

double inverse_power_smallest(ScalarField& u, const std::vector<std::uint8_t>& dof,
                              double tol, int max_outer, int threads) {
    const Grid& g = *u.grid;
    const MaskedLaplacian A(g, dof, threads);
    require(A.size() > 0, "inverse_power_smallest: empty DOF set");
    const double hd = (g.dim == 1) ? g.h : g.h * g.h;

    std::vector<double> x(static_cast<std::size_t>(A.size()), 0.0);
    for (int p = 0; p < A.size(); ++p)
        x[static_cast<std::size_t>(p)] = u[A.nodes[static_cast<std::size_t>(p)]];
    double nrm = std::sqrt(hd * dot(x, x));
    if (nrm == 0.0) {
        std::fill(x.begin(), x.end(), 1.0);
        nrm = std::sqrt(hd * dot(x, x));
    }
    for (auto& v : x) v /= nrm;

    double lambda = 0.0;
    std::vector<double> y = x, Ax(x.size());
    for (int outer = 0; outer < max_outer; ++outer) {
        // Solve A y = x, warm-started with the previous iterate.
        cg(A, x, y, 1e-12 * std::max(1.0, 1.0 / hd), 20000);
        double ny = std::sqrt(hd * dot(y, y));
        for (auto& v : y) v /= ny;
        A.apply(y, Ax);
        const double lam = hd * dot(y, Ax);
        const double shift = std::abs(lam - lambda);
        lambda = lam;
        x = y;
        if (shift <= tol * std::max(1.0, lambda) && outer > 0) break;
    }
    for (int p = 0; p < A.size(); ++p)
        u[A.nodes[static_cast<std::size_t>(p)]] = x[static_cast<std::size_t>(p)];
    return lambda;
}

} // namespace segreg
