#include "segreg/energy.hpp"
#include "segreg/common.hpp"
#include "segreg/parallel.hpp"

#include <cmath>

namespace segreg {

double CostSpec::value(const std::vector<double>& d) const {
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) s += partial(static_cast<int>(i)) * d[i];
    return s;
}

double CostSpec::partial(int i) const {
    if (weights.empty()) return 1.0;
    return weights[static_cast<std::size_t>(i)];
}

double dirichlet_energy(const ScalarField& u, int threads) {
    const Grid& g = *u.grid;
    const int nx = g.n[0], ny = g.n[1];
    // In 1D the edge weight is h^-1, in 2D h^0.
    const double we = (g.dim == 1) ? 1.0 / g.h : 1.0;

    double acc = parallel_sum(ny, threads, [&](int yb, int ye) {
        double s = 0.0;
        for (int iy = yb; iy < ye; ++iy) {
            for (int ix = 0; ix + 1 < nx; ++ix) {
                const int a = g.index(ix, iy);
                if (g.interior[a] || g.interior[a + 1]) {
                    const double d = u[a + 1] - u[a];
                    s += d * d;
                }
            }
            if (g.dim == 2 && iy + 1 < ny) {
                for (int ix = 0; ix < nx; ++ix) {
                    const int a = g.index(ix, iy);
                    if (g.interior[a] || g.interior[a + nx]) {
                        const double d = u[a + nx] - u[a];
                        s += d * d;
                    }
                }
            }
        }
        return s;
    });

    double skin = 0.0;
    for (const auto& [a, frac] : g.skin_edges_x) {
        const double d = u[a + 1] - u[a];
        skin += frac * d * d;
    }
    for (const auto& [a, frac] : g.skin_edges_y) {
        const double d = u[a + nx] - u[a];
        skin += frac * d * d;
    }
    return we * (acc + skin);
}

std::vector<ScalarField> convolve_all(const DensityVector& state, const DiskStencil& st, int threads) {
    std::vector<ScalarField> phi;
    phi.reserve(static_cast<std::size_t>(state.k));
    for (int i = 0; i < state.k; ++i)
        phi.push_back(convolve_square(state.fields[static_cast<std::size_t>(i)], st, threads));
    return phi;
}

EnergyBreakdown energy_with_phi(const DensityVector& state, double beta,
                                const std::vector<ScalarField>& phi, int threads, bool strict) {
    EnergyBreakdown e;
    e.beta = beta;
    e.dirichlet.resize(static_cast<std::size_t>(state.k));
    for (int i = 0; i < state.k; ++i)
        e.dirichlet[static_cast<std::size_t>(i)] =
            dirichlet_energy(state.fields[static_cast<std::size_t>(i)], threads);

    for (int i = 0; i < state.k; ++i)
        for (int j = i + 1; j < state.k; ++j)
            e.penalty += overlap_with_phi(state.fields[static_cast<std::size_t>(i)],
                                          phi[static_cast<std::size_t>(j)], threads);

    if (state.problem == ProblemTag::A) {
        double d = 0.0;
        for (double x : e.dirichlet) d += x;
        e.total = d + beta * e.penalty;
    } else {
        if (strict) {
            for (int i = 0; i < state.k; ++i) {
                const double m = l2_mass(state.fields[static_cast<std::size_t>(i)]);
                require(std::abs(m - 1.0) <= 1e-8,
                        "energy: problem B field not normalized in strict mode");
            }
        }
        e.cost_value = state.cost.value(e.dirichlet);
        e.total = e.cost_value + beta * e.penalty;
    }
    return e;
}

EnergyBreakdown energy(const DensityVector& state, double beta, const DiskStencil& st,
                       int threads, bool strict) {
    const auto phi = convolve_all(state, st, threads);
    return energy_with_phi(state, beta, phi, threads, strict);
}

void gradient_with_phi(const DensityVector& state, double beta,
                       const std::vector<ScalarField>& phi, std::vector<ScalarField>& out,
                       int threads) {
    const Grid& g = state.grid();
    const int nx = g.n[0], ny = g.n[1];
    out.resize(static_cast<std::size_t>(state.k));
    for (int c = 0; c < state.k; ++c) {
        auto& gc = out[static_cast<std::size_t>(c)];
        if (!gc.grid) gc = ScalarField(state.grid_ptr());
        const ScalarField& u = state.fields[static_cast<std::size_t>(c)];
        const double dF = (state.problem == ProblemTag::A) ? 1.0 : state.cost.partial(c);
        parallel_for(ny, threads, [&, c](int yb, int ye) {
            for (int iy = yb; iy < ye; ++iy)
                for (int ix = 0; ix < nx; ++ix) {
                    const int id = g.index(ix, iy);
                    if (!g.interior[id]) {
                        gc[id] = 0.0;
                        continue;
                    }
                    double phis = 0.0;
                    for (int j = 0; j < state.k; ++j)
                        if (j != c) phis += phi[static_cast<std::size_t>(j)][id];
                    gc[id] = -2.0 * dF * laplacian_at(u, ix, iy) + 2.0 * beta * u[id] * phis;
                }
        });
    }
}

std::vector<ScalarField> gradient(const DensityVector& state, double beta, const DiskStencil& st,
                                  int threads) {
    const auto phi = convolve_all(state, st, threads);
    std::vector<ScalarField> out;
    gradient_with_phi(state, beta, phi, out, threads);
    return out;
}

} // namespace segreg
