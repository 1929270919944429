#include "segreg/field.hpp"

#include <algorithm>
#include <cmath>

namespace segreg {

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

bool ScalarField::finite_on_omega1() const {
    for (int i = 0; i < size(); ++i)
        if (grid->omega1[i] && !std::isfinite(v[static_cast<std::size_t>(i)])) return false;
    return true;
}

double sample(const ScalarField& u, double px, double py) {
    const Grid& g = *u.grid;
    const double fx = (px - g.origin[0]) / g.h;
    double fy = 0.0;
    int iy = 0;
    double ty = 0.0;
    if (g.dim == 2) {
        fy = (py - g.origin[1]) / g.h;
        iy = static_cast<int>(std::floor(fy));
        ty = fy - iy;
    }
    const int ix = static_cast<int>(std::floor(fx));
    const double tx = fx - ix;

    auto val = [&](int i, int j) -> double {
        if (!g.in_lattice(i, g.dim == 2 ? j : 0)) return 0.0;
        return u[g.index(i, g.dim == 2 ? j : 0)];
    };
    if (g.dim == 1) return (1 - tx) * val(ix, 0) + tx * val(ix + 1, 0);
    const double v00 = val(ix, iy), v10 = val(ix + 1, iy);
    const double v01 = val(ix, iy + 1), v11 = val(ix + 1, iy + 1);
    return (1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10 + (1 - tx) * ty * v01 + tx * ty * v11;
}

double laplacian_at(const ScalarField& u, int ix, int iy) {
    const Grid& g = *u.grid;
    const int id = g.index(ix, iy);
    const double h2 = g.h * g.h;
    double acc = u[id - 1] + u[id + 1] - 2.0 * u[id];
    if (g.dim == 2) acc += u[id - g.n[0]] + u[id + g.n[0]] - 2.0 * u[id];
    return acc / h2;
}

void laplacian(const ScalarField& u, ScalarField& out) {
    const Grid& g = *u.grid;
    std::fill(out.v.begin(), out.v.end(), 0.0);
    for (int iy = 0; iy < g.n[1]; ++iy)
        for (int ix = 1; ix < g.n[0] - 1; ++ix) {
            if (g.dim == 2 && (iy == 0 || iy == g.n[1] - 1)) continue;
            const int id = g.index(ix, iy);
            if (!g.interior[id]) continue;
            out[id] = laplacian_at(u, ix, iy);
        }
}

double l2_mass(const ScalarField& u) {
    const Grid& g = *u.grid;
    const double hd = (g.dim == 1) ? g.h : g.h * g.h;
    double s = 0.0;
    for (double x : u.v) s += x * x;
    return hd * s;
}

double l2_inner(const ScalarField& a, const ScalarField& b) {
    const Grid& g = *a.grid;
    const double hd = (g.dim == 1) ? g.h : g.h * g.h;
    double s = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) s += a.v[i] * b.v[i];
    return hd * s;
}

} // namespace segreg
