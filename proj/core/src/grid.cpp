#include "segreg/grid.hpp"
#include "segreg/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace segreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1D squared distance transform (lower envelope of parabolas).
// f[i] holds the source cost (0 at sites, +inf elsewhere); d receives
// min_j (f[j] + (i-j)^2). Felzenszwalb & Huttenlocher.
void dt1d(const double* f, int n, double* d, int* v, double* z) {
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < n; ++q) {
        if (f[q] == kInf) continue;
        if (f[v[0]] == kInf && k == 0) {
            v[0] = q;
            continue;
        }
        double s = ((f[q] + q * double(q)) - (f[v[k]] + v[k] * double(v[k]))) / (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = ((f[q] + q * double(q)) - (f[v[k]] + v[k] * double(v[k]))) / (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    if (f[v[0]] == kInf) { // no site in this line
        for (int q = 0; q < n; ++q) d[q] = kInf;
        return;
    }
    int k2 = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k2 + 1] < q) ++k2;
        const double dq = q - double(v[k2]);
        d[q] = dq * dq + f[v[k2]];
    }
}

double box_fraction_inside(const Grid& g, double cx, double cy, double half_x, double half_y) {
    // 4x4 (4 in 1D) subsample of the dual cell against the analytic Omega test.
    int hits = 0, total = 0;
    if (g.dim == 1) {
        for (int i = 0; i < 4; ++i) {
            const double px = cx + half_x * ((2 * i + 1) / 4.0 - 1.0);
            ++total;
            if (g.inside_omega(px, 0.0)) ++hits;
        }
    } else {
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                const double px = cx + half_x * ((2 * i + 1) / 4.0 - 1.0);
                const double py = cy + half_y * ((2 * j + 1) / 4.0 - 1.0);
                ++total;
                if (g.inside_omega(px, py)) ++hits;
            }
    }
    return double(hits) / double(total);
}

} // namespace

bool Grid::inside_omega(double px, double py) const {
    const double tol = 1e-9 * h;
    if (spec.shape == DomainShape::Box) {
        if (px < spec.lo[0] - tol || px > spec.hi[0] + tol) return false;
        if (dim == 2 && (py < spec.lo[1] - tol || py > spec.hi[1] + tol)) return false;
        return true;
    }
    const double dx = px - spec.center[0];
    const double dy = (dim == 2) ? py - spec.center[1] : 0.0;
    const double r = std::sqrt(dx * dx + dy * dy);
    return r >= spec.r_inner - tol && r <= spec.r_outer + tol;
}

bool Grid::strictly_inside_omega(double px, double py, double margin) const {
    if (spec.shape == DomainShape::Box) {
        if (px < spec.lo[0] + margin || px > spec.hi[0] - margin) return false;
        if (dim == 2 && (py < spec.lo[1] + margin || py > spec.hi[1] - margin)) return false;
        return true;
    }
    const double dx = px - spec.center[0];
    const double dy = (dim == 2) ? py - spec.center[1] : 0.0;
    const double r = std::sqrt(dx * dx + dy * dy);
    return r > spec.r_inner + margin && r < spec.r_outer - margin;
}

double Grid::diameter() const {
    if (spec.shape == DomainShape::Annulus) return 2.0 * spec.r_outer;
    const double ex = spec.hi[0] - spec.lo[0];
    const double ey = (dim == 2) ? spec.hi[1] - spec.lo[1] : 0.0;
    return std::sqrt(ex * ex + ey * ey);
}

Grid build_grid(const GridSpec& spec) {
    require(spec.h > 0.0, "build_grid: spacing h must be positive");
    require(spec.dim == 1 || spec.dim == 2, "build_grid: dim must be 1 or 2");
    Grid g;
    g.spec = spec;
    g.dim = spec.dim;
    g.h = spec.h;
    const double h = spec.h;

    if (spec.shape == DomainShape::Annulus) {
        require(spec.dim == 2, "build_grid: annulus domains are 2D");
        require(spec.r_inner > 0.0 && spec.r_outer > spec.r_inner + 2 * h,
                "build_grid: degenerate annulus");
        g.spec.lo = {spec.center[0] - spec.r_outer, spec.center[1] - spec.r_outer};
        g.spec.hi = {spec.center[0] + spec.r_outer, spec.center[1] + spec.r_outer};
    } else {
        for (int a = 0; a < spec.dim; ++a)
            require(spec.hi[a] - spec.lo[a] >= 2 * h - 1e-12 * h,
                    "build_grid: interval shorter than 2h");
    }
    if (spec.require_partition_capacity)
        require(g.diameter() > 1.0 + 2 * h,
                "build_grid: domain diameter too small to host two supports at distance 1");

    // Lattice covers the bounding box inflated by ceil(1/h) cells per side.
    const int pad = static_cast<int>(std::ceil(1.0 / h - 1e-12));
    for (int a = 0; a < 2; ++a) {
        if (a >= spec.dim) {
            g.n[a] = 1;
            g.origin[a] = 0.0;
            continue;
        }
        const double len = g.spec.hi[a] - g.spec.lo[a];
        const int cells = static_cast<int>(std::llround(len / h));
        require(std::abs(cells * h - len) < 1e-6 * h,
                "build_grid: interval length must be a multiple of h");
        g.n[a] = cells + 1 + 2 * pad;
        g.origin[a] = g.spec.lo[a] - pad * h;
    }

    const int nn = g.nodes();
    g.omega.assign(nn, 0);
    g.interior.assign(nn, 0);
    for (int iy = 0; iy < g.n[1]; ++iy)
        for (int ix = 0; ix < g.n[0]; ++ix) {
            const int id = g.index(ix, iy);
            const double px = g.x(ix), py = g.y(iy);
            if (g.inside_omega(px, py)) g.omega[id] = 1;
            if (g.strictly_inside_omega(px, py, h / 2)) g.interior[id] = 1;
        }

    // Omega_1: strict "< 1" realized as "< 1 - h/2" so the collar is unambiguous.
    const auto d_omega = distance_to_set(g, g.omega);
    g.omega1.assign(nn, 0);
    g.collar.assign(nn, 0);
    for (int id = 0; id < nn; ++id) {
        if (g.omega[id] || d_omega[id] < 1.0 - h / 2) g.omega1[id] = 1;
        if (g.omega1[id] && !g.omega[id]) g.collar[id] = 1;
    }

    // Skin edges: both endpoints non-interior but the dual cell meets Omega.
    const auto add_skin = [&](bool along_x) {
        auto& out = along_x ? g.skin_edges_x : g.skin_edges_y;
        const int ex = along_x ? g.n[0] - 1 : g.n[0];
        const int ey = along_x ? g.n[1] : g.n[1] - 1;
        for (int iy = 0; iy < ey; ++iy)
            for (int ix = 0; ix < ex; ++ix) {
                const int a = g.index(ix, iy);
                const int b = along_x ? g.index(ix + 1, iy) : g.index(ix, iy + 1);
                if (g.interior[a] || g.interior[b]) continue;
                if (!g.omega1[a] || !g.omega1[b]) continue;
                const double cx = 0.5 * (g.x(ix) + (along_x ? g.x(ix + 1) : g.x(ix)));
                const double cy = 0.5 * (g.y(iy) + (along_x ? g.y(iy) : g.y(iy + 1)));
                const double hx = along_x ? h / 2 : h / 2;
                const double hy = (g.dim == 1) ? 0.0 : h / 2;
                const double frac = box_fraction_inside(g, cx, cy, hx, hy);
                if (frac > 0.0) out.emplace_back(a, frac);
            }
    };
    add_skin(true);
    if (g.dim == 2) add_skin(false);
    return g;
}

Grid build_grid(double xlo, double xhi, double h) {
    GridSpec s;
    s.dim = 1;
    s.lo = {xlo, 0.0};
    s.hi = {xhi, 0.0};
    s.h = h;
    return build_grid(s);
}

Grid build_grid(std::array<double, 2> lo, std::array<double, 2> hi, double h) {
    GridSpec s;
    s.dim = 2;
    s.lo = lo;
    s.hi = hi;
    s.h = h;
    return build_grid(s);
}

std::vector<double> distance_to_set(const Grid& g, const std::vector<std::uint8_t>& mask) {
    const int nx = g.n[0], ny = g.n[1];
    std::vector<double> sq(static_cast<std::size_t>(nx) * ny);
    for (int i = 0; i < nx * ny; ++i) sq[i] = mask[i] ? 0.0 : kInf;

    const int nmax = std::max(nx, ny);
    std::vector<double> f(nmax), d(nmax), z(nmax + 1);
    std::vector<int> v(nmax);

    // rows
    for (int iy = 0; iy < ny; ++iy) {
        double* row = sq.data() + static_cast<std::size_t>(iy) * nx;
        std::copy(row, row + nx, f.data());
        dt1d(f.data(), nx, d.data(), v.data(), z.data());
        std::copy(d.data(), d.data() + nx, row);
    }
    // columns
    if (ny > 1) {
        for (int ix = 0; ix < nx; ++ix) {
            for (int iy = 0; iy < ny; ++iy) f[iy] = sq[static_cast<std::size_t>(iy) * nx + ix];
            dt1d(f.data(), ny, d.data(), v.data(), z.data());
            for (int iy = 0; iy < ny; ++iy) sq[static_cast<std::size_t>(iy) * nx + ix] = d[iy];
        }
    }
    std::vector<double> out(sq.size());
    for (std::size_t i = 0; i < sq.size(); ++i)
        out[i] = (sq[i] == kInf) ? kInf : g.h * std::sqrt(sq[i]);
    return out;
}

std::optional<double> dist_between_masks(const Grid& g,
                                         const std::vector<std::uint8_t>& a,
                                         const std::vector<std::uint8_t>& b) {
    if (mask_empty(a) || mask_empty(b)) return std::nullopt;
    const auto db = distance_to_set(g, b);
    double best = kInf;
    for (int i = 0; i < g.nodes(); ++i)
        if (a[i] && db[i] < best) best = db[i];
    return best;
}

std::vector<std::uint8_t> erode_mask(const Grid& g, const std::vector<std::uint8_t>& mask, int rings) {
    std::vector<std::uint8_t> cur = mask;
    const int nx = g.n[0], ny = g.n[1];
    for (int r = 0; r < rings; ++r) {
        std::vector<std::uint8_t> next = cur;
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                const int id = g.index(ix, iy);
                if (!cur[id]) continue;
                bool keep = ix > 0 && ix < nx - 1 && cur[id - 1] && cur[id + 1];
                if (keep && g.dim == 2)
                    keep = iy > 0 && iy < ny - 1 && cur[id - nx] && cur[id + nx];
                if (g.dim == 1 && (ix == 0 || ix == nx - 1)) keep = false;
                if (!keep) next[id] = 0;
            }
        cur.swap(next);
    }
    return cur;
}

} // namespace segreg
