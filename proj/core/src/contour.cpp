#include "segreg/contour.hpp"
#include "segreg/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace segreg {

namespace {

// Edge ids: horizontal edge (ix, iy)-(ix+1, iy) -> 2*(iy*nx + ix),
// vertical edge (ix, iy)-(ix, iy+1) -> 2*(iy*nx + ix) + 1.
struct Segment {
    long from_edge = -1, to_edge = -1;
    std::array<double, 2> a{0, 0}, b{0, 0};
};

} // namespace

std::vector<Polyline> extract_contour(const ScalarField& u, double eps) {
    const Grid& g = *u.grid;
    require(g.dim == 2, "extract_contour: 2D only");
    const int nx = g.n[0], ny = g.n[1];

    std::vector<Segment> segs;
    std::map<long, int> start_of; // edge id -> segment starting there
    std::map<long, int> end_of;

    auto hedge = [&](int ix, int iy) { return 2L * (static_cast<long>(iy) * nx + ix); };
    auto vedge = [&](int ix, int iy) { return 2L * (static_cast<long>(iy) * nx + ix) + 1; };

    for (int iy = 0; iy + 1 < ny; ++iy)
        for (int ix = 0; ix + 1 < nx; ++ix) {
            const double f0 = u[g.index(ix, iy)] - eps;
            const double f1 = u[g.index(ix + 1, iy)] - eps;
            const double f2 = u[g.index(ix + 1, iy + 1)] - eps;
            const double f3 = u[g.index(ix, iy + 1)] - eps;
            const int code = (f0 > 0 ? 1 : 0) | (f1 > 0 ? 2 : 0) | (f2 > 0 ? 4 : 0) | (f3 > 0 ? 8 : 0);
            if (code == 0 || code == 15) continue;

            const double x0 = g.x(ix), y0 = g.y(iy);
            auto cross = [&](double fa, double fb, int axis, double bx, double by)
                -> std::array<double, 2> {
                double t = fa / (fa - fb);
                if (t < 0) t = 0;
                if (t > 1) t = 1;
                return axis == 0 ? std::array<double, 2>{bx + t * g.h, by}
                                 : std::array<double, 2>{bx, by + t * g.h};
            };
            // crossing points on the four cell edges
            const auto p_e0 = cross(f0, f1, 0, x0, y0);
            const auto p_e1 = cross(f1, f2, 1, x0 + g.h, y0);
            const auto p_e2 = cross(f3, f2, 0, x0, y0 + g.h);
            const auto p_e3 = cross(f0, f3, 1, x0, y0);
            const long e0 = hedge(ix, iy), e1 = vedge(ix + 1, iy);
            const long e2 = hedge(ix, iy + 1), e3 = vedge(ix, iy);

            auto emit = [&](long ea, std::array<double, 2> pa, long eb, std::array<double, 2> pb) {
                Segment s;
                s.from_edge = ea;
                s.to_edge = eb;
                s.a = pa;
                s.b = pb;
                const int idx = static_cast<int>(segs.size());
                segs.push_back(s);
                start_of[ea] = idx;
                end_of[eb] = idx;
            };

            // Directed so that {u > eps} stays on the left.
            switch (code) {
                case 1: emit(e0, p_e0, e3, p_e3); break;
                case 2: emit(e1, p_e1, e0, p_e0); break;
                case 4: emit(e2, p_e2, e1, p_e1); break;
                case 8: emit(e3, p_e3, e2, p_e2); break;
                case 14: emit(e3, p_e3, e0, p_e0); break;
                case 13: emit(e0, p_e0, e1, p_e1); break;
                case 11: emit(e1, p_e1, e2, p_e2); break;
                case 7: emit(e2, p_e2, e3, p_e3); break;
                case 3: emit(e1, p_e1, e3, p_e3); break;
                case 12: emit(e3, p_e3, e1, p_e1); break;
                case 6: emit(e2, p_e2, e0, p_e0); break;
                case 9: emit(e0, p_e0, e2, p_e2); break;
                case 5: {
                    const double center = 0.25 * (f0 + f1 + f2 + f3);
                    if (center > 0) {
                        emit(e0, p_e0, e1, p_e1);
                        emit(e2, p_e2, e3, p_e3);
                    } else {
                        emit(e0, p_e0, e3, p_e3);
                        emit(e2, p_e2, e1, p_e1);
                    }
                    break;
                }
                case 10: {
                    const double center = 0.25 * (f0 + f1 + f2 + f3);
                    if (center > 0) {
                        emit(e3, p_e3, e0, p_e0);
                        emit(e1, p_e1, e2, p_e2);
                    } else {
                        emit(e1, p_e1, e0, p_e0);
                        emit(e3, p_e3, e2, p_e2);
                    }
                    break;
                }
                default: break;
            }
        }

    std::vector<Polyline> out;
    std::vector<char> used(segs.size(), 0);
    for (std::size_t s0 = 0; s0 < segs.size(); ++s0) {
        if (used[s0]) continue;
        // walk backward to the chain start (stops at s0 again for loops)
        std::size_t first = s0;
        while (true) {
            const auto it = end_of.find(segs[first].from_edge);
            if (it == end_of.end() || used[static_cast<std::size_t>(it->second)] ||
                static_cast<std::size_t>(it->second) == s0)
                break;
            first = static_cast<std::size_t>(it->second);
        }
        Polyline pl;
        pl.pts.push_back(segs[first].a);
        std::size_t cur = first;
        while (true) {
            used[cur] = 1;
            pl.pts.push_back(segs[cur].b);
            const auto it = start_of.find(segs[cur].to_edge);
            if (it == start_of.end()) break; // boundary-terminated
            const auto nxt = static_cast<std::size_t>(it->second);
            if (nxt == first) {
                pl.closed = true;
                pl.pts.pop_back(); // closing vertex duplicates pts.front()
                break;
            }
            if (used[nxt]) break;
            cur = nxt;
        }
        if (pl.size() >= 2) out.push_back(std::move(pl));
    }
    return out;
}

LocalGeometry local_geometry(const Polyline& pl, int vertex, int window) {
    LocalGeometry lg;
    const int n = pl.size();
    require(window >= 1, "local_geometry: window must be >= 1");
    require(pl.closed ? n >= 2 * window + 1
                      : (vertex - window >= 0 && vertex + window < n),
            "local_geometry: not enough vertices around x0");

    auto at = [&](int j) -> std::array<double, 2> {
        int idx = j;
        if (pl.closed) idx = ((j % n) + n) % n;
        return pl.pts[static_cast<std::size_t>(idx)];
    };
    const auto p0 = at(vertex);
    const auto pm = at(vertex - window);
    const auto pp = at(vertex + window);

    double tx = pp[0] - pm[0], ty = pp[1] - pm[1];
    const double tn = std::sqrt(tx * tx + ty * ty);
    if (tn < 1e-300) {
        lg.degenerate = true;
        lg.normal = {1, 0};
        return lg;
    }
    tx /= tn;
    ty /= tn;
    // outward = right of the travel direction ({u > eps} is on the left)
    const double nx = ty, ny = -tx;

    // least-squares parabola v = a + b xi + c xi^2 in the chord frame
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, r0 = 0, r1 = 0, r2 = 0;
    for (int j = vertex - window; j <= vertex + window; ++j) {
        const auto p = at(j);
        const double dx = p[0] - p0[0], dy = p[1] - p0[1];
        const double xi = dx * tx + dy * ty;
        const double v = dx * nx + dy * ny;
        const double xi2 = xi * xi;
        s0 += 1;
        s1 += xi;
        s2 += xi2;
        s3 += xi2 * xi;
        s4 += xi2 * xi2;
        r0 += v;
        r1 += v * xi;
        r2 += v * xi2;
    }
    // solve the 3x3 normal equations by elimination
    double m[3][4] = {{s0, s1, s2, r0}, {s1, s2, s3, r1}, {s2, s3, s4, r2}};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        if (std::abs(m[piv][col]) < 1e-12) {
            lg.degenerate = true; // collinear within tolerance
            lg.normal = {nx, ny};
            lg.curvature = 0.0;
            return lg;
        }
        for (int c = 0; c < 4; ++c) std::swap(m[col][c], m[piv][c]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = m[r][col] / m[col][col];
            for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
        }
    }
    const double b = m[1][3] / m[1][1];
    const double c = m[2][3] / m[2][2];

    const double den = std::sqrt(1.0 + b * b);
    lg.curvature = -2.0 * c / (den * den * den);
    lg.normal = {(-b * tx + nx) / den, (-b * ty + ny) / den};
    return lg;
}

double polyline_min_distance(const Polyline& pl, std::array<double, 2> p) {
    double best = std::numeric_limits<double>::infinity();
    const int n = pl.size();
    const int nseg = pl.closed ? n : n - 1;
    for (int i = 0; i < nseg; ++i) {
        const auto& a = pl.pts[static_cast<std::size_t>(i)];
        const auto& b = pl.pts[static_cast<std::size_t>((i + 1) % n)];
        const double ex = b[0] - a[0], ey = b[1] - a[1];
        const double ee = ex * ex + ey * ey;
        double t = 0.0;
        if (ee > 0) t = std::clamp(((p[0] - a[0]) * ex + (p[1] - a[1]) * ey) / ee, 0.0, 1.0);
        const double dx = p[0] - (a[0] + t * ex), dy = p[1] - (a[1] + t * ey);
        best = std::min(best, std::sqrt(dx * dx + dy * dy));
    }
    return best;
}

} // namespace segreg
