#include "segreg/analysis.hpp"
#include "segreg/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace segreg {

const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "PASS";
        case CheckStatus::Fail: return "FAIL";
        case CheckStatus::NotApplicable: return "NOT_APPLICABLE";
        case CheckStatus::Insufficient: return "INSUFFICIENT_DATA";
    }
    return "?";
}

std::vector<SupportSet> support_masks(const DensityVector& state, double eps,
                                      const DiskStencil* st) {
    require(eps >= 0.0, "support_masks: eps must be nonnegative");
    const Grid& g = state.grid();
    std::vector<SupportSet> out;
    out.reserve(static_cast<std::size_t>(state.k));
    for (int c = 0; c < state.k; ++c) {
        const ScalarField& u = state.fields[static_cast<std::size_t>(c)];
        SupportSet s;
        s.comp = c;
        s.threshold = eps;
        s.mask.assign(static_cast<std::size_t>(g.nodes()), 0);
        for (int i = 0; i < g.nodes(); ++i)
            if (g.omega1[i] && u[i] > eps) s.mask[static_cast<std::size_t>(i)] = 1;
        for (int iy = 0; iy < g.n[1]; ++iy)
            for (int ix = 0; ix < g.n[0]; ++ix) {
                const int id = g.index(ix, iy);
                if (!s.mask[static_cast<std::size_t>(id)]) continue;
                bool bdry = false;
                if (ix == 0 || !s.mask[static_cast<std::size_t>(id - 1)]) bdry = true;
                if (ix == g.n[0] - 1 || !s.mask[static_cast<std::size_t>(id + 1)]) bdry = true;
                if (g.dim == 2) {
                    if (iy == 0 || !s.mask[static_cast<std::size_t>(id - g.n[0])]) bdry = true;
                    if (iy == g.n[1] - 1 || !s.mask[static_cast<std::size_t>(id + g.n[0])]) bdry = true;
                }
                if (bdry) s.boundary.push_back(id);
            }
        if (st) {
            const ScalarField phi = convolve_square(u, *st);
            const double eps_phi = eps * eps * ((g.dim == 1) ? 2.0 : M_PI);
            std::vector<std::uint8_t> low(static_cast<std::size_t>(g.nodes()), 0);
            for (int i = 0; i < g.nodes(); ++i)
                if (!g.omega1[i] || phi[i] <= eps_phi) low[static_cast<std::size_t>(i)] = 1;
            const auto d = distance_to_set(g, low);
            s.d_mask.assign(static_cast<std::size_t>(g.nodes()), 0);
            s.c_mask.assign(static_cast<std::size_t>(g.nodes()), 0);
            for (int i = 0; i < g.nodes(); ++i) {
                if (!g.omega[i]) continue;
                if (d[static_cast<std::size_t>(i)] > 1.0) s.d_mask[static_cast<std::size_t>(i)] = 1;
                else if (d[static_cast<std::size_t>(i)] < 1.0) s.c_mask[static_cast<std::size_t>(i)] = 1;
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

bool is_free_boundary_node(const Grid& g, int id, double omega_margin) {
    const auto p = g.pos(id);
    return g.strictly_inside_omega(p[0], p[1], omega_margin);
}

} // namespace

CheckRecord check_exact_distance(const Grid& g, const std::vector<SupportSet>& supports,
                                 double tol_dist, double omega_margin) {
    CheckRecord rec;
    rec.name = "exact_distance";
    rec.tolerance = tol_dist;

    std::vector<int> nonempty;
    for (std::size_t c = 0; c < supports.size(); ++c)
        if (!mask_empty(supports[c].mask)) nonempty.push_back(static_cast<int>(c));
    if (nonempty.size() < 2) {
        rec.status = CheckStatus::NotApplicable;
        rec.note = "fewer than 2 nonempty supports";
        return rec;
    }

    std::vector<std::vector<double>> dists(supports.size());
    for (int c : nonempty) dists[static_cast<std::size_t>(c)] =
        distance_to_set(g, supports[static_cast<std::size_t>(c)].mask);

    // any support pair closer than 1 - tol?
    double min_pair = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < nonempty.size(); ++a)
        for (std::size_t b = a + 1; b < nonempty.size(); ++b) {
            const auto d = dist_between_masks(g, supports[static_cast<std::size_t>(nonempty[a])].mask,
                                              supports[static_cast<std::size_t>(nonempty[b])].mask);
            if (d) min_pair = std::min(min_pair, *d);
        }

    // every free-boundary node has some other support within 1 + tol
    double worst = 0.0;
    std::array<double, 2> worst_pos{0, 0};
    int tested = 0;
    for (int ci : nonempty) {
        const auto& s = supports[static_cast<std::size_t>(ci)];
        for (int id : s.boundary) {
            if (!is_free_boundary_node(g, id, omega_margin)) continue;
            ++tested;
            double dmin = std::numeric_limits<double>::infinity();
            for (int cj : nonempty) {
                if (cj == ci) continue;
                dmin = std::min(dmin, dists[static_cast<std::size_t>(cj)][static_cast<std::size_t>(id)]);
            }
            if (dmin > worst) {
                worst = dmin;
                worst_pos = g.pos(id);
            }
        }
    }
    if (tested == 0) {
        rec.status = CheckStatus::NotApplicable;
        rec.note = "no free-boundary nodes inside the margin";
        return rec;
    }
    rec.measured = worst - 1.0; // excess over the exact distance
    rec.worst_locations.push_back(worst_pos);
    const bool near_ok = worst <= 1.0 + tol_dist;
    const bool sep_ok = min_pair >= 1.0 - tol_dist;
    rec.status = (near_ok && sep_ok) ? CheckStatus::Pass : CheckStatus::Fail;
    if (!sep_ok)
        rec.note = "supports closer than 1: min pair distance " + std::to_string(min_pair);
    else
        rec.note = "max over boundary nodes of the nearest-other-support distance, minus 1";
    return rec;
}

CheckRecord check_exterior_sphere(const Grid& g, const DensityVector& state,
                                  const SupportSet& support, double eps,
                                  double omega_margin, int max_samples) {
    CheckRecord rec;
    rec.name = "exterior_sphere_c" + std::to_string(support.comp);
    rec.tolerance = 0.0;
    if (support.boundary.empty()) {
        rec.status = CheckStatus::NotApplicable;
        rec.note = "empty boundary";
        return rec;
    }
    const double h = g.h;
    const auto dist_supp = distance_to_set(g, support.mask);

    // total density above eps, for the lens test
    std::vector<std::uint8_t> any(static_cast<std::size_t>(g.nodes()), 0);
    for (int i = 0; i < g.nodes(); ++i) {
        for (int c = 0; c < state.k; ++c)
            if (state.fields[static_cast<std::size_t>(c)][i] > eps) {
                any[static_cast<std::size_t>(i)] = 1;
                break;
            }
    }

    std::vector<int> candidates;
    for (int id : support.boundary)
        if (is_free_boundary_node(g, id, omega_margin)) candidates.push_back(id);
    if (candidates.empty()) {
        rec.status = CheckStatus::NotApplicable;
        rec.note = "no free-boundary nodes inside the margin";
        return rec;
    }
    const int stride = std::max(1, static_cast<int>(candidates.size()) / max_samples);

    const double ball_r = 1.0 - h / 2; // discrete open unit ball
    int tested = 0, failed = 0;
    std::array<double, 2> first_fail{0, 0};
    for (std::size_t s = 0; s < candidates.size(); s += static_cast<std::size_t>(stride)) {
        const int id = candidates[s];
        ++tested;
        const auto p0 = g.pos(id);

        // outward normal estimate from the support distance gradient around x0
        double gx = 0.0, gy = 0.0;
        {
            const int ix = id % g.n[0], iy = id / g.n[0];
            auto dval = [&](int jx, int jy) {
                if (!g.in_lattice(jx, jy)) return 0.0;
                const double d = dist_supp[static_cast<std::size_t>(g.index(jx, jy))];
                return std::isfinite(d) ? d : 0.0;
            };
            gx = dval(ix + 2, iy) - dval(ix - 2, iy);
            if (g.dim == 2) gy = dval(ix, iy + 2) - dval(ix, iy - 2);
        }
        const double gn = std::sqrt(gx * gx + gy * gy);
        const double base = (gn > 0) ? std::atan2(gy, gx) : 0.0;

        bool found = false;
        const int ndir = (g.dim == 1) ? 2 : 64;
        for (int di = 0; di < ndir && !found; ++di) {
            // fan ordered by closeness to the normal estimate
            double ang;
            if (g.dim == 1) {
                ang = (di == 0) ? ((gx >= 0) ? 0.0 : M_PI) : ((gx >= 0) ? M_PI : 0.0);
            } else {
                const int off = (di + 1) / 2 * ((di % 2) ? 1 : -1);
                ang = base + off * (2.0 * M_PI / 64.0);
            }
            const double nxv = std::cos(ang), nyv = (g.dim == 2) ? std::sin(ang) : 0.0;
            for (double rad : {1.0, 1.0 - h, 1.0 + h, 1.0 - 2 * h, 1.0 + 2 * h}) {
                const double cx = p0[0] + rad * nxv, cy = p0[1] + rad * nyv;
                // ball center must keep the unit ball clear of S_i
                const double fc = (cx - g.origin[0]) / h;
                const double fy = (g.dim == 2) ? (cy - g.origin[1]) / h : 0.0;
                const int icx = static_cast<int>(std::lround(fc));
                const int icy = static_cast<int>(std::lround(fy));
                if (!g.in_lattice(icx, g.dim == 2 ? icy : 0)) continue;
                const double dc = dist_supp[static_cast<std::size_t>(g.index(icx, g.dim == 2 ? icy : 0))];
                if (dc < ball_r - h) continue; // node-snapped center: allow h slack
                // lens test: every component vanishes on B1(c) n B1(x0)
                bool clean = true;
                const int r_cells = static_cast<int>(std::ceil(ball_r / h));
                const int lx0 = std::max(0, static_cast<int>(std::floor((std::min(p0[0], cx) - ball_r - g.origin[0]) / h)));
                const int lx1 = std::min(g.n[0] - 1, lx0 + 2 * r_cells + static_cast<int>(std::ceil(1.0 / h)) + 2);
                int ly0 = 0, ly1 = 0;
                if (g.dim == 2) {
                    ly0 = std::max(0, static_cast<int>(std::floor((std::min(p0[1], cy) - ball_r - g.origin[1]) / h)));
                    ly1 = std::min(g.n[1] - 1, ly0 + 2 * r_cells + static_cast<int>(std::ceil(1.0 / h)) + 2);
                }
                for (int jy = ly0; jy <= ly1 && clean; ++jy)
                    for (int jx = lx0; jx <= lx1; ++jx) {
                        const double qx = g.x(jx), qy = g.y(jy);
                        const double d0x = qx - p0[0], d0y = qy - p0[1];
                        if (d0x * d0x + d0y * d0y >= ball_r * ball_r) continue;
                        const double dcx = qx - cx, dcy = qy - cy;
                        if (dcx * dcx + dcy * dcy >= ball_r * ball_r) continue;
                        if (any[static_cast<std::size_t>(g.index(jx, jy))]) {
                            clean = false;
                            break;
                        }
                    }
                if (clean) {
                    found = true;
                    break;
                }
            }
        }
        if (!found) {
            if (failed == 0) first_fail = p0;
            ++failed;
        }
    }
    rec.measured = static_cast<double>(failed);
    rec.note = std::to_string(tested) + " boundary nodes sampled";
    if (failed > 0) rec.worst_locations.push_back(first_fail);
    rec.status = failed == 0 ? CheckStatus::Pass : CheckStatus::Fail;
    return rec;
}

LipschitzEstimate lipschitz_estimate(const ScalarField& u, const SupportSet& support,
                                     double margin, double band) {
    const Grid& g = *u.grid;
    LipschitzEstimate est;

    // sup |du|/h over edges whose endpoints sit inside the probe window
    for (int iy = 0; iy < g.n[1]; ++iy)
        for (int ix = 0; ix < g.n[0]; ++ix) {
            const int id = g.index(ix, iy);
            const auto p = g.pos(id);
            if (!g.strictly_inside_omega(p[0], p[1], margin)) continue;
            if (ix + 1 < g.n[0] && g.strictly_inside_omega(p[0] + g.h, p[1], margin))
                est.sup_gradient = std::max(est.sup_gradient, std::abs(u[id + 1] - u[id]) / g.h);
            if (g.dim == 2 && iy + 1 < g.n[1] && g.strictly_inside_omega(p[0], p[1] + g.h, margin))
                est.sup_gradient = std::max(est.sup_gradient, std::abs(u[id + g.n[0]] - u[id]) / g.h);
        }

    // near-boundary growth: smallest C with u(x) <= C dist(x, dS)
    std::vector<std::uint8_t> complement(static_cast<std::size_t>(g.nodes()), 0);
    for (int i = 0; i < g.nodes(); ++i)
        complement[static_cast<std::size_t>(i)] = support.mask[static_cast<std::size_t>(i)] ? 0 : 1;
    if (!mask_empty(complement) && !mask_empty(support.mask)) {
        const auto d = distance_to_set(g, complement);
        for (int i = 0; i < g.nodes(); ++i) {
            if (!support.mask[static_cast<std::size_t>(i)]) continue;
            const auto p = g.pos(i);
            if (!g.strictly_inside_omega(p[0], p[1], margin)) continue;
            const double di = d[static_cast<std::size_t>(i)];
            if (di <= 0.0 || di > band) continue;
            est.growth_constant = std::max(est.growth_constant, std::abs(u[i]) / di);
            ++est.samples;
        }
    }
    return est;
}

double harmonic_residual(const ScalarField& u, const SupportSet& support, ProblemTag tag,
                         double lambda) {
    const Grid& g = *u.grid;
    const auto eroded = erode_mask(g, support.mask, 2);
    double worst = 0.0;
    for (int iy = 0; iy < g.n[1]; ++iy)
        for (int ix = 0; ix < g.n[0]; ++ix) {
            const int id = g.index(ix, iy);
            if (!eroded[static_cast<std::size_t>(id)] || !g.interior[id]) continue;
            const double lap = laplacian_at(u, ix, iy);
            const double r = (tag == ProblemTag::A) ? lap : lap + lambda * u[id];
            worst = std::max(worst, std::abs(r));
        }
    return worst;
}

CheckRecord subharmonic_check(const ScalarField& u, ProblemTag tag, double lambda, double tol) {
    const Grid& g = *u.grid;
    CheckRecord rec;
    rec.name = "subharmonic";
    rec.tolerance = tol;
    double worst = 0.0;
    std::array<double, 2> pos{0, 0};
    for (int iy = 0; iy < g.n[1]; ++iy)
        for (int ix = 0; ix < g.n[0]; ++ix) {
            const int id = g.index(ix, iy);
            if (!g.interior[id]) continue;
            const double lap = laplacian_at(u, ix, iy);
            const double lhs = (tag == ProblemTag::A) ? lap : lap + lambda * u[id];
            const double viol = -lhs; // violation when lap u < -lambda u
            if (viol > worst) {
                worst = viol;
                pos = g.pos(id);
            }
        }
    rec.measured = worst;
    rec.status = worst <= tol ? CheckStatus::Pass : CheckStatus::Fail;
    if (worst > tol) rec.worst_locations.push_back(pos);
    return rec;
}

std::vector<double> default_box_scales(double h) {
    std::vector<double> scales;
    for (double s = 4 * h; s <= 0.5 + 1e-12; s *= 2.0) scales.push_back(s);
    return scales;
}

BoxCountResult box_counting(const Grid& g, const std::vector<int>& boundary_nodes,
                            const std::vector<double>& scales) {
    BoxCountResult res;
    if (static_cast<int>(boundary_nodes.size()) < 16 || scales.size() < 3) {
        res.insufficient = true;
        return res;
    }
    std::vector<double> lx, ly;
    for (double s : scales) {
        std::map<std::pair<long, long>, bool> boxes;
        for (int id : boundary_nodes) {
            const auto p = g.pos(id);
            const long bx = static_cast<long>(std::floor(p[0] / s));
            const long by = (g.dim == 2) ? static_cast<long>(std::floor(p[1] / s)) : 0;
            boxes[{bx, by}] = true;
        }
        lx.push_back(std::log(1.0 / s));
        ly.push_back(std::log(static_cast<double>(boxes.size())));
    }
    const auto n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double denom = n * sxx - sx * sx;
    res.dimension = (n * sxy - sx * sy) / denom;
    const double icpt = (sy - res.dimension * sx) / n;
    for (std::size_t i = 0; i < lx.size(); ++i)
        res.residual = std::max(res.residual,
                                std::abs(ly[i] - (icpt + res.dimension * lx[i])));
    res.scales_used = static_cast<int>(lx.size());
    return res;
}

} // namespace segreg
