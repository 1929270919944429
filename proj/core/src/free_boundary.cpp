#include "segreg/free_boundary.hpp"
#include "segreg/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace segreg {

double normal_derivative(const ScalarField& u, std::array<double, 2> x0,
                         std::array<double, 2> nu, bool* trusted, double support_eps,
                         double level) {
    const double h = u.grid->h;
    const double u0 = std::isnan(level) ? sample(u, x0[0], x0[1]) : level;
    const double u1 = sample(u, x0[0] - h * nu[0], x0[1] - h * nu[1]);
    const double u2 = sample(u, x0[0] - 2 * h * nu[0], x0[1] - 2 * h * nu[1]);
    const double d = (-3.0 * u0 + 4.0 * u1 - u2) / (2.0 * h);
    if (trusted) {
        bool ok = d > 0.0;
        for (int t = 1; t <= 3 && ok; ++t) {
            const double ut = sample(u, x0[0] - t * h * nu[0], x0[1] - t * h * nu[1]);
            if (ut <= support_eps) ok = false;
        }
        *trusted = ok;
    }
    return std::abs(d);
}

namespace {

double slope_scale(const ScalarField& u) {
    const Grid& g = *u.grid;
    double m = 0.0;
    for (int iy = 0; iy < g.n[1]; ++iy)
        for (int ix = 0; ix + 1 < g.n[0]; ++ix) {
            const int id = g.index(ix, iy);
            if (g.interior[id] || g.interior[id + 1])
                m = std::max(m, std::abs(u[id + 1] - u[id]) / g.h);
        }
    if (g.dim == 2)
        for (int iy = 0; iy + 1 < g.n[1]; ++iy)
            for (int ix = 0; ix < g.n[0]; ++ix) {
                const int id = g.index(ix, iy);
                if (g.interior[id] || g.interior[id + g.n[0]])
                    m = std::max(m, std::abs(u[id + g.n[0]] - u[id]) / g.h);
            }
    return m;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return (n % 2) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

BoundaryPointMeasure measure_boundary_point(const ScalarField& u, const Polyline& pl,
                                            int vertex, int window, double eps,
                                            double support_eps) {
    BoundaryPointMeasure m;
    const int n = pl.size();
    if (!pl.closed && (vertex - window < 0 || vertex + window >= n)) return m;
    if (pl.closed && n < 2 * window + 1) return m;
    const auto lg = local_geometry(pl, vertex, window);
    const auto x_eps = pl.pts[static_cast<std::size_t>(vertex)];
    bool trusted = false;
    const double dnu_eps = normal_derivative(u, x_eps, lg.normal, &trusted, support_eps, eps);
    if (dnu_eps <= 0.0) return m;
    const double h = u.grid->h;
    double d = eps / dnu_eps;
    d = std::clamp(d, 0.0, 3.0 * h);
    const double chi0 = lg.curvature / (1.0 + d * lg.curvature);

    // Slope from an anchor two cells deeper: on solved fields the first cells
    // inside the level curve still see the staircase of the discrete zero set,
    // which biases the one-sided fit. The deeper sample is transported back
    // with the same parallel-curve factor.
    double dnu0 = dnu_eps * (1.0 - d * chi0);
    const double t0 = 2.0 * h;
    const std::array<double, 2> anchor{x_eps[0] - t0 * lg.normal[0],
                                       x_eps[1] - t0 * lg.normal[1]};
    bool deep_trusted = false;
    const double dnu_deep = normal_derivative(u, anchor, lg.normal, &deep_trusted, support_eps);
    if (deep_trusted && dnu_deep > 0.0) {
        const double D = d + t0;
        dnu0 = dnu_deep * (1.0 - D * chi0);
    }

    m.valid = true;
    m.trusted = trusted;
    m.x = {x_eps[0] + d * lg.normal[0], x_eps[1] + d * lg.normal[1]};
    m.nu = lg.normal;
    m.chi = lg.degenerate ? 0.0 : chi0;
    m.dnu = dnu0;
    return m;
}

std::vector<FreeBoundarySample> sample_free_boundary(const DensityVector& state,
                                                     const FbOptions& opt) {
    const Grid& g = state.grid();
    require(g.dim == 2, "sample_free_boundary: 2D only");
    const double h = g.h;
    const int window = opt.window > 0 ? opt.window
                                      : std::max(4, static_cast<int>(std::ceil(0.25 / h)));
    const double match_tol = opt.match_factor * h;

    // per-component eps levels and contours
    std::vector<double> eps(static_cast<std::size_t>(state.k), 0.0);
    std::vector<std::vector<Polyline>> contours(static_cast<std::size_t>(state.k));
    for (int c = 0; c < state.k; ++c) {
        const double s = slope_scale(state.fields[static_cast<std::size_t>(c)]);
        eps[static_cast<std::size_t>(c)] = opt.contour_eps_factor * h * std::max(s, 1e-12);
        contours[static_cast<std::size_t>(c)] =
            extract_contour(state.fields[static_cast<std::size_t>(c)], eps[static_cast<std::size_t>(c)]);
    }

    std::vector<FreeBoundarySample> out;
    for (int c = 0; c < state.k; ++c) {
        const ScalarField& u = state.fields[static_cast<std::size_t>(c)];
        const double supp_eps = 0.1 * eps[static_cast<std::size_t>(c)];
        int budget = opt.max_samples_per_comp;
        for (const auto& pl : contours[static_cast<std::size_t>(c)]) {
            if (pl.size() < 2 * window + 1) continue;
            const int lo = pl.closed ? 0 : window;
            const int hi = pl.closed ? pl.size() : pl.size() - window;
            const int count = hi - lo;
            if (count <= 0) continue;
            const int stride = std::max(1, count / std::max(1, budget));
            for (int v = lo; v < hi; v += stride) {
                const auto& p = pl.pts[static_cast<std::size_t>(v)];
                if (!g.strictly_inside_omega(p[0], p[1], opt.omega_margin)) continue;
                const auto m = measure_boundary_point(u, pl, v, window,
                                                      eps[static_cast<std::size_t>(c)], supp_eps);
                if (!m.valid) continue;

                FreeBoundarySample s;
                s.comp = c;
                s.x0 = m.x;
                s.nu = m.nu;
                s.chi = m.chi;
                s.dnu = m.dnu;
                s.dnu_trusted = m.trusted;
                s.y0 = {s.x0[0] + s.nu[0], s.x0[1] + s.nu[1]};

                // matching: the component whose contour passes near y0
                int best_j = -1;
                double best_d = std::numeric_limits<double>::infinity();
                int best_pl = -1, best_vtx = -1;
                int hits = 0;
                for (int j = 0; j < state.k; ++j) {
                    if (j == c) continue;
                    double dj = std::numeric_limits<double>::infinity();
                    int plj = -1, vj = -1;
                    for (std::size_t q = 0; q < contours[static_cast<std::size_t>(j)].size(); ++q) {
                        const auto& cj = contours[static_cast<std::size_t>(j)][q];
                        for (int w = 0; w < cj.size(); ++w) {
                            const auto& pj = cj.pts[static_cast<std::size_t>(w)];
                            const double dx = pj[0] - s.y0[0], dy = pj[1] - s.y0[1];
                            const double d2 = dx * dx + dy * dy;
                            if (d2 < dj * dj) {
                                dj = std::sqrt(d2);
                                plj = static_cast<int>(q);
                                vj = w;
                            }
                        }
                    }
                    if (dj <= match_tol + 2 * h) { // slack for the eps-level offset of j
                        ++hits;
                        if (dj < best_d) {
                            best_d = dj;
                            best_j = j;
                            best_pl = plj;
                            best_vtx = vj;
                        }
                    }
                }
                if (hits > 1) s.unique_ok = false;
                if (best_j >= 0) {
                    const auto& cj = contours[static_cast<std::size_t>(best_j)]
                                             [static_cast<std::size_t>(best_pl)];
                    const auto mj = measure_boundary_point(
                        state.fields[static_cast<std::size_t>(best_j)], cj, best_vtx, window,
                        eps[static_cast<std::size_t>(best_j)],
                        0.1 * eps[static_cast<std::size_t>(best_j)]);
                    if (mj.valid) {
                        const double gap = std::hypot(mj.x[0] - s.x0[0], mj.x[1] - s.x0[1]);
                        if (std::abs(gap - 1.0) <= match_tol) {
                            s.matched = true;
                            s.matched_comp = best_j;
                            s.chi_j = mj.chi;
                            s.dnu_j = mj.dnu;
                            s.match_gap = gap - 1.0;
                            s.dnu_trusted = s.dnu_trusted && mj.trusted;
                            // normals across the gap must oppose
                            if (s.nu[0] * mj.nu[0] + s.nu[1] * mj.nu[1] > -0.7) s.unique_ok = false;
                        }
                    }
                }
                out.push_back(s);
                if (--budget <= 0) break;
            }
            if (budget <= 0) break;
        }
    }
    return out;
}

ConditionReport verify_condition(std::vector<FreeBoundarySample>& samples, const FbOptions& opt) {
    ConditionReport rep;
    rep.tol = opt.tol_fb;
    rep.n_samples = static_cast<int>(samples.size());

    // the aggregate medians use the canonical pair direction (comp < matched
    // comp); per-sample relative errors are orientation-comparable and use all
    std::vector<double> rel_err, lhs_all, rhs_curved, unsquared;
    for (auto& s : samples) {
        if (!s.matched) continue;
        ++rep.n_matched;
        if (!s.dnu_trusted) {
            ++rep.n_untrusted;
            continue;
        }
        if (!s.unique_ok) {
            ++rep.n_unique_violations;
            continue;
        }
        if (s.chi > 1.0 - opt.delta || s.chi_j > 1.0 - opt.delta) {
            ++rep.n_excluded_curvature;
            continue;
        }
        if (s.dnu_j <= 0.0) continue;

        const bool flat_i = std::abs(s.chi) <= opt.chi_floor;
        const bool flat_j = std::abs(s.chi_j) <= opt.chi_floor;
        if (flat_i != flat_j) {
            // the condition asserts chi_i != 0 iff chi_j != 0
            s.inconsistent = true;
            ++rep.n_inconsistent;
            continue;
        }
        s.lhs = (s.dnu / s.dnu_j) * (s.dnu / s.dnu_j);
        if (flat_i) {
            s.flat = true;
            s.rhs = 1.0;
            ++rep.n_flat;
        } else {
            s.rhs = std::abs(s.chi / s.chi_j);
        }
        s.admitted = true;
        ++rep.n_admitted;
        rel_err.push_back(std::abs(s.lhs - s.rhs) / s.rhs);
        if (s.comp < s.matched_comp) {
            lhs_all.push_back(s.lhs);
            if (!s.flat) rhs_curved.push_back(s.rhs);
            unsquared.push_back(s.dnu / s.dnu_j);
        }
    }

    rep.median_rel_err = median_of(rel_err);
    rep.median_lhs = median_of(lhs_all);
    rep.median_rhs_curved = median_of(rhs_curved);
    rep.median_unsquared = median_of(unsquared);
    if (rep.n_admitted < opt.min_matched) {
        rep.insufficient = true;
        rep.note = "fewer than " + std::to_string(opt.min_matched) + " admitted samples";
        return rep;
    }
    rep.pass = rep.median_rel_err <= opt.tol_fb;
    return rep;
}

} // namespace segreg
