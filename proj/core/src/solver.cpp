#include "segreg/solver.hpp"
#include "segreg/common.hpp"
#include "segreg/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace segreg {

std::vector<double> BetaSchedule::stages() const {
    require(beta0 > 0.0, "BetaSchedule: beta0 must be positive");
    require(ratio > 1.0, "BetaSchedule: ratio must exceed 1");
    require(beta_max >= beta0, "BetaSchedule: beta_max below beta0");
    std::vector<double> out;
    for (double b = beta0; b < beta_max * (1.0 - 1e-12); b *= ratio) out.push_back(b);
    out.push_back(beta_max);
    return out;
}

void project_state(DensityVector& state) {
    const Grid& g = state.grid();
    for (int c = 0; c < state.k; ++c) {
        ScalarField& u = state.fields[static_cast<std::size_t>(c)];
        if (state.problem == ProblemTag::A) {
            const ScalarField& f = state.dirichlet_data[static_cast<std::size_t>(c)];
            for (int i = 0; i < g.nodes(); ++i) {
                if (g.interior[i]) {
                    if (u[i] < 0.0) u[i] = 0.0;
                } else {
                    u[i] = g.omega1[i] ? f[i] : 0.0;
                }
            }
        } else {
            for (int i = 0; i < g.nodes(); ++i) {
                if (!g.interior[i]) u[i] = 0.0;
                else if (u[i] < 0.0) u[i] = 0.0;
            }
            const double m = l2_mass(u);
            if (m <= 0.0) throw SolverError("project_state: component collapsed to zero mass");
            const double s = 1.0 / std::sqrt(m);
            for (auto& v : u.v) v *= s;
        }
    }
    if (state.problem == ProblemTag::B) state.normalized = true;
}

namespace {

double sup_projected_gradient(const DensityVector& state, const std::vector<ScalarField>& grad) {
    const Grid& g = state.grid();
    double m = 0.0;
    for (int c = 0; c < state.k; ++c) {
        const ScalarField& u = state.fields[static_cast<std::size_t>(c)];
        const ScalarField& gc = grad[static_cast<std::size_t>(c)];
        for (int i = 0; i < g.nodes(); ++i) {
            if (!g.interior[i]) continue;
            double v = gc[i];
            if (u[i] <= 0.0 && v > 0.0) v = 0.0; // clamp-active node, KKT residual 0
            m = std::max(m, std::abs(v));
        }
    }
    return m;
}

void tangent_project(const DensityVector& state, std::vector<ScalarField>& grad) {
    for (int c = 0; c < state.k; ++c) {
        const ScalarField& u = state.fields[static_cast<std::size_t>(c)];
        ScalarField& gc = grad[static_cast<std::size_t>(c)];
        const double uu = l2_inner(u, u);
        if (uu <= 0.0) continue;
        const double gu = l2_inner(gc, u);
        const double a = gu / uu;
        for (std::size_t i = 0; i < gc.v.size(); ++i) gc.v[i] -= a * u.v[i];
    }
}

double state_dist2(const DensityVector& a, const DensityVector& b) {
    const Grid& g = a.grid();
    const double hd = (g.dim == 1) ? g.h : g.h * g.h;
    double s = 0.0;
    for (int c = 0; c < a.k; ++c) {
        const auto& ua = a.fields[static_cast<std::size_t>(c)].v;
        const auto& ub = b.fields[static_cast<std::size_t>(c)].v;
        for (std::size_t i = 0; i < ua.size(); ++i) {
            const double d = ua[i] - ub[i];
            s += d * d;
        }
    }
    return hd * s;
}

} // namespace

StageSummary descend_stage(DensityVector& state, double beta, const SolverConfig& cfg,
                           const DiskStencil& st, SolverTrace& trace, int level, int stage) {
    const Grid& g = state.grid();
    const int threads = std::max(1, cfg.threads);
    double step = cfg.step.step0 > 0.0 ? cfg.step.step0 : g.h * g.h / 4.0;
    const double step_cap = 1e4 * (g.h * g.h);

    auto phi = convolve_all(state, st, threads);
    EnergyBreakdown e = energy_with_phi(state, beta, phi, threads);
    if (trace.iters.empty() && trace.stages.empty()) trace.initial_penalty = e.penalty;

    StageSummary sum;
    sum.level = level;
    sum.stage = stage;
    sum.beta = beta;

    std::vector<ScalarField> grad;
    DensityVector trial = state;
    int stall = 0;
    int it = 0;
    for (; it < cfg.max_iters; ++it) {
        gradient_with_phi(state, beta, phi, grad, threads);
        if (state.problem == ProblemTag::B) tangent_project(state, grad);
        const double gn = sup_projected_gradient(state, grad);
        trace.iters.push_back({level, stage, beta, it, e.total, e.penalty, gn, step});
        if (gn <= cfg.tol_grad) {
            sum.converged = true;
            break;
        }

        bool accepted = false;
        std::vector<ScalarField> phi_t;
        EnergyBreakdown e_t;
        while (step >= 1e-14) {
            for (int c = 0; c < state.k; ++c) {
                auto& tv = trial.fields[static_cast<std::size_t>(c)].v;
                const auto& sv = state.fields[static_cast<std::size_t>(c)].v;
                const auto& gv = grad[static_cast<std::size_t>(c)].v;
                for (std::size_t i = 0; i < tv.size(); ++i) tv[i] = sv[i] - step * gv[i];
            }
            project_state(trial);
            phi_t = convolve_all(trial, st, threads);
            e_t = energy_with_phi(trial, beta, phi_t, threads);
            const double dec = cfg.step.armijo / step * state_dist2(trial, state);
            if (e_t.total <= e.total - dec) {
                accepted = true;
                break;
            }
            step *= cfg.step.shrink;
        }
        if (!accepted) {
            if (sup_projected_gradient(state, grad) <= 10 * cfg.tol_grad) {
                sum.converged = true;
                break;
            }
            throw SolverError("descend_stage: step underflow below 1e-14 at beta=" +
                              std::to_string(beta));
        }

        const double rel_drop = (e.total - e_t.total) / std::max(1.0, std::abs(e.total));
        for (int c = 0; c < state.k; ++c)
            state.fields[static_cast<std::size_t>(c)].v.swap(trial.fields[static_cast<std::size_t>(c)].v);
        state.normalized = trial.normalized;
        phi.swap(phi_t);
        e = e_t;
        step = std::min(step * cfg.step.grow, step_cap);

        if (rel_drop < cfg.tol_energy) {
            if (++stall >= 3) {
                ++it;
                break;
            }
        } else {
            stall = 0;
        }
    }

    sum.iters = it;
    sum.total = e.total;
    sum.penalty = e.penalty;
    for (int i = 0; i < state.k; ++i)
        for (int j = i + 1; j < state.k; ++j)
            sum.pair_overlap.push_back(overlap_with_phi(state.fields[static_cast<std::size_t>(i)],
                                                        phi[static_cast<std::size_t>(j)], threads));
    if (state.problem == ProblemTag::B)
        sum.rayleigh = e.dirichlet;
    trace.stages.push_back(sum);
    trace.final_penalty = e.penalty;
    return sum;
}

DensityVector initial_guess(const ProblemSpec& spec, std::shared_ptr<const Grid> grid,
                            const SolverConfig& cfg) {
    const Grid& g = *grid;
    require(spec.k >= 1, "initial_guess: k must be >= 1");

    DensityVector state;
    state.problem = spec.problem;
    state.k = spec.k;
    state.cost = spec.cost;
    state.fields.assign(static_cast<std::size_t>(spec.k), ScalarField(grid));

    if (spec.problem == ProblemTag::A) {
        require(static_cast<bool>(spec.data_fn), "initial_guess: problem A needs collar data");
        state.dirichlet_data.assign(static_cast<std::size_t>(spec.k), ScalarField(grid));
        // collar supports and pairwise feasibility
        std::vector<std::vector<std::uint8_t>> supp(static_cast<std::size_t>(spec.k));
        for (int c = 0; c < spec.k; ++c) {
            auto& f = state.dirichlet_data[static_cast<std::size_t>(c)];
            auto& sc = supp[static_cast<std::size_t>(c)];
            sc.assign(static_cast<std::size_t>(g.nodes()), 0);
            for (int i = 0; i < g.nodes(); ++i) {
                if (!g.omega1[i] || g.interior[i]) continue;
                const auto p = g.pos(i);
                const double v = spec.data_fn(c, p[0], p[1]);
                require(v >= 0.0, "initial_guess: collar data must be nonnegative");
                f[i] = v;
                if (v > 0.0) sc[static_cast<std::size_t>(i)] = 1;
            }
            // a component with vanishing data is legal: it stays identically 0
        }
        for (int i = 0; i < spec.k; ++i)
            for (int j = i + 1; j < spec.k; ++j) {
                const auto d = dist_between_masks(g, supp[static_cast<std::size_t>(i)],
                                                  supp[static_cast<std::size_t>(j)]);
                if (!d) continue; // an empty support never violates the constraint
                require(*d >= 1.0 - 1e-9,
                        "initial_guess: collar supports closer than 1 (dist=" +
                            std::to_string(*d) + ")");
            }

        // damped extension: amplitude * (1 - d/r)^+ with r chosen so that the
        // initial supports stay >= 1 + 2h apart
        for (int c = 0; c < spec.k; ++c) {
            double dmin = std::numeric_limits<double>::infinity();
            for (int j = 0; j < spec.k; ++j) {
                if (j == c) continue;
                const auto d = dist_between_masks(g, supp[static_cast<std::size_t>(c)],
                                                  supp[static_cast<std::size_t>(j)]);
                if (d) dmin = std::min(dmin, *d);
            }
            double r = std::isfinite(dmin) ? (dmin - 1.0) / 2.0 - g.h : 1.0;
            r = std::max(r, 2 * g.h);
            double amp = 0.0;
            for (int i = 0; i < g.nodes(); ++i)
                amp = std::max(amp, state.dirichlet_data[static_cast<std::size_t>(c)][i]);
            const auto dist = distance_to_set(g, supp[static_cast<std::size_t>(c)]);
            ScalarField& u = state.fields[static_cast<std::size_t>(c)];
            for (int i = 0; i < g.nodes(); ++i) {
                if (!g.interior[i]) continue;
                const double t = 1.0 - dist[static_cast<std::size_t>(i)] / r;
                double v = amp * std::max(0.0, t);
                if (cfg.jitter > 0.0)
                    v += cfg.jitter * amp * hash_unit(cfg.seed, static_cast<std::uint64_t>(i) * 131 + c);
                u[i] = v;
            }
        }
        project_state(state);
        return state;
    }

    // Problem B: seed placement + normalized bumps
    std::vector<std::array<double, 2>> seeds = spec.seeds;
    const auto not_omega = [&] {
        std::vector<std::uint8_t> m(static_cast<std::size_t>(g.nodes()));
        for (int i = 0; i < g.nodes(); ++i) m[static_cast<std::size_t>(i)] = g.omega[i] ? 0 : 1;
        return m;
    }();
    const auto d_boundary = distance_to_set(g, not_omega);
    if (seeds.empty()) {
        // farthest-point sampling: the first seed maximizes the boundary
        // distance, later ones maximize the distance to the chosen seeds over
        // nodes at least 2h inside; ties break on the smallest linear index
        for (int c = 0; c < spec.k; ++c) {
            int best = -1;
            double best_score = -1.0;
            for (int i = 0; i < g.nodes(); ++i) {
                if (!g.interior[i]) continue;
                if (d_boundary[static_cast<std::size_t>(i)] < 2 * g.h) continue;
                double score;
                if (seeds.empty()) {
                    score = d_boundary[static_cast<std::size_t>(i)];
                } else {
                    score = std::numeric_limits<double>::infinity();
                    const auto p = g.pos(i);
                    for (const auto& s : seeds) {
                        const double dx = p[0] - s[0], dy = p[1] - s[1];
                        score = std::min(score, std::sqrt(dx * dx + dy * dy));
                    }
                }
                if (score > best_score + 1e-12) {
                    best_score = score;
                    best = i;
                }
            }
            require(best >= 0, "initial_guess: no interior nodes for seed placement");
            seeds.push_back(g.pos(best));
        }
    }
    require(static_cast<int>(seeds.size()) == spec.k, "initial_guess: need k seed locations");

    for (int c = 0; c < spec.k; ++c) {
        double pair_min = std::numeric_limits<double>::infinity();
        for (int j = 0; j < spec.k; ++j) {
            if (j == c) continue;
            const double dx = seeds[static_cast<std::size_t>(c)][0] - seeds[static_cast<std::size_t>(j)][0];
            const double dy = seeds[static_cast<std::size_t>(c)][1] - seeds[static_cast<std::size_t>(j)][1];
            pair_min = std::min(pair_min, std::sqrt(dx * dx + dy * dy));
        }
        double rho = 0.45;
        if (std::isfinite(pair_min)) {
            require(pair_min >= 1.0 + 6 * g.h,
                    "initial_guess: seeds too close to host bumps at distance 1 + 2h");
            rho = std::min(rho, (pair_min - 1.0 - 2 * g.h) / 2.0);
        }
        rho = std::max(rho, 2 * g.h);
        ScalarField& u = state.fields[static_cast<std::size_t>(c)];
        for (int i = 0; i < g.nodes(); ++i) {
            if (!g.interior[i]) continue;
            const auto p = g.pos(i);
            const double dx = p[0] - seeds[static_cast<std::size_t>(c)][0];
            const double dy = p[1] - seeds[static_cast<std::size_t>(c)][1];
            const double d = std::sqrt(dx * dx + dy * dy);
            if (d >= rho) continue;
            const double t = std::cos(M_PI * d / (2 * rho));
            double v = t * t;
            if (cfg.jitter > 0.0)
                v = std::max(0.0, v + cfg.jitter * hash_unit(cfg.seed, static_cast<std::uint64_t>(i) * 131 + c));
            u[i] = v;
        }
        require(l2_mass(u) > 0.0, "initial_guess: bump for component " + std::to_string(c) +
                                      " misses the interior");
    }
    project_state(state);
    return state;
}

namespace {

DensityVector prolong(const DensityVector& coarse, const ProblemSpec& spec,
                      std::shared_ptr<const Grid> fine, const SolverConfig& cfg) {
    const Grid& g = *fine;
    DensityVector out;
    out.problem = coarse.problem;
    out.k = coarse.k;
    out.cost = coarse.cost;
    out.fields.assign(static_cast<std::size_t>(coarse.k), ScalarField(fine));
    if (coarse.problem == ProblemTag::A) {
        out.dirichlet_data.assign(static_cast<std::size_t>(coarse.k), ScalarField(fine));
        for (int c = 0; c < coarse.k; ++c) {
            auto& f = out.dirichlet_data[static_cast<std::size_t>(c)];
            for (int i = 0; i < g.nodes(); ++i) {
                if (!g.omega1[i] || g.interior[i]) continue;
                const auto p = g.pos(i);
                f[i] = spec.data_fn(c, p[0], p[1]);
            }
        }
    }
    for (int c = 0; c < coarse.k; ++c) {
        const ScalarField& uc = coarse.fields[static_cast<std::size_t>(c)];
        ScalarField& uf = out.fields[static_cast<std::size_t>(c)];
        for (int i = 0; i < g.nodes(); ++i) {
            if (!g.interior[i]) continue;
            const auto p = g.pos(i);
            uf[i] = sample(uc, p[0], p[1]);
        }
    }
    project_state(out);
    (void)cfg;
    return out;
}

std::shared_ptr<const Grid> coarsen(const Grid& fine, int factor) {
    GridSpec s = fine.spec;
    s.h = fine.h * factor;
    return std::make_shared<const Grid>(build_grid(s));
}

} // namespace

std::pair<DensityVector, SolverTrace> solve(const ProblemSpec& spec, const SolverConfig& cfg,
                                            const ResumePoint* resume,
                                            const StageCallback& on_stage) {
    require(static_cast<bool>(spec.grid), "solve: missing grid");
    SolverTrace trace;

    // level 0 = coarsest
    std::vector<std::shared_ptr<const Grid>> grids;
    grids.push_back(spec.grid);
    for (int l = 1; l < cfg.levels; ++l) {
        const double hc = grids.back()->h * 2.0;
        if (hc > 0.2) break; // stencil guard; stop coarsening
        try {
            grids.push_back(coarsen(*grids.back(), 2));
        } catch (const InvalidInput&) {
            break; // bounds not divisible by the coarser spacing
        }
    }
    std::reverse(grids.begin(), grids.end());

    const auto betas = cfg.beta.stages();
    const int nlev = static_cast<int>(grids.size());

    int start_level = 0;
    int resume_stage = -1;
    DensityVector state;
    if (resume) {
        require(resume->level >= 0 && resume->level < nlev, "solve: resume level out of range");
        start_level = resume->level;
        resume_stage = resume->stage;
        const auto grid = grids[static_cast<std::size_t>(start_level)];
        state = initial_guess(spec, grid, cfg); // data + masks, values overwritten below
        require(static_cast<int>(resume->field_values.size()) == spec.k,
                "solve: resume component count mismatch");
        for (int c = 0; c < spec.k; ++c) {
            require(resume->field_values[static_cast<std::size_t>(c)].size() ==
                        state.fields[static_cast<std::size_t>(c)].v.size(),
                    "solve: resume lattice mismatch");
            state.fields[static_cast<std::size_t>(c)].v =
                resume->field_values[static_cast<std::size_t>(c)];
        }
        project_state(state);
    } else {
        state = initial_guess(spec, grids.front(), cfg);
    }

    double prev_pen = -1.0;
    int non_decreasing = 0;
    for (int lev = start_level; lev < nlev; ++lev) {
        if (lev > start_level) state = prolong(state, spec, grids[static_cast<std::size_t>(lev)], cfg);
        StencilOptions sopt;
        sopt.relax_guard = grids[static_cast<std::size_t>(lev)]->h > 0.25;
        const DiskStencil st = build_stencil(grids[static_cast<std::size_t>(lev)]->h,
                                             grids[static_cast<std::size_t>(lev)]->dim, sopt);
        int first_stage = 0;
        if (lev > 0)
            first_stage = std::max(0, static_cast<int>(betas.size()) - std::max(1, cfg.fine_stage_tail));
        if (lev == start_level && resume_stage >= 0) first_stage = std::max(first_stage, resume_stage + 1);
        SolverConfig level_cfg = cfg;
        if (lev > 0 && cfg.max_iters_fine > 0)
            level_cfg.max_iters = std::min(cfg.max_iters, cfg.max_iters_fine);
        const int nstages = static_cast<int>(betas.size());
        const int rounds = (lev == nlev - 1) ? std::max(0, cfg.equilibrate_rounds) : 0;
        for (int s = first_stage; s < nstages + rounds; ++s) {
            const int stage = std::min(s, nstages - 1);
            if (cfg.bulk_refresh && !(lev == start_level && s == first_stage)) {
                hard_segregation_polish(state, cfg);
                project_state(state);
            }
            const auto sum = descend_stage(state, betas[static_cast<std::size_t>(stage)],
                                           level_cfg, st, trace, lev, s);
            if (on_stage) on_stage(lev, s, state);
            if (prev_pen >= 0.0 && sum.penalty > prev_pen && s < nstages) {
                if (++non_decreasing >= 3) trace.overlap_warning = true;
            } else {
                non_decreasing = 0;
            }
            prev_pen = sum.penalty;
        }
    }

    if (cfg.polish) {
        const auto pol = hard_segregation_polish(state, cfg, true);
        trace.polished = true;
        trace.polish_lambda = pol.lambda;
        trace.polish_pair_distance = pol.pair_distance;
    }
    return {std::move(state), std::move(trace)};
}

namespace {

// Re-solves component c on the given support and returns its objective
// contribution: the Dirichlet integral (A) or c_i * lambda (B).
double resolve_on_support(DensityVector& state, int c, const std::vector<std::uint8_t>& supp,
                          const SolverConfig& cfg, double* lambda_out) {
    const Grid& g = state.grid();
    const int threads = std::max(1, cfg.threads);
    ScalarField& u = state.fields[static_cast<std::size_t>(c)];
    std::vector<std::uint8_t> dof(static_cast<std::size_t>(g.nodes()), 0);
    for (int i = 0; i < g.nodes(); ++i)
        if (g.interior[i] && supp[static_cast<std::size_t>(i)]) dof[static_cast<std::size_t>(i)] = 1;

    if (state.problem == ProblemTag::A) {
        const ScalarField& f = state.dirichlet_data[static_cast<std::size_t>(c)];
        for (int i = 0; i < g.nodes(); ++i) {
            if (g.interior[i]) {
                if (!supp[static_cast<std::size_t>(i)]) u[i] = 0.0;
            } else {
                u[i] = g.omega1[i] ? f[i] : 0.0;
            }
        }
        solve_poisson(u, dof, nullptr, 1e-9, 100000, threads);
        if (lambda_out) *lambda_out = 0.0;
        return dirichlet_energy(u, threads);
    }
    for (int i = 0; i < g.nodes(); ++i)
        if (!dof[static_cast<std::size_t>(i)]) u[i] = 0.0;
    if (mask_empty(dof))
        throw SolverError("polish: empty support for component " + std::to_string(c));
    const double lam = inverse_power_smallest(u, dof, 1e-12, 60, threads);
    if (lambda_out) *lambda_out = lam;
    return state.cost.partial(c) * lam;
}

// One-ring advance of S_i toward S_j: dilate S_i into the interior (keeping
// distance 1 from every other component) and retreat S_j accordingly. Returns
// false when the move is geometrically impossible.
bool make_pair_move(const Grid& g, const DensityVector& state, int i, int j,
                    const std::vector<std::vector<std::uint8_t>>& supports,
                    std::vector<std::uint8_t>& si_out, std::vector<std::uint8_t>& sj_out) {
    const auto di = distance_to_set(g, supports[static_cast<std::size_t>(i)]);
    // bystander components keep their unit clearance
    std::vector<std::uint8_t> others(static_cast<std::size_t>(g.nodes()), 0);
    bool any_other = false;
    for (int l = 0; l < state.k; ++l) {
        if (l == i || l == j) continue;
        for (int n = 0; n < g.nodes(); ++n)
            if (supports[static_cast<std::size_t>(l)][static_cast<std::size_t>(n)]) {
                others[static_cast<std::size_t>(n)] = 1;
                any_other = true;
            }
    }
    std::vector<double> dother;
    if (any_other) dother = distance_to_set(g, others);

    si_out = supports[static_cast<std::size_t>(i)];
    bool grew = false;
    for (int n = 0; n < g.nodes(); ++n) {
        if (!g.interior[n] || si_out[static_cast<std::size_t>(n)]) continue;
        if (di[static_cast<std::size_t>(n)] > 1.01 * g.h) continue;
        if (any_other && dother[static_cast<std::size_t>(n)] < 1.0) continue;
        si_out[static_cast<std::size_t>(n)] = 1;
        grew = true;
    }
    if (!grew) return false;
    const auto d_new = distance_to_set(g, si_out);
    sj_out = supports[static_cast<std::size_t>(j)];
    for (int n = 0; n < g.nodes(); ++n) {
        if (!g.interior[n]) continue;
        if (sj_out[static_cast<std::size_t>(n)] && d_new[static_cast<std::size_t>(n)] < 1.0)
            sj_out[static_cast<std::size_t>(n)] = 0;
    }
    if (mask_empty(sj_out)) return false;
    const auto gap = dist_between_masks(g, si_out, sj_out);
    if (!gap || *gap < 1.0 - 1e-9) return false;
    return true;
}

} // namespace

PolishResult hard_segregation_polish(DensityVector& state, const SolverConfig& cfg, bool refine) {
    const Grid& g = state.grid();
    const int threads = std::max(1, cfg.threads);
    PolishResult res;
    res.supports.resize(static_cast<std::size_t>(state.k));
    res.eps.resize(static_cast<std::size_t>(state.k));

    for (int c = 0; c < state.k; ++c) {
        const ScalarField& u = state.fields[static_cast<std::size_t>(c)];
        const double eps = cfg.supp_factor * g.h * g.h * u.max_abs();
        res.eps[static_cast<std::size_t>(c)] = eps;
        auto& m = res.supports[static_cast<std::size_t>(c)];
        m.assign(static_cast<std::size_t>(g.nodes()), 0);
        for (int i = 0; i < g.nodes(); ++i)
            if (g.omega1[i] && u[i] > eps) m[static_cast<std::size_t>(i)] = 1;
    }

    // before beta has fully segregated the densities the thresholded sets can
    // interpenetrate; give contested interior nodes to the dominant component
    // so the erosion below retreats from the natural midline
    for (int i = 0; i < g.nodes(); ++i) {
        if (!g.interior[i]) continue;
        int owner = -1;
        double best = -1.0;
        int claims = 0;
        for (int c = 0; c < state.k; ++c) {
            if (!res.supports[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)]) continue;
            ++claims;
            const double v = state.fields[static_cast<std::size_t>(c)][i];
            if (v > best) {
                best = v;
                owner = c;
            }
        }
        if (claims > 1)
            for (int c = 0; c < state.k; ++c)
                if (c != owner)
                    res.supports[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)] = 0;
    }

    // symmetric erosion until every pair is >= 1 apart; only interior nodes move
    for (int round = 0; round < 12; ++round) {
        bool ok = true;
        for (int i = 0; i < state.k && ok; ++i)
            for (int j = i + 1; j < state.k && ok; ++j) {
                const auto d = dist_between_masks(g, res.supports[static_cast<std::size_t>(i)],
                                                  res.supports[static_cast<std::size_t>(j)]);
                if (d && *d < 1.0) ok = false;
            }
        if (ok) break;
        for (int i = 0; i < state.k; ++i)
            for (int j = i + 1; j < state.k; ++j) {
                auto& si = res.supports[static_cast<std::size_t>(i)];
                auto& sj = res.supports[static_cast<std::size_t>(j)];
                const auto dopt = dist_between_masks(g, si, sj);
                if (!dopt || *dopt >= 1.0) continue;
                const double cut = (1.0 + *dopt) / 2.0;
                const auto di = distance_to_set(g, sj);
                const auto dj = distance_to_set(g, si);
                for (int n = 0; n < g.nodes(); ++n) {
                    if (!g.interior[n]) continue;
                    if (si[static_cast<std::size_t>(n)] && di[static_cast<std::size_t>(n)] < cut)
                        si[static_cast<std::size_t>(n)] = 0;
                    if (sj[static_cast<std::size_t>(n)] && dj[static_cast<std::size_t>(n)] < cut)
                        sj[static_cast<std::size_t>(n)] = 0;
                }
            }
    }
    for (int i = 0; i < state.k; ++i)
        for (int j = i + 1; j < state.k; ++j) {
            const auto d = dist_between_masks(g, res.supports[static_cast<std::size_t>(i)],
                                              res.supports[static_cast<std::size_t>(j)]);
            res.pair_distance.push_back(d ? *d : std::numeric_limits<double>::infinity());
        }

    // linear re-solve on the fixed supports
    std::vector<double> obj(static_cast<std::size_t>(state.k), 0.0);
    std::vector<double> lambda(static_cast<std::size_t>(state.k), 0.0);
    for (int c = 0; c < state.k; ++c) {
        const bool empty = mask_empty(res.supports[static_cast<std::size_t>(c)]);
        if (empty && state.problem == ProblemTag::A) {
            // a data-free component stays identically zero
            ScalarField& u = state.fields[static_cast<std::size_t>(c)];
            std::fill(u.v.begin(), u.v.end(), 0.0);
            continue;
        }
        obj[static_cast<std::size_t>(c)] = resolve_on_support(
            state, c, res.supports[static_cast<std::size_t>(c)], cfg,
            &lambda[static_cast<std::size_t>(c)]);
    }

    // interface refinement: advance each facing front by one ring while the
    // segregated objective strictly decreases
    if (refine && state.k >= 2 && cfg.refine_rounds > 0) {
        for (int round = 0; round < cfg.refine_rounds; ++round) {
            bool improved = false;
            double best_gain = 1e-10;
            int best_i = -1, best_j = -1;
            std::vector<std::uint8_t> best_si, best_sj;
            std::vector<double> best_fields_i, best_fields_j;
            double best_obj_i = 0, best_obj_j = 0, best_lam_i = 0, best_lam_j = 0;
            for (int i = 0; i < state.k; ++i)
                for (int j = 0; j < state.k; ++j) {
                    if (i == j) continue;
                    if (mask_empty(res.supports[static_cast<std::size_t>(i)]) ||
                        mask_empty(res.supports[static_cast<std::size_t>(j)]))
                        continue;
                    std::vector<std::uint8_t> si, sj;
                    if (!make_pair_move(g, state, i, j, res.supports, si, sj)) continue;
                    DensityVector trial = state;
                    double lam_i = 0, lam_j = 0;
                    double oi, oj;
                    try {
                        oi = resolve_on_support(trial, i, si, cfg, &lam_i);
                        oj = resolve_on_support(trial, j, sj, cfg, &lam_j);
                    } catch (const SolverError&) {
                        continue;
                    }
                    const double gain = (obj[static_cast<std::size_t>(i)] +
                                         obj[static_cast<std::size_t>(j)]) - (oi + oj);
                    if (gain > best_gain) {
                        best_gain = gain;
                        best_i = i;
                        best_j = j;
                        best_si = std::move(si);
                        best_sj = std::move(sj);
                        best_fields_i = trial.fields[static_cast<std::size_t>(i)].v;
                        best_fields_j = trial.fields[static_cast<std::size_t>(j)].v;
                        best_obj_i = oi;
                        best_obj_j = oj;
                        best_lam_i = lam_i;
                        best_lam_j = lam_j;
                    }
                }
            if (best_i >= 0) {
                res.supports[static_cast<std::size_t>(best_i)] = std::move(best_si);
                res.supports[static_cast<std::size_t>(best_j)] = std::move(best_sj);
                state.fields[static_cast<std::size_t>(best_i)].v = std::move(best_fields_i);
                state.fields[static_cast<std::size_t>(best_j)].v = std::move(best_fields_j);
                obj[static_cast<std::size_t>(best_i)] = best_obj_i;
                obj[static_cast<std::size_t>(best_j)] = best_obj_j;
                lambda[static_cast<std::size_t>(best_i)] = best_lam_i;
                lambda[static_cast<std::size_t>(best_j)] = best_lam_j;
                improved = true;
            }
            if (!improved) break;
        }
        res.pair_distance.clear();
        for (int i = 0; i < state.k; ++i)
            for (int j = i + 1; j < state.k; ++j) {
                const auto d = dist_between_masks(g, res.supports[static_cast<std::size_t>(i)],
                                                  res.supports[static_cast<std::size_t>(j)]);
                res.pair_distance.push_back(d ? *d : std::numeric_limits<double>::infinity());
            }
    }

    if (state.problem == ProblemTag::B)
        res.lambda.assign(lambda.begin(), lambda.end());
    return res;
}

} // namespace segreg
