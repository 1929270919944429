#include "segreg/pipeline.hpp"
#include "segreg/analysis.hpp"
#include "segreg/common.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace segreg {

namespace fs = std::filesystem;

std::shared_ptr<const Grid> grid_from_config(const RunConfig& cfg) {
    GridSpec spec;
    spec.dim = cfg.dim;
    spec.h = cfg.h;
    spec.require_partition_capacity = cfg.k >= 2;
    if (cfg.shape == "annulus") {
        spec.shape = DomainShape::Annulus;
        spec.center = cfg.center;
        spec.r_inner = cfg.r_inner;
        spec.r_outer = cfg.r_outer;
    } else {
        spec.lo = cfg.lo;
        spec.hi = cfg.hi;
    }
    return std::make_shared<const Grid>(build_grid(spec));
}

ProblemSpec problem_from_config(const RunConfig& cfg, std::shared_ptr<const Grid> grid) {
    ProblemSpec spec;
    spec.grid = std::move(grid);
    spec.problem = cfg.problem;
    spec.k = cfg.k;
    if (cfg.problem == ProblemTag::B) {
        spec.seeds = cfg.seeds;
        spec.cost.weights = cfg.cost_weights;
        return spec;
    }
    const double tol = 1e-6 * cfg.h;
    if (cfg.data_kind == "two_slabs") {
        const double a = cfg.data_a, b = cfg.data_b;
        const double xl = cfg.lo[0], xr = cfg.hi[0];
        spec.data_fn = [a, b, xl, xr, tol](int c, double x, double) {
            if (c == 0) return x <= xl + tol ? a : 0.0;
            if (c == 1) return x >= xr - tol ? b : 0.0;
            return 0.0;
        };
    } else if (cfg.data_kind == "lifted_ramps") {
        const double a = cfg.data_a, b = cfg.data_b;
        const double xl = cfg.lo[0], xr = cfg.hi[0];
        const double s1 = cfg.data_s1, s2 = cfg.data_s2;
        require(s1 > xl && s2 < xr && s1 < s2, "lifted_ramps: need xmin < s1 < s2 < xmax");
        spec.data_fn = [a, b, xl, xr, s1, s2](int c, double x, double) {
            if (c == 0) return a * std::max(0.0, (s1 - x) / (s1 - xl));
            if (c == 1) return b * std::max(0.0, (x - s2) / (xr - s2));
            return 0.0;
        };
    } else if (cfg.data_kind == "annulus_rings") {
        // The circles are not lattice-aligned: fixed nodes reach up to h/2
        // inside Omega, so the rings must cover that band too (the data
        // function is only ever evaluated at non-interior nodes).
        const double a = cfg.data_a, b = cfg.data_b;
        const double ri = cfg.r_inner + cfg.h, ro = cfg.r_outer - cfg.h;
        const double cx = cfg.center[0], cy = cfg.center[1];
        spec.data_fn = [a, b, ri, ro, cx, cy](int c, double x, double y) {
            const double r = std::hypot(x - cx, y - cy);
            if (c == 0) return r <= ri ? a : 0.0;
            if (c == 1) return r >= ro ? b : 0.0;
            return 0.0;
        };
    } else {
        throw InvalidInput("problem_from_config: unknown data kind '" + cfg.data_kind + "'");
    }
    return spec;
}

RunConfig config_for_fieldset(const FieldSet& fsd) {
    RunConfig cfg;
    cfg.k = fsd.k;
    cfg.dim = fsd.dim;
    cfg.h = fsd.h;
    const int pad = static_cast<int>(std::ceil(1.0 / fsd.h - 1e-12));
    for (int a = 0; a < fsd.dim; ++a) {
        cfg.lo[a] = fsd.origin[a] + pad * fsd.h;
        cfg.hi[a] = fsd.origin[a] + (fsd.n[a] - 1 - pad) * fsd.h;
    }
    cfg.shape = "box";
    // tag heuristic: problem B fields vanish on the collar
    const auto grid = grid_from_field_set(fsd);
    double collar_max = 0.0;
    for (const auto& comp : fsd.values)
        for (int i = 0; i < grid->nodes(); ++i)
            if (grid->collar[i]) collar_max = std::max(collar_max, std::abs(comp[static_cast<std::size_t>(i)]));
    cfg.problem = collar_max > 0.0 ? ProblemTag::A : ProblemTag::B;
    cfg.data_kind = "two_slabs"; // placeholder; analysis never evaluates data
    cfg.run_name = "analyze";
    return cfg;
}

namespace {

std::vector<SupportSet> supports_for(const DensityVector& state, const RunConfig& cfg) {
    const Grid& g = state.grid();
    std::vector<SupportSet> out;
    for (int c = 0; c < state.k; ++c) {
        DensityVector one;
        one.problem = state.problem;
        one.k = 1;
        one.fields.push_back(state.fields[static_cast<std::size_t>(c)]);
        const double eps = cfg.solver.supp_factor * g.h * g.h *
                           state.fields[static_cast<std::size_t>(c)].max_abs();
        auto sets = support_masks(one, eps);
        sets.front().comp = c;
        out.push_back(std::move(sets.front()));
    }
    return out;
}

std::vector<int> free_boundary_nodes(const Grid& g, const SupportSet& s, double margin) {
    std::vector<int> out;
    for (int id : s.boundary) {
        const auto p = g.pos(id);
        if (g.strictly_inside_omega(p[0], p[1], margin)) out.push_back(id);
    }
    return out;
}

} // namespace

VerificationReport analyze_fields(const FieldSet& fsd, const RunConfig& cfg,
                                  std::vector<FreeBoundarySample>* samples_out) {
    auto grid = grid_from_config(cfg);
    require(grid->n == fsd.n, "analyze_fields: config geometry does not match the dump lattice");
    DensityVector state = from_field_set(fsd, grid, cfg.problem);
    const Grid& g = *grid;
    const double h = g.h;

    VerificationReport rep;
    rep.run_name = cfg.run_name;
    rep.seed = cfg.solver.seed;
    rep.config_hash = config_hash(cfg);

    const auto supports = supports_for(state, cfg);
    const double margin = cfg.omega_margin_factor * h;

    rep.add(check_exact_distance(g, supports, cfg.tol_dist_factor * h, margin));

    for (int c = 0; c < state.k; ++c) {
        const auto& u = state.fields[static_cast<std::size_t>(c)];
        const auto& sup = supports[static_cast<std::size_t>(c)];

        rep.add(check_exterior_sphere(g, state, sup, sup.threshold, margin));

        // lambda estimate for problem B residual checks
        double lambda = 0.0;
        if (cfg.problem == ProblemTag::B) {
            const double mass = l2_mass(u);
            lambda = mass > 0 ? dirichlet_energy(u) / mass : 0.0;
        }

        CheckRecord res;
        res.name = (cfg.problem == ProblemTag::A ? "harmonic_residual_c" : "eigen_residual_c") +
                   std::to_string(c);
        res.measured = harmonic_residual(u, sup, cfg.problem, lambda);
        res.tolerance = cfg.problem == ProblemTag::A
                            ? 1e-8
                            : 10.0 * h * h * std::max(1.0, lambda * u.max_abs());
        res.status = res.measured <= res.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
        if (mask_empty(sup.mask)) {
            res.status = CheckStatus::NotApplicable;
            res.note = "empty support";
        }
        rep.add(std::move(res));

        auto sub = subharmonic_check(u, cfg.problem, lambda, cfg.subharmonic_tol_factor * h);
        sub.name = "subharmonic_c" + std::to_string(c);
        rep.add(std::move(sub));

        const auto lip = lipschitz_estimate(u, sup, 0.25 * std::min(1.0, g.diameter() / 4), 0.25);
        CheckRecord lrec;
        lrec.name = "lipschitz_c" + std::to_string(c);
        lrec.status = CheckStatus::Pass;
        lrec.measured = lip.growth_constant;
        lrec.note = "sup gradient " + std::to_string(lip.sup_gradient) + ", " +
                    std::to_string(lip.samples) + " near-boundary samples";
        rep.add(std::move(lrec));

        if (g.dim == 2) {
            const auto fb_nodes = free_boundary_nodes(g, sup, margin);
            const auto bc = box_counting(g, fb_nodes, default_box_scales(h));
            CheckRecord brec;
            brec.name = "box_counting_c" + std::to_string(c);
            brec.measured = bc.dimension;
            brec.tolerance = g.dim - 0.5;
            if (bc.insufficient) {
                brec.status = CheckStatus::Insufficient;
                brec.note = "insufficient data";
            } else {
                brec.status = bc.dimension < g.dim - 0.5 ? CheckStatus::Pass : CheckStatus::Fail;
                brec.note = std::to_string(bc.scales_used) + " scales, max log-fit deviation " +
                            std::to_string(bc.residual);
            }
            rep.add(std::move(brec));
        }
    }

    // energy bookkeeping (informational)
    {
        CheckRecord erec;
        erec.name = "dirichlet_total";
        erec.status = CheckStatus::Pass;
        double total = 0.0;
        for (int c = 0; c < state.k; ++c)
            total += dirichlet_energy(state.fields[static_cast<std::size_t>(c)]);
        erec.measured = total;
        erec.note = "sum of per-component Dirichlet integrals";
        rep.add(std::move(erec));

        StencilOptions sopt;
        sopt.relax_guard = h > 0.25;
        const DiskStencil st = build_stencil(h, g.dim, sopt);
        double pen = 0.0;
        for (int i = 0; i < state.k; ++i)
            for (int j = i + 1; j < state.k; ++j)
                pen += overlap_penalty(state.fields[static_cast<std::size_t>(i)],
                                       state.fields[static_cast<std::size_t>(j)], st);
        CheckRecord prec;
        prec.name = "overlap_total";
        prec.status = CheckStatus::Pass;
        prec.measured = pen;
        prec.note = "sum of pairwise overlap integrals of the stored fields";
        rep.add(std::move(prec));

        if (state.k >= 2) {
            CheckRecord drec;
            drec.name = "support_distance_min";
            double dmin = std::numeric_limits<double>::infinity();
            for (int i = 0; i < state.k; ++i)
                for (int j = i + 1; j < state.k; ++j) {
                    const auto d = dist_between_masks(g, supports[static_cast<std::size_t>(i)].mask,
                                                      supports[static_cast<std::size_t>(j)].mask);
                    if (d) dmin = std::min(dmin, *d);
                }
            drec.measured = dmin;
            drec.status = std::isfinite(dmin) ? CheckStatus::Pass : CheckStatus::NotApplicable;
            rep.add(std::move(drec));
        }
    }

    if (g.dim == 2 && state.k >= 2) {
        auto samples = sample_free_boundary(state, cfg.fb);
        auto fb = verify_condition(samples, cfg.fb);
        CheckRecord frec;
        frec.name = "free_boundary_condition";
        frec.measured = fb.median_rel_err;
        frec.tolerance = fb.tol;
        if (fb.insufficient) {
            frec.status = CheckStatus::Insufficient;
            frec.note = fb.note;
        } else {
            frec.status = fb.pass ? CheckStatus::Pass : CheckStatus::Fail;
            frec.note = std::to_string(fb.n_admitted) + " admitted / " +
                        std::to_string(fb.n_samples) + " samples, " +
                        std::to_string(fb.n_flat) + " flat, " +
                        std::to_string(fb.n_excluded_curvature) + " over the curvature gate";
        }
        rep.add(std::move(frec));

        CheckRecord lrec;
        lrec.name = "fb_median_lhs";
        lrec.status = CheckStatus::Pass;
        lrec.measured = fb.median_lhs;
        lrec.note = "median squared normal-derivative ratio over admitted samples";
        rep.add(std::move(lrec));
        CheckRecord rrec;
        rrec.name = "fb_median_rhs_curved";
        rrec.status = CheckStatus::Pass;
        rrec.measured = fb.median_rhs_curved;
        rrec.note = "median |chi_i/chi_j| over curved admitted samples";
        rep.add(std::move(rrec));
        CheckRecord urec;
        urec.name = "fb_median_unsquared";
        urec.status = CheckStatus::Pass;
        urec.measured = fb.median_unsquared;
        urec.note = "median |dnu_i/dnu_j| (plain ratio, diagnostic)";
        rep.add(std::move(urec));
        if (samples_out) *samples_out = std::move(samples);
    }

    return rep;
}

void write_trace_csv(const std::string& path, const SolverTrace& trace) {
    std::ofstream os(path);
    require(os.good(), "write_trace_csv: cannot open " + path);
    os.precision(17);
    os << "level,stage,beta,iter,total,penalty,grad_norm,step\n";
    for (const auto& r : trace.iters)
        os << r.level << ',' << r.stage << ',' << r.beta << ',' << r.iter << ',' << r.total
           << ',' << r.penalty << ',' << r.grad_norm << ',' << r.step << '\n';
}

namespace {

void write_stages_csv(const std::string& path, const SolverTrace& trace) {
    std::ofstream os(path);
    require(os.good(), "write_stages_csv: cannot open " + path);
    os.precision(17);
    os << "level,stage,beta,iters,converged,total,penalty\n";
    for (const auto& s : trace.stages)
        os << s.level << ',' << s.stage << ',' << s.beta << ',' << s.iters << ','
           << (s.converged ? 1 : 0) << ',' << s.total << ',' << s.penalty << '\n';
}

VerificationReport make_solve_report(const RunConfig& cfg, const SolverTrace& trace) {
    VerificationReport rep;
    rep.run_name = cfg.run_name + "/solver";
    rep.seed = cfg.solver.seed;
    rep.config_hash = config_hash(cfg);

    // monotone energy within each stage (backtracking invariant)
    {
        CheckRecord r;
        r.name = "stage_energy_monotone";
        bool ok = true;
        double worst = 0.0;
        for (std::size_t i = 1; i < trace.iters.size(); ++i) {
            const auto& a = trace.iters[i - 1];
            const auto& b = trace.iters[i];
            if (a.level == b.level && a.stage == b.stage && b.iter > a.iter) {
                if (b.total > a.total) {
                    ok = false;
                    worst = std::max(worst, b.total - a.total);
                }
            }
        }
        r.measured = worst;
        r.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
        rep.add(std::move(r));
    }

    // overlap decay across the coarsest level's full schedule and overall
    {
        CheckRecord r;
        r.name = "penalty_decay_monotone";
        bool ok = true;
        int level0 = trace.stages.empty() ? 0 : trace.stages.front().level;
        double prev = std::numeric_limits<double>::infinity();
        for (const auto& s : trace.stages) {
            if (s.level != level0) continue;
            if (s.penalty > prev * (1.0 + 1e-12)) ok = false;
            prev = s.penalty;
        }
        r.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
        r.note = trace.overlap_warning ? "overlap warning flagged during the run" : "";
        rep.add(std::move(r));

        CheckRecord f;
        f.name = "penalty_final";
        f.measured = trace.final_penalty;
        f.tolerance = 1e-6 * (trace.initial_penalty + 1.0);
        f.status = trace.final_penalty <= f.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
        f.note = "initial penalty " + std::to_string(trace.initial_penalty);
        rep.add(std::move(f));
    }

    if (!trace.polish_pair_distance.empty()) {
        CheckRecord r;
        r.name = "polish_pair_distance";
        double dmin = std::numeric_limits<double>::infinity();
        for (double d : trace.polish_pair_distance) dmin = std::min(dmin, d);
        r.measured = dmin;
        r.tolerance = 1.0;
        r.status = dmin >= 1.0 ? CheckStatus::Pass : CheckStatus::Fail;
        rep.add(std::move(r));
    }
    if (!trace.polish_lambda.empty()) {
        CheckRecord r;
        r.name = "polish_lambda";
        r.status = CheckStatus::Pass;
        std::string s;
        for (double l : trace.polish_lambda) s += std::to_string(l) + " ";
        r.note = "eigenvalues: " + s;
        r.measured = trace.polish_lambda.front();
        rep.add(std::move(r));
    }
    return rep;
}

struct CheckpointInfo {
    int level = 0;
    int stage = -1;
    std::string hash;
};

CheckpointInfo read_checkpoint_sidecar(const std::string& path) {
    std::ifstream is(path);
    require(is.good(), "resume: cannot open checkpoint sidecar " + path);
    CheckpointInfo info;
    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "level") ls >> info.level;
        else if (key == "stage") ls >> info.stage;
        else if (key == "config_hash") ls >> info.hash;
    }
    return info;
}

} // namespace

RunResult run_solve(const RunConfig& cfg, bool resume) {
    RunResult out;
    fs::create_directories(cfg.out_dir);
    const std::string cp_fields = cfg.out_dir + "/checkpoint.sgrf";
    const std::string cp_sidecar = cfg.out_dir + "/checkpoint.txt";

    auto grid = grid_from_config(cfg);
    auto spec = problem_from_config(cfg, grid);

    ResumePoint rp;
    const ResumePoint* rpp = nullptr;
    if (resume) {
        const auto info = read_checkpoint_sidecar(cp_sidecar);
        require(info.hash == config_hash(cfg),
                "resume: checkpoint was produced by a different configuration");
        const auto fsd = read_sgrf(cp_fields);
        rp.level = info.level;
        rp.stage = info.stage;
        rp.field_values = fsd.values;
        rpp = &rp;
    }

    const auto on_stage = [&](int level, int stage, const DensityVector& state) {
        write_sgrf(cp_fields, to_field_set(state));
        std::ofstream os(cp_sidecar);
        os << "level " << level << "\n"
           << "stage " << stage << "\n"
           << "config_hash " << config_hash(cfg) << "\n"
           << canonical_text(cfg);
    };

    auto [state, trace] = solve(spec, cfg.solver, rpp, on_stage);
    out.trace = std::move(trace);
    out.fields = to_field_set(state);

    out.verification = analyze_fields(out.fields, cfg, &out.samples);
    out.solve_report = make_solve_report(cfg, out.trace);

    write_sgrf(cfg.out_dir + "/fields.sgrf", out.fields);
    write_report(cfg.out_dir + "/verification.json", out.verification);
    write_report(cfg.out_dir + "/solve_report.json", out.solve_report);
    write_trace_csv(cfg.out_dir + "/trace.csv", out.trace);
    write_stages_csv(cfg.out_dir + "/stages.csv", out.trace);
    {
        std::ofstream os(cfg.out_dir + "/config.txt");
        os << canonical_text(cfg);
    }
    if (cfg.emit_csv) {
        for (int c = 0; c < out.fields.k; ++c)
            write_field_csv(cfg.out_dir + "/field_c" + std::to_string(c) + ".csv", out.fields, c);
        if (cfg.dim == 2) {
            DensityVector st2 = from_field_set(out.fields, grid, cfg.problem);
            for (int c = 0; c < st2.k; ++c) {
                const auto& u = st2.fields[static_cast<std::size_t>(c)];
                const double eps = cfg.solver.supp_factor * grid->h * grid->h * u.max_abs();
                write_contours_csv(cfg.out_dir + "/contour_c" + std::to_string(c) + ".csv",
                                   extract_contour(u, std::max(eps, 1e-300)));
            }
            write_samples_csv(cfg.out_dir + "/fb_samples.csv", out.samples);
        }
    }

    out.exit_code = (out.verification.all_pass() && out.solve_report.all_pass()) ? 0 : 1;
    return out;
}

int collate_reports(const std::string& dir, std::ostream& os) {
    require(fs::exists(dir), "report: directory does not exist: " + dir);
    std::vector<std::string> paths;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const auto name = e.path().filename().string();
        if (name == "verification.json" || name == "solve_report.json" ||
            name == "fb_report.json")
            paths.push_back(e.path().string());
    }
    std::sort(paths.begin(), paths.end());
    require(!paths.empty(), "report: no reports found under " + dir);

    int fails = 0, total = 0;
    for (const auto& p : paths) {
        const auto rep = read_report(p);
        os << rep.run_name << " (" << p << ")\n";
        for (const auto& r : rep.records) {
            ++total;
            if (r.status == CheckStatus::Fail) ++fails;
            os << "  [" << to_string(r.status) << "] " << r.name
               << " measured=" << r.measured << " tol=" << r.tolerance;
            if (!r.note.empty()) os << "  (" << r.note << ")";
            os << "\n";
        }
    }
    os << (fails == 0 ? "OVERALL PASS" : "OVERALL FAIL") << " (" << total - fails << "/" << total
       << " checks)\n";
    return fails == 0 ? 0 : 1;
}

} // namespace segreg
