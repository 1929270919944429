// Command-line front end: solve the penalized segregation problems, analyze
// saved fields, verify the free-boundary condition, print oracle values, run
// the shape-derivative validation cases, and collate reports.
//
// Exit codes: 0 success, 1 failed check, 2 usage/config error.

#include "segreg/analysis.hpp"
#include "segreg/common.hpp"
#include "segreg/oracles.hpp"
#include "segreg/pipeline.hpp"
#include "segreg/shape_derivative.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>

namespace {

using namespace segreg;

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides,
                      int threads, const std::string& out_dir, bool emit_csv) {
    RunConfig cfg = parse_config_file(path);
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        require(eq != std::string::npos, "--set wants section.key=value");
        apply_override(cfg, ov.substr(0, eq), ov.substr(eq + 1));
    }
    if (threads > 0) cfg.solver.threads = threads;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (emit_csv) cfg.emit_csv = true;
    validate(cfg);
    return cfg;
}

int cmd_solve(const std::string& config_path, const std::vector<std::string>& overrides,
              int threads, const std::string& out_dir, bool emit_csv, bool resume,
              ProblemTag expect) {
    RunConfig cfg = load_config(config_path, overrides, threads, out_dir, emit_csv);
    require(cfg.problem == expect, "config problem type does not match the subcommand");
    const auto t0 = std::chrono::steady_clock::now();
    const RunResult res = run_solve(cfg, resume);
    const auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cerr << "run '" << cfg.run_name << "' finished in " << dt << " s\n";
    for (const auto& r : res.verification.records)
        std::cout << "[" << to_string(r.status) << "] " << r.name << " measured=" << r.measured
                  << " tol=" << r.tolerance << "\n";
    for (const auto& r : res.solve_report.records)
        std::cout << "[" << to_string(r.status) << "] " << r.name << " measured=" << r.measured
                  << " tol=" << r.tolerance << "\n";
    std::cout << (res.exit_code == 0 ? "PASS" : "FAIL") << "\n";
    return res.exit_code;
}

int cmd_analyze(const std::string& fields_path, const std::string& config_path,
                const std::vector<std::string>& overrides, int threads,
                const std::string& out_dir, bool emit_csv, bool fb_only) {
    const FieldSet fsd = read_sgrf(fields_path);
    RunConfig cfg;
    if (!config_path.empty()) {
        cfg = load_config(config_path, overrides, threads, out_dir, emit_csv);
    } else {
        cfg = config_for_fieldset(fsd);
        for (const auto& ov : overrides) {
            const auto eq = ov.find('=');
            require(eq != std::string::npos, "--set wants section.key=value");
            apply_override(cfg, ov.substr(0, eq), ov.substr(eq + 1));
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (emit_csv) cfg.emit_csv = true;
    }
    std::vector<FreeBoundarySample> samples;
    const auto rep = analyze_fields(fsd, cfg, &samples);

    VerificationReport printed = rep;
    if (fb_only) {
        printed.records.clear();
        printed.run_name = cfg.run_name + "/fb";
        for (const auto& r : rep.records)
            if (r.name.rfind("fb_", 0) == 0 || r.name == "free_boundary_condition")
                printed.records.push_back(r);
        require(!printed.records.empty(),
                "verify-fb: no free-boundary records (needs a 2D dump with k >= 2)");
    }
    std::filesystem::create_directories(cfg.out_dir);
    write_report(cfg.out_dir + (fb_only ? "/fb_report.json" : "/verification.json"), printed);
    if (cfg.emit_csv && !samples.empty())
        write_samples_csv(cfg.out_dir + "/fb_samples.csv", samples);
    for (const auto& r : printed.records)
        std::cout << "[" << to_string(r.status) << "] " << r.name << " measured=" << r.measured
                  << " tol=" << r.tolerance << "\n";
    return printed.all_pass() ? 0 : 1;
}

int cmd_oracle(const std::string& kind, double a, double b, double L, double r_in, double r_out,
               double R, double x, double y, int dim, double rect_a, double rect_b, double rho) {
    std::cout.precision(15);
    if (kind == "1d") {
        const auto r = oracle_1d(a, b, L);
        std::cout << "s* = " << r.s_star << "\nE* = " << r.energy << "\nslopes = " << r.slopes[0]
                  << " " << r.slopes[1] << "\n";
        return 0;
    }
    if (kind == "radial") {
        const auto r = oracle_radial(r_in, r_out, a, b);
        std::cout << "R1* = " << r.R1_star << "\nE* = " << r.energy
                  << "\nderiv_ratio_sq = " << r.deriv_ratio_sq
                  << "\ncurvature_ratio = " << r.curvature_ratio << "\nslopes = " << r.slopes[0]
                  << " " << r.slopes[1] << "\n";
        return 0;
    }
    if (kind == "barrier") {
        std::cout << "w_R = " << barrier_w(R, {x, y}, dim)
                  << "\nw_R* = " << kelvin_w_star(R, {x, y}, dim) << "\n";
        return 0;
    }
    if (kind == "eigen") {
        if (rho > 0)
            std::cout << "lambda1(disk) = " << eigen_reference_disk(rho) << "\n";
        else
            std::cout << "lambda1(rect) = " << eigen_reference_rectangle(rect_a, rect_b) << "\n";
        return 0;
    }
    throw InvalidInput("oracle: unknown case '" + kind + "' (1d|radial|barrier|eigen)");
}

// Shape-derivative validation: the annulus benchmark and a mollified rigid
// translation of a flat zero-data boundary. Prints the three derivative
// estimates and their pairwise agreement.
int cmd_shape_deriv(const std::string& kind, double h, int threads) {
    std::cout.precision(12);
    const double t_fd = 1e-4;
    if (kind == "annulus") {
        GridSpec gs;
        gs.dim = 2;
        gs.lo = {-2.5, -2.5};
        gs.hi = {2.5, 2.5};
        gs.h = h;
        auto grid = std::make_shared<const Grid>(build_grid(gs));
        ShapeCase sc;
        sc.grid = grid;
        sc.s_mask.assign(static_cast<std::size_t>(grid->nodes()), 0);
        for (int i = 0; i < grid->nodes(); ++i) {
            const auto p = grid->pos(i);
            const double r = std::hypot(p[0], p[1]);
            if (r >= 1.0 && r <= 2.0) sc.s_mask[static_cast<std::size_t>(i)] = 1;
        }
        sc.phi = [](double px, double py) {
            return std::hypot(px, py) > 1.5 ? 1.0 : 0.0;
        };
        Deformation def(grid);
        for (int i = 0; i < grid->nodes(); ++i) {
            const auto p = grid->pos(i);
            const double r = std::hypot(p[0], p[1]);
            if (r < 1e-12 || r > 1.45) continue;
            def.window[static_cast<std::size_t>(i)] = 1;
            double amp = 1.0;
            if (r > 1.1) {
                const double t = (1.45 - r) / 0.35;
                amp = t * t * (3 - 2 * t);
            }
            def.yx[i] = -amp * p[0] / r;
            def.yy[i] = -amp * p[1] / r;
        }
        ScalarField u(grid);
        const double I0 = extension_energy(sc, 0.0, def, &u, 1e-11, threads);
        const double Ip = extension_energy(sc, t_fd, def, &u, 1e-11, threads);
        const double Im = extension_energy(sc, -t_fd, def, &u, 1e-11, threads);
        extension_energy(sc, 0.0, def, &u, 1e-12, threads);
        const double fd = (Ip - Im) / (2 * t_fd);
        const double vol = volume_form_derivative(u, sc, def, threads);
        const double eps = 1.5 * h;
        const auto contours = extract_contour(u, eps);
        bool flagged = false;
        const int window = std::max(4, static_cast<int>(std::ceil(0.25 / h)));
        const double bdry = boundary_form_derivative(u, def, contours, eps, window, &flagged);
        const double analytic = -2.0 * M_PI / (std::log(2.0) * std::log(2.0));
        std::cout << "I(0) = " << I0 << "\nfinite_difference = " << fd
                  << "\nvolume_form = " << vol << "\nboundary_form = " << bdry
                  << "\nanalytic = " << analytic << "\n";
        const double p1 = std::abs(fd - vol) / std::abs(fd);
        const double p2 = std::abs(fd - bdry) / std::abs(fd);
        const double p3 = std::abs(vol - bdry) / std::abs(vol);
        std::cout << "pairwise relative disagreement = " << p1 << " " << p2 << " " << p3 << "\n";
        if (flagged) std::cout << "WARNING: untrusted quadrature fraction above 20%\n";
        return (p1 <= 0.02 && p2 <= 0.02 && p3 <= 0.02) ? 0 : 1;
    }
    if (kind == "translation") {
        GridSpec gs;
        gs.dim = 2;
        gs.lo = {0.0, 0.0};
        gs.hi = {1.0, 1.0};
        gs.h = h;
        auto grid = std::make_shared<const Grid>(build_grid(gs));
        ShapeCase sc;
        sc.grid = grid;
        sc.s_mask.assign(static_cast<std::size_t>(grid->nodes()), 0);
        for (int i = 0; i < grid->nodes(); ++i) {
            const auto p = grid->pos(i);
            if (p[0] >= -1e-12 && p[0] <= 1 + 1e-12 && p[1] >= -1e-12 && p[1] <= 1 + 1e-12)
                sc.s_mask[static_cast<std::size_t>(i)] = 1;
        }
        sc.phi = [](double, double py) { return py; };
        Deformation def(grid);
        const double c = 0.3;
        for (int i = 0; i < grid->nodes(); ++i) {
            const auto p = grid->pos(i);
            if (p[1] > 0.5) continue;
            def.window[static_cast<std::size_t>(i)] = 1;
            double amp = 1.0;
            if (p[1] > 0.1) {
                const double t = (0.5 - p[1]) / 0.4;
                amp = t * t * (3 - 2 * t);
            }
            def.yy[i] = -c * amp;
        }
        ScalarField u(grid);
        const double Ip = extension_energy(sc, t_fd, def, &u, 1e-12, threads);
        const double Im = extension_energy(sc, -t_fd, def, &u, 1e-12, threads);
        extension_energy(sc, 0.0, def, &u, 1e-12, threads);
        const double fd = (Ip - Im) / (2 * t_fd);
        const double vol = volume_form_derivative(u, sc, def, threads);
        std::cout << "finite_difference = " << fd << "\nvolume_form = " << vol
                  << "\nanalytic = " << -c << "\n";
        const double err = std::max(std::abs(fd + c), std::abs(vol + c)) / c;
        std::cout << "max relative error = " << err << "\n";
        return err <= 2e-3 ? 0 : 1;
    }
    throw InvalidInput("shape-deriv: unknown case '" + kind + "' (annulus|translation)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Long-range segregation solver and verification suite"};
    app.require_subcommand(1);

    std::string config_path, fields_path, out_dir, dir, oracle_case, shape_case = "annulus";
    std::vector<std::string> overrides;
    int threads = 0;
    bool emit_csv = false, resume = false;
    double a = 1.0, b = 1.0, L = 3.0, r_in = 0.5, r_out = 4.0;
    double R = 1.0, px = 0.0, py = 0.0, rect_a = 0.0, rect_b = 0.0, rho = 0.0, sd_h = 1.0 / 64;
    int dim = 2;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* copt = sub->add_option("--config", config_path, "run configuration file");
        if (needs_config) copt->required();
        sub->add_option("--set", overrides, "override a config value (section.key=value)");
        sub->add_option("--threads", threads, "worker cap; 1 = deterministic reduction order");
        sub->add_option("--out", out_dir, "output directory override");
        sub->add_flag("--emit-csv", emit_csv, "write plot-ready CSV files");
    };

    auto* solve_a = app.add_subcommand("solve-a", "minimize the penalized Dirichlet energy");
    add_common(solve_a, true);
    solve_a->add_flag("--resume", resume, "continue from the checkpoint in the output directory");

    auto* solve_b = app.add_subcommand("solve-b", "minimize the eigenvalue cost over partitions");
    add_common(solve_b, true);
    solve_b->add_flag("--resume", resume, "continue from the checkpoint in the output directory");

    auto* analyze = app.add_subcommand("analyze", "run the verification suite on saved fields");
    analyze->add_option("--fields", fields_path, "SGRF field dump")->required();
    add_common(analyze, false);

    auto* verify_fb = app.add_subcommand("verify-fb", "free-boundary condition verification");
    verify_fb->add_option("--fields", fields_path, "SGRF field dump")->required();
    add_common(verify_fb, false);

    auto* oracle = app.add_subcommand("oracle", "print closed-form reference values");
    oracle->add_option("--case", oracle_case, "1d | radial | barrier | eigen")->required();
    oracle->add_option("--a", a, "left/inner boundary value");
    oracle->add_option("--b", b, "right/outer boundary value");
    oracle->add_option("--L", L, "1d domain length");
    oracle->add_option("--r-in", r_in, "inner radius");
    oracle->add_option("--r-out", r_out, "outer radius");
    oracle->add_option("--R", R, "barrier radius");
    oracle->add_option("--x", px, "evaluation point x");
    oracle->add_option("--y", py, "evaluation point y");
    oracle->add_option("--dim", dim, "space dimension for the barrier");
    oracle->add_option("--rect-a", rect_a, "rectangle side a");
    oracle->add_option("--rect-b", rect_b, "rectangle side b");
    oracle->add_option("--rho", rho, "disk radius");

    auto* shape = app.add_subcommand("shape-deriv", "shape-derivative validation cases");
    shape->add_option("--case", shape_case, "annulus | translation");
    shape->add_option("--spacing", sd_h, "grid spacing h");
    shape->add_option("--threads", threads, "worker cap");

    auto* report = app.add_subcommand("report", "collate verification reports");
    report->add_option("--dir", dir, "directory holding run outputs")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (solve_a->parsed())
            return cmd_solve(config_path, overrides, threads, out_dir, emit_csv, resume,
                             segreg::ProblemTag::A);
        if (solve_b->parsed())
            return cmd_solve(config_path, overrides, threads, out_dir, emit_csv, resume,
                             segreg::ProblemTag::B);
        if (analyze->parsed())
            return cmd_analyze(fields_path, config_path, overrides, threads, out_dir, emit_csv,
                               false);
        if (verify_fb->parsed())
            return cmd_analyze(fields_path, config_path, overrides, threads, out_dir, emit_csv,
                               true);
        if (oracle->parsed())
            return cmd_oracle(oracle_case, a, b, L, r_in, r_out, R, px, py, dim, rect_a, rect_b,
                              rho);
        if (shape->parsed()) return cmd_shape_deriv(shape_case, sd_h, std::max(1, threads));
        if (report->parsed()) return segreg::collate_reports(dir, std::cout);
    } catch (const segreg::InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
