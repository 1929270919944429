#include "segreg/run_config.hpp"
#include "segreg/common.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace segreg {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double to_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        require(pos == v.size(), "config: trailing characters in " + key);
        return d;
    } catch (const InvalidInput&) {
        throw;
    } catch (...) {
        throw InvalidInput("config: cannot parse number for " + key + ": '" + v + "'");
    }
}

long to_long(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long d = std::stol(v, &pos);
        require(pos == v.size(), "config: trailing characters in " + key);
        return d;
    } catch (const InvalidInput&) {
        throw;
    } catch (...) {
        throw InvalidInput("config: cannot parse integer for " + key + ": '" + v + "'");
    }
}

bool to_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw InvalidInput("config: cannot parse boolean for " + key + ": '" + v + "'");
}

std::vector<double> to_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    std::istringstream ss(v);
    std::string tok;
    while (ss >> tok) out.push_back(to_double(tok, key));
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void apply_override(RunConfig& c, const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "problem.type") {
        if (v == "a" || v == "A") c.problem = ProblemTag::A;
        else if (v == "b" || v == "B") c.problem = ProblemTag::B;
        else throw InvalidInput("config: problem.type must be a or b");
    } else if (key == "problem.k") c.k = static_cast<int>(to_long(v, key));
    else if (key == "geometry.dim") c.dim = static_cast<int>(to_long(v, key));
    else if (key == "geometry.x") {
        const auto l = to_list(v, key);
        require(l.size() == 2, "config: geometry.x wants 'xmin xmax'");
        c.lo[0] = l[0];
        c.hi[0] = l[1];
    } else if (key == "geometry.y") {
        const auto l = to_list(v, key);
        require(l.size() == 2, "config: geometry.y wants 'ymin ymax'");
        c.lo[1] = l[0];
        c.hi[1] = l[1];
    } else if (key == "geometry.h") c.h = to_double(v, key);
    else if (key == "geometry.shape") {
        require(v == "box" || v == "annulus", "config: geometry.shape must be box or annulus");
        c.shape = v;
    } else if (key == "geometry.center") {
        const auto l = to_list(v, key);
        require(l.size() == 2, "config: geometry.center wants 'cx cy'");
        c.center = {l[0], l[1]};
    } else if (key == "geometry.r_inner") c.r_inner = to_double(v, key);
    else if (key == "geometry.r_outer") c.r_outer = to_double(v, key);
    else if (key == "data.kind") c.data_kind = v;
    else if (key == "data.a") c.data_a = to_double(v, key);
    else if (key == "data.b") c.data_b = to_double(v, key);
    else if (key == "data.s1") c.data_s1 = to_double(v, key);
    else if (key == "data.s2") c.data_s2 = to_double(v, key);
    else if (key == "seeds.points") {
        const auto l = to_list(v, key);
        require(l.size() % 2 == 0, "config: seeds.points wants pairs");
        c.seeds.clear();
        for (std::size_t i = 0; i + 1 < l.size(); i += 2) c.seeds.push_back({l[i], l[i + 1]});
    } else if (key == "cost.weights") c.cost_weights = to_list(v, key);
    else if (key == "solver.beta0") c.solver.beta.beta0 = to_double(v, key);
    else if (key == "solver.beta_ratio") c.solver.beta.ratio = to_double(v, key);
    else if (key == "solver.beta_max") c.solver.beta.beta_max = to_double(v, key);
    else if (key == "solver.step0") c.solver.step.step0 = to_double(v, key);
    else if (key == "solver.shrink") c.solver.step.shrink = to_double(v, key);
    else if (key == "solver.armijo") c.solver.step.armijo = to_double(v, key);
    else if (key == "solver.grow") c.solver.step.grow = to_double(v, key);
    else if (key == "solver.tol_grad") c.solver.tol_grad = to_double(v, key);
    else if (key == "solver.tol_energy") c.solver.tol_energy = to_double(v, key);
    else if (key == "solver.max_iters") c.solver.max_iters = static_cast<int>(to_long(v, key));
    else if (key == "solver.max_iters_fine")
        c.solver.max_iters_fine = static_cast<int>(to_long(v, key));
    else if (key == "solver.seed") c.solver.seed = static_cast<std::uint64_t>(to_long(v, key));
    else if (key == "solver.jitter") c.solver.jitter = to_double(v, key);
    else if (key == "solver.levels") c.solver.levels = static_cast<int>(to_long(v, key));
    else if (key == "solver.fine_stage_tail")
        c.solver.fine_stage_tail = static_cast<int>(to_long(v, key));
    else if (key == "solver.polish") c.solver.polish = to_bool(v, key);
    else if (key == "solver.bulk_refresh") c.solver.bulk_refresh = to_bool(v, key);
    else if (key == "solver.equilibrate_rounds")
        c.solver.equilibrate_rounds = static_cast<int>(to_long(v, key));
    else if (key == "solver.supp_factor") c.solver.supp_factor = to_double(v, key);
    else if (key == "solver.threads") c.solver.threads = static_cast<int>(to_long(v, key));
    else if (key == "analysis.tol_dist_factor") c.tol_dist_factor = to_double(v, key);
    else if (key == "analysis.omega_margin_factor") c.omega_margin_factor = to_double(v, key);
    else if (key == "analysis.subharmonic_tol_factor")
        c.subharmonic_tol_factor = to_double(v, key);
    else if (key == "analysis.fb_eps_factor") c.fb.contour_eps_factor = to_double(v, key);
    else if (key == "analysis.fb_window") c.fb.window = static_cast<int>(to_long(v, key));
    else if (key == "analysis.fb_delta") c.fb.delta = to_double(v, key);
    else if (key == "analysis.fb_chi_floor") c.fb.chi_floor = to_double(v, key);
    else if (key == "analysis.fb_tol") c.fb.tol_fb = to_double(v, key);
    else if (key == "analysis.fb_match_factor") c.fb.match_factor = to_double(v, key);
    else if (key == "analysis.fb_margin") c.fb.omega_margin = to_double(v, key);
    else if (key == "analysis.fb_max_samples")
        c.fb.max_samples_per_comp = static_cast<int>(to_long(v, key));
    else if (key == "analysis.fb_min_matched")
        c.fb.min_matched = static_cast<int>(to_long(v, key));
    else if (key == "output.dir") c.out_dir = v;
    else if (key == "output.emit_csv") c.emit_csv = to_bool(v, key);
    else if (key == "output.run_name") c.run_name = v;
    else throw InvalidInput("config: unknown key '" + key + "'");
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream ss(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            require(line.back() == ']', "config line " + std::to_string(lineno) +
                                            ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        require(eq != std::string::npos,
                "config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        require(!section.empty(), "config line " + std::to_string(lineno) + ": key before section");
        apply_override(cfg, section + "." + key, value);
    }
    validate(cfg);
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    require(is.good(), "config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

void validate(const RunConfig& c) {
    require(c.k >= 1 && c.k <= 64, "config: k out of range");
    require(c.dim == 1 || c.dim == 2, "config: dim must be 1 or 2");
    require(c.h > 0, "config: h must be positive");
    if (c.shape == "annulus")
        require(c.r_outer > c.r_inner && c.r_inner > 0, "config: bad annulus radii");
    else
        require(c.hi[0] > c.lo[0] && (c.dim == 1 || c.hi[1] > c.lo[1]),
                "config: empty geometry box");
    if (c.problem == ProblemTag::A) {
        require(c.data_kind == "two_slabs" || c.data_kind == "lifted_ramps" ||
                    c.data_kind == "annulus_rings",
                "config: problem A needs data.kind in {two_slabs, lifted_ramps, annulus_rings}");
        require(c.data_a > 0 && c.data_b > 0, "config: data values must be positive");
        if (c.data_kind == "annulus_rings")
            require(c.shape == "annulus", "config: annulus_rings data needs an annulus domain");
    }
    if (!c.seeds.empty())
        require(static_cast<int>(c.seeds.size()) == c.k, "config: seeds.points must list k points");
    if (!c.cost_weights.empty()) {
        require(static_cast<int>(c.cost_weights.size()) == c.k,
                "config: cost.weights must list k values");
        for (double w : c.cost_weights) require(w > 0, "config: cost weights must be positive");
    }
    require(c.solver.threads >= 1, "config: solver.threads must be >= 1");
    require(c.solver.levels >= 1, "config: solver.levels must be >= 1");
}

std::string canonical_text(const RunConfig& c) {
    std::ostringstream os;
    os << "[problem]\n";
    os << "type = " << (c.problem == ProblemTag::A ? "a" : "b") << "\n";
    os << "k = " << c.k << "\n";
    os << "[geometry]\n";
    os << "dim = " << c.dim << "\n";
    os << "x = " << fmt(c.lo[0]) << " " << fmt(c.hi[0]) << "\n";
    if (c.dim == 2) os << "y = " << fmt(c.lo[1]) << " " << fmt(c.hi[1]) << "\n";
    os << "h = " << fmt(c.h) << "\n";
    os << "shape = " << c.shape << "\n";
    if (c.shape == "annulus") {
        os << "center = " << fmt(c.center[0]) << " " << fmt(c.center[1]) << "\n";
        os << "r_inner = " << fmt(c.r_inner) << "\n";
        os << "r_outer = " << fmt(c.r_outer) << "\n";
    }
    if (c.problem == ProblemTag::A) {
        os << "[data]\n";
        os << "kind = " << c.data_kind << "\n";
        os << "a = " << fmt(c.data_a) << "\n";
        os << "b = " << fmt(c.data_b) << "\n";
        if (c.data_kind == "lifted_ramps") {
            os << "s1 = " << fmt(c.data_s1) << "\n";
            os << "s2 = " << fmt(c.data_s2) << "\n";
        }
    } else {
        if (!c.seeds.empty()) {
            os << "[seeds]\n"
               << "points =";
            for (const auto& s : c.seeds) os << " " << fmt(s[0]) << " " << fmt(s[1]);
            os << "\n";
        }
        if (!c.cost_weights.empty()) {
            os << "[cost]\n"
               << "weights =";
            for (double w : c.cost_weights) os << " " << fmt(w);
            os << "\n";
        }
    }
    os << "[solver]\n";
    os << "beta0 = " << fmt(c.solver.beta.beta0) << "\n";
    os << "beta_ratio = " << fmt(c.solver.beta.ratio) << "\n";
    os << "beta_max = " << fmt(c.solver.beta.beta_max) << "\n";
    os << "step0 = " << fmt(c.solver.step.step0) << "\n";
    os << "shrink = " << fmt(c.solver.step.shrink) << "\n";
    os << "armijo = " << fmt(c.solver.step.armijo) << "\n";
    os << "grow = " << fmt(c.solver.step.grow) << "\n";
    os << "tol_grad = " << fmt(c.solver.tol_grad) << "\n";
    os << "tol_energy = " << fmt(c.solver.tol_energy) << "\n";
    os << "max_iters = " << c.solver.max_iters << "\n";
    os << "max_iters_fine = " << c.solver.max_iters_fine << "\n";
    os << "seed = " << c.solver.seed << "\n";
    os << "jitter = " << fmt(c.solver.jitter) << "\n";
    os << "levels = " << c.solver.levels << "\n";
    os << "fine_stage_tail = " << c.solver.fine_stage_tail << "\n";
    os << "polish = " << (c.solver.polish ? "true" : "false") << "\n";
    os << "bulk_refresh = " << (c.solver.bulk_refresh ? "true" : "false") << "\n";
    os << "equilibrate_rounds = " << c.solver.equilibrate_rounds << "\n";
    os << "supp_factor = " << fmt(c.solver.supp_factor) << "\n";
    os << "[analysis]\n";
    os << "tol_dist_factor = " << fmt(c.tol_dist_factor) << "\n";
    os << "omega_margin_factor = " << fmt(c.omega_margin_factor) << "\n";
    os << "subharmonic_tol_factor = " << fmt(c.subharmonic_tol_factor) << "\n";
    os << "fb_eps_factor = " << fmt(c.fb.contour_eps_factor) << "\n";
    os << "fb_window = " << c.fb.window << "\n";
    os << "fb_delta = " << fmt(c.fb.delta) << "\n";
    os << "fb_chi_floor = " << fmt(c.fb.chi_floor) << "\n";
    os << "fb_tol = " << fmt(c.fb.tol_fb) << "\n";
    os << "fb_match_factor = " << fmt(c.fb.match_factor) << "\n";
    os << "fb_margin = " << fmt(c.fb.omega_margin) << "\n";
    os << "fb_max_samples = " << c.fb.max_samples_per_comp << "\n";
    os << "fb_min_matched = " << c.fb.min_matched << "\n";
    return os.str();
}

std::string config_hash(const RunConfig& c) {
    const std::string text = canonical_text(c);
    // FNV-1a 64
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char ch : text) {
        hash ^= ch;
        hash *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

} // namespace segreg
