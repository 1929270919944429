#pragma once

#include "segreg/energy.hpp"
#include "segreg/free_boundary.hpp"
#include "segreg/solver.hpp"

#include <array>
#include <string>
#include <vector>

namespace segreg {

// Complete description of one run, parsed from a sectioned key = value file.
// Every field has a working default except the geometry and (for problem A)
// the data kind; parse_config throws InvalidInput on unknown keys or invalid
// values before any compute starts.
struct RunConfig {
    // [problem]
    ProblemTag problem = ProblemTag::A;
    int k = 2;

    // [geometry]
    int dim = 2;
    std::array<double, 2> lo{0, 0};
    std::array<double, 2> hi{0, 0};
    double h = 1.0 / 64;
    std::string shape = "box"; // box | annulus
    std::array<double, 2> center{0, 0};
    double r_inner = 0.0, r_outer = 0.0;

    // [data] collar data generator (problem A)
    //   two_slabs:     f1 = a on {x <= xmin}, f2 = b on {x >= xmax}
    //   lifted_ramps:  f1 = a max(0, (s1-x)/(s1-xmin)), f2 = b max(0, (x-s2)/(xmax-s2))
    //   annulus_rings: f1 = a on {r <= r_inner}, f2 = b on {r >= r_outer}
    std::string data_kind;
    double data_a = 1.0, data_b = 1.0;
    double data_s1 = 0.0, data_s2 = 0.0;

    // [seeds] (problem B)
    std::vector<std::array<double, 2>> seeds; // empty = auto placement

    // [cost] (problem B)
    std::vector<double> cost_weights; // empty = all ones

    // [solver]
    SolverConfig solver;

    // [analysis]
    double tol_dist_factor = 4.0;       // exact-distance tolerance, times h
    double omega_margin_factor = 2.0;   // free-boundary node margin, times h
    double subharmonic_tol_factor = 10; // times h
    FbOptions fb;

    // [output]
    std::string out_dir = "out";
    bool emit_csv = false;

    std::string run_name = "run";
};

RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Applies one "section.key=value" override (CLI flags).
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

void validate(const RunConfig& cfg);

// Normalized text rendering with a fixed key order; identical configurations
// give identical text. Used for the provenance hash and checkpoint sidecars.
std::string canonical_text(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);

} // namespace segreg
