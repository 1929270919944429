#pragma once

#include "segreg/field_io.hpp"
#include "segreg/report.hpp"
#include "segreg/run_config.hpp"
#include "segreg/solver.hpp"

#include <memory>
#include <ostream>
#include <string>

namespace segreg {

std::shared_ptr<const Grid> grid_from_config(const RunConfig& cfg);
ProblemSpec problem_from_config(const RunConfig& cfg, std::shared_ptr<const Grid> grid);

// The full theorem-check suite on a set of fields. Consumes only the dump
// content plus the config, so the in-memory path and `analyze` on a dump
// produce bit-identical reports. `samples_out` receives the free-boundary
// samples when the run is 2D with k >= 2.
VerificationReport analyze_fields(const FieldSet& fs, const RunConfig& cfg,
                                  std::vector<FreeBoundarySample>* samples_out = nullptr);

// Synthesizes a config for a bare dump (box hull geometry, problem tag
// guessed from the collar values).
RunConfig config_for_fieldset(const FieldSet& fs);

struct RunResult {
    int exit_code = 0;
    VerificationReport verification; // field-derived; reproducible from the dump
    VerificationReport solve_report; // trace-derived records
    FieldSet fields;
    SolverTrace trace;
    std::vector<FreeBoundarySample> samples;
};

// Solve + analyze + write everything under cfg.out_dir:
//   fields.sgrf, verification.json, solve_report.json, trace.csv, stages.csv,
//   config.txt, checkpoint.sgrf/checkpoint.txt (after each stage), and the
//   CSV emitters when cfg.emit_csv is set.
RunResult run_solve(const RunConfig& cfg, bool resume = false);

// Reads every report under `dir`, prints one line per record plus a summary.
// Returns 0 when nothing failed, 1 otherwise.
int collate_reports(const std::string& dir, std::ostream& out);

void write_trace_csv(const std::string& path, const SolverTrace& trace);

} // namespace segreg
