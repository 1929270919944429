#pragma once

#include "segreg/energy.hpp"
#include "segreg/linear_solve.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace segreg {

struct BetaSchedule {
    double beta0 = 1.0;
    double ratio = 10.0;
    double beta_max = 1e6;
    std::vector<double> stages() const;
};

struct StepRule {
    double step0 = 0.0; // 0 = auto (h^2 / 4)
    double shrink = 0.5;
    double armijo = 1e-4;
    double grow = 1.3;
};

struct SolverConfig {
    BetaSchedule beta;
    StepRule step;
    double tol_grad = 1e-4;    // sup norm of the projected gradient
    double tol_energy = 1e-12; // relative stall threshold
    int max_iters = 400;       // per beta stage on the coarsest level
    int max_iters_fine = 60;   // per beta stage on refined (warm-started) levels
    std::uint64_t seed = 0;
    double jitter = 0.0; // relative amplitude of seeded initial-guess noise
    int levels = 4;      // multigrid-style warm start depth (1 = single level)
    int fine_stage_tail = 3; // beta stages replayed on refined levels
    bool polish = true;
    // Bulk refresh: between stages, re-solve each component's linear problem
    // on its current support (the polish step) so that the fronts push with
    // equilibrated bulk profiles; the descent then only moves interfaces.
    bool bulk_refresh = true;
    int equilibrate_rounds = 2; // refresh+descend rounds at beta_max, finest level
    // Final support refinement: ring-by-ring shifts of each facing interface,
    // kept only when the segregated energy strictly decreases.
    int refine_rounds = 40;
    double supp_factor = 10.0;  // eps_supp = supp_factor * h^2 * |u|_inf
    int threads = 1;
};

struct IterRecord {
    int level = 0;
    int stage = 0;
    double beta = 0.0;
    int iter = 0;
    double total = 0.0;
    double penalty = 0.0;
    double grad_norm = 0.0;
    double step = 0.0;
};

struct StageSummary {
    int level = 0;
    int stage = 0;
    double beta = 0.0;
    int iters = 0;
    bool converged = false;
    double total = 0.0;
    double penalty = 0.0;
    std::vector<double> pair_overlap; // ordered (i, j), i < j
    std::vector<double> rayleigh;     // problem B: Dirichlet integral per normalized component
};

struct SolverTrace {
    std::vector<IterRecord> iters;
    std::vector<StageSummary> stages;
    double initial_penalty = 0.0;
    double final_penalty = 0.0;
    bool overlap_warning = false; // overlap failed to decrease across 3 stages
    std::vector<double> polish_lambda; // problem B eigenvalues after polish
    std::vector<double> polish_pair_distance;
    bool polished = false;
};

// What to solve. Dirichlet data (problem A) is supplied as a function so that
// warm-start levels can evaluate it on their own lattices.
struct ProblemSpec {
    std::shared_ptr<const Grid> grid;
    ProblemTag problem = ProblemTag::A;
    int k = 2;
    std::function<double(int, double, double)> data_fn;  // A: f_i(x, y)
    std::vector<std::array<double, 2>> seeds;            // B: empty = auto placement
    CostSpec cost;                                       // B
};

// Problem A: damped extension of each f_i, clipped nonnegative, supports kept
// at distance >= 1 + 2h. Problem B: normalized cos^2 bumps at the seed
// locations (auto seeds by farthest-point sampling from the boundary).
// Rejects collar supports closer than 1 and seed sets that cannot host
// disjoint bumps.
DensityVector initial_guess(const ProblemSpec& spec, std::shared_ptr<const Grid> grid,
                            const SolverConfig& cfg);

// One beta stage of projected gradient descent with backtracking. Appends its
// iteration records and the stage summary to the trace. Throws SolverError on
// step underflow (< 1e-14).
StageSummary descend_stage(DensityVector& state, double beta, const SolverConfig& cfg,
                           const DiskStencil& st, SolverTrace& trace, int level = 0,
                           int stage = 0);

// Checkpoint/resume: a run can be restarted from the state captured after a
// (level, stage) pair; the callback fires after every completed stage.
struct ResumePoint {
    int level = 0;
    int stage = -1; // last completed stage index at that level
    std::vector<std::vector<double>> field_values;
};
using StageCallback = std::function<void(int level, int stage, const DensityVector&)>;

// Full beta-continuation run over `cfg.levels` grids, warm starting each
// level and each stage, followed by the optional hard-segregation polish.
std::pair<DensityVector, SolverTrace> solve(const ProblemSpec& spec, const SolverConfig& cfg,
                                            const ResumePoint* resume = nullptr,
                                            const StageCallback& on_stage = {});

struct PolishResult {
    std::vector<std::vector<std::uint8_t>> supports; // thresholded + eroded masks
    std::vector<double> eps;                         // thresholds used
    std::vector<double> lambda;                      // problem B eigenvalues
    std::vector<double> pair_distance;               // ordered pairs (i, j), i < j
};

// Threshold supports at eps_supp, enforce pairwise distance >= 1 by symmetric
// erosion, then re-solve each component's linear problem on its fixed support
// (A: harmonic, B: smallest eigenpair by inverse power iteration). With
// `refine` the facing interfaces are then shifted ring by ring as long as the
// segregated energy strictly decreases (cfg.refine_rounds cap).
PolishResult hard_segregation_polish(DensityVector& state, const SolverConfig& cfg,
                                     bool refine = false);

// Enforces the state's constraints in place (collar data / nonnegativity /
// normalization).
void project_state(DensityVector& state);

} // namespace segreg
