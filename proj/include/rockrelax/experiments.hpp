#pragma once

#include "rockrelax/adi.hpp"
#include "rockrelax/optimizers.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace rockrelax {

/// The four shipped experiments:
///   motivating - scalar two-atom toy problem, solved by scan + polish
///   ex1        - interval control problem, two-atom coefficient law
///   ex2        - interval control problem, log-normal sample average
///   ex3        - disk control problem, coefficient window
enum class ExampleKind { motivating, ex1, ex2, ex3 };

const char* to_string(ExampleKind kind);
const char* to_string(StopReason reason);

/// "motivating" / "ex1" / "ex2" / "ex3"; anything else is
/// std::invalid_argument.
ExampleKind parse_example(const std::string& name);

/// Everything a run needs; per-example defaults come from
/// make_default_config. `corruption` is the knob each example perturbs:
/// outlier mass for motivating/ex1, corrupted sample fraction for ex2,
/// window half-width for ex3.
struct ExperimentConfig {
    ExampleKind example = ExampleKind::ex1;
    double corruption = 0.05;
    double theta = 1.0;
    std::uint64_t seed = 1;

    // discretization
    int grid_cells = 256; // interval cells; also the motivating scan resolution
    int mesh_dof = 5185;  // disk vertex-count target
    int n_xi = 8;         // disk quadrature nodes
    int n_samples = 1000; // ex2 sample count
    int kkl_terms = 50;   // ex2 random-field truncation
    double sigma = 0.4;   // ex2 field amplitude
    double alpha = 1e-4;  // control regularization weight

    // ex1 plain solves: gradient descent, stop on |<z, grad>| < plain_tol
    double plain_tol = 1e-4;
    int plain_max_iter = 200000;

    // ex1 relaxation: projected descent jointly over (z, t2), stopping on the
    // same control-gradient product as the plain solves (bound-active
    // components excluded)
    double joint_tol = 1e-4;
    int joint_max_iter = 200000;

    // ex2/ex3 quasi-Newton z-phases
    double z_gtol = 1e-5;
    int z_max_iter = 1000;

    // ex2/ex3 alternating outer loop
    double t_tol = 1e-5;
    int max_outer = 50;
    double t_inner_tol = 1e-6; // ex3 projected-gradient t-phase
    int t_max_iter = 200;

    std::string output_dir; // empty: compute only, write nothing

    /// std::invalid_argument on anything out of range.
    void validate() const;
};

ExperimentConfig make_default_config(ExampleKind kind);

struct DeletionCount {
    int count = 0;
    int total = 0;
};

/// Derived quantities of one run. Iteration counts are reported for
/// inspection, never folded into any tolerance.
struct MetricsReport {
    double e_rel_rock = 0.0;      // ||z_rock - z_true|| / ||z_true||
    double e_rel_corrupted = 0.0; // ||z_corrupted - z_true|| / ||z_true||
    double e_ratio = 0.0;         // e_rel_corrupted / e_rel_rock
    // Var of the per-node state norms, corrupted run over relaxed run.
    // Only ex3 defines it; elsewhere it stays NaN.
    double v_ratio = std::numeric_limits<double>::quiet_NaN();
    DeletionCount corrupted_deleted; // corrupted atoms driven to p_i + t_i = 0
    DeletionCount clean_deleted;     // clean atoms lost the same way
    OptimizerReport true_report;
    OptimizerReport corrupted_report;
    int rock_outer_iterations = 0;
    long long rock_inner_iterations = 0; // summed over all inner phases
    long long rock_inner_evals = 0;      // objective evaluations, same scope
    std::string rock_stop;
    bool rock_converged = false;
};

/// Full artifact set of one run; the CSV writers serialize exactly these
/// fields. 1D examples leave ys empty; the motivating example has no PDE,
/// so its controls are the single scalar (xs = {0}) and eu_* stay empty.
struct ExperimentResult {
    ExperimentConfig config;
    std::vector<double> xs, ys;
    std::vector<double> z_true, z_corrupted, z_rock;
    std::vector<double> eu_true, eu_corrupted, eu_rock; // expected states
    std::vector<double> p_or_xi; // atom mass (motivating/ex1/ex2) or node (ex3)
    std::vector<double> t_star;
    std::vector<int> deleted; // 0/1 per t entry
    std::vector<ADITraceRow> trace;
    double linf_rock_vs_true = 0.0;
    MetricsReport metrics;
};

/// ||z - z_ref|| / ||z_ref|| in the given metric. std::domain_error when
/// the reference has norm zero, std::invalid_argument on a size mismatch.
double relative_l2_error(const std::vector<double>& z, const std::vector<double>& z_ref,
                         const InnerProduct& ip);

/// Weighted variance of corrupted_norms over weighted variance of
/// rock_norms (weights are normalized internally). 0/0 is reported as 1,
/// positive/0 as +inf.
double variance_ratio(const std::vector<double>& corrupted_norms,
                      const std::vector<double>& rock_norms,
                      const std::vector<double>& weights);

/// Run one example at cfg.theta. Writes the CSV set into cfg.output_dir
/// when that is nonempty.
ExperimentResult run_example(const ExperimentConfig& cfg);

/// One run per theta with the reference and corrupted solves shared across
/// the list; rows come back in input order. A single-element list matches
/// run_example bit for bit. Writes metrics.csv (one row per theta) into
/// cfg.output_dir when that is nonempty.
std::vector<ExperimentResult> theta_sweep(const ExperimentConfig& cfg,
                                          const std::vector<double>& thetas);

struct GammaScheduleEntry {
    double eps = 0.0;  // outlier mass, in [0, 1)
    double theta = 1.0; // penalty weight, > 0
};

/// eps_k = 2^-k, theta_k = eps_k^{-1/2}, k = 1..steps.
std::vector<GammaScheduleEntry> default_gamma_schedule(int steps);

struct GammaRow {
    int k = 0;
    double eps = 0.0;
    double theta = 0.0;
    double distance = 0.0; // trapezoid-L2 distance of z_rock,k to z_true
    double t2_star = 0.0;  // transfer coordinate at the relaxed optimum
};

/// Convergence study along a schedule of (eps_k, theta_k): for each entry
/// the relaxed interval problem (ex1 only: std::invalid_argument otherwise)
/// is solved to its global optimum and compared against the uncorrupted
/// reference. Both sides go through the same precomputed dense solution
/// operators - an outer scan plus golden-section refinement over the
/// transfer coordinate around inner direct solves - so a schedule entry
/// whose optimum deletes the outlier entirely reproduces the reference
/// bitwise and reports distance exactly 0. Writes gamma_schedule.csv into
/// cfg.output_dir when that is nonempty.
std::vector<GammaRow> gamma_schedule_study(const ExperimentConfig& cfg,
                                           const std::vector<GammaScheduleEntry>& schedule);

/// controls.csv, states.csv, t_vector.csv, metrics.csv, adi_trace.csv under
/// dir (created if missing). UTF-8, comma-separated, one header row, floats
/// printed with %.17g.
void write_run_outputs(const ExperimentResult& res, const std::string& dir);

/// metrics.csv with one row per sweep entry.
void write_sweep_outputs(const std::vector<ExperimentResult>& rows, const std::string& dir);

/// gamma_schedule.csv with columns k,eps,theta,distance.
void write_gamma_outputs(const std::vector<GammaRow>& rows, const std::string& dir);

} // namespace rockrelax
