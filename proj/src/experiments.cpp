#include "rockrelax/experiments.hpp"

#include "rockrelax/disk_mesh.hpp"
#include "rockrelax/elliptic_1d.hpp"
#include "rockrelax/elliptic_2d.hpp"
#include "rockrelax/grid.hpp"
#include "rockrelax/lp_subproblem.hpp"
#include "rockrelax/motivating.hpp"
#include "rockrelax/objectives.hpp"
#include "rockrelax/random_field.hpp"
#include "rockrelax/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <utility>

namespace rockrelax {

const char* to_string(ExampleKind kind) {
    switch (kind) {
    case ExampleKind::motivating: return "motivating";
    case ExampleKind::ex1: return "ex1";
    case ExampleKind::ex2: return "ex2";
    case ExampleKind::ex3: return "ex3";
    }
    return "?";
}

const char* to_string(StopReason reason) {
    switch (reason) {
    case StopReason::tolerance: return "tolerance";
    case StopReason::max_iter: return "max_iter";
    case StopReason::line_search_failure: return "line_search_failure";
    }
    return "?";
}

ExampleKind parse_example(const std::string& name) {
    if (name == "motivating") return ExampleKind::motivating;
    if (name == "ex1") return ExampleKind::ex1;
    if (name == "ex2") return ExampleKind::ex2;
    if (name == "ex3") return ExampleKind::ex3;
    throw std::invalid_argument("unknown example '" + name +
                                "' (expected motivating, ex1, ex2 or ex3)");
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
    switch (example) {
    case ExampleKind::motivating:
    case ExampleKind::ex1:
        if (!(corruption > 0.0 && corruption < 1.0)) fail("corruption must be in (0, 1)");
        break;
    case ExampleKind::ex2:
        if (!(corruption >= 0.0 && corruption < 1.0)) fail("corruption must be in [0, 1)");
        break;
    case ExampleKind::ex3:
        if (!(corruption > 0.0 && corruption < 0.5)) fail("corruption must be in (0, 0.5)");
        break;
    }
    if (!(theta > 0.0)) fail("theta must be positive");
    if (grid_cells < 2) fail("grid_cells must be at least 2");
    if (mesh_dof < 10) fail("mesh_dof must be at least 10");
    if (n_xi < 1) fail("n_xi must be at least 1");
    if (n_samples < 1) fail("n_samples must be at least 1");
    if (kkl_terms < 1) fail("kkl_terms must be at least 1");
    if (!(sigma > 0.0)) fail("sigma must be positive");
    if (!(alpha > 0.0)) fail("alpha must be positive");
    if (!(plain_tol > 0.0) || !(joint_tol > 0.0) || !(z_gtol > 0.0) || !(t_tol > 0.0) ||
        !(t_inner_tol > 0.0))
        fail("tolerances must be positive");
    if (plain_max_iter < 1 || joint_max_iter < 1 || z_max_iter < 1 || max_outer < 1 ||
        t_max_iter < 1)
        fail("iteration caps must be at least 1");
}

ExperimentConfig make_default_config(ExampleKind kind) {
    ExperimentConfig cfg;
    cfg.example = kind;
    switch (kind) {
    case ExampleKind::motivating:
        cfg.corruption = 0.05;
        cfg.theta = 1.0;
        cfg.grid_cells = 512; // scan resolution of the (x, t2) square
        break;
    case ExampleKind::ex1:
        cfg.corruption = 0.05;
        cfg.theta = 1.0;
        break;
    case ExampleKind::ex2:
        cfg.corruption = 0.05;
        cfg.theta = 5e-2;
        break;
    case ExampleKind::ex3:
        cfg.corruption = 0.4; // window half-width
        cfg.theta = 0.1;
        cfg.alpha = 1e-5;
        cfg.t_tol = 1e-2; // outer loop compares t iterates in the quadrature L2 norm
        cfg.t_inner_tol = 1e-4;
        cfg.z_max_iter = 400;
        break;
    }
    return cfg;
}

double relative_l2_error(const std::vector<double>& z, const std::vector<double>& z_ref,
                         const InnerProduct& ip) {
    if (z.size() != z_ref.size())
        throw std::invalid_argument("relative_l2_error: size mismatch");
    const double ref = ip.norm(z_ref);
    if (ref == 0.0) throw std::domain_error("relative_l2_error: reference norm is zero");
    std::vector<double> diff(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) diff[i] = z[i] - z_ref[i];
    return ip.norm(diff) / ref;
}

double variance_ratio(const std::vector<double>& corrupted_norms,
                      const std::vector<double>& rock_norms,
                      const std::vector<double>& weights) {
    if (corrupted_norms.size() != weights.size() || rock_norms.size() != weights.size())
        throw std::invalid_argument("variance_ratio: size mismatch");
    if (weights.empty()) throw std::invalid_argument("variance_ratio: empty inputs");
    double wsum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("variance_ratio: negative weight");
        wsum += w;
    }
    if (wsum <= 0.0) throw std::invalid_argument("variance_ratio: zero total weight");
    auto var = [&](const std::vector<double>& v) {
        double mean = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) mean += weights[i] * v[i];
        mean /= wsum;
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) s += weights[i] * (v[i] - mean) * (v[i] - mean);
        return s / wsum;
    };
    const double vc = var(corrupted_norms);
    const double vr = var(rock_norms);
    if (vc == 0.0 && vr == 0.0) return 1.0;
    return vc / vr; // vr == 0 gives +inf
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_csv(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary); // byte-stable line endings everywhere
    if (!out) throw std::runtime_error("cannot open " + p.string() + " for writing");
    return out;
}

const char* const kMetricsHeader =
    "example,corruption,theta,seed,e_rel_rock,e_rel_corrupted,e_ratio,v_ratio,"
    "corrupted_deleted_count,corrupted_deleted_total,clean_deleted_count,clean_deleted_total,"
    "true_iterations,true_evals,true_stop,corrupted_iterations,corrupted_evals,corrupted_stop,"
    "rock_outer_iterations,rock_inner_iterations,rock_inner_evals,rock_stop";

void write_metrics_row(std::ofstream& out, const ExperimentResult& r) {
    const MetricsReport& m = r.metrics;
    out << to_string(r.config.example) << ',' << fmt(r.config.corruption) << ','
        << fmt(r.config.theta) << ',' << r.config.seed << ',' << fmt(m.e_rel_rock) << ','
        << fmt(m.e_rel_corrupted) << ',' << fmt(m.e_ratio) << ',' << fmt(m.v_ratio) << ','
        << m.corrupted_deleted.count << ',' << m.corrupted_deleted.total << ','
        << m.clean_deleted.count << ',' << m.clean_deleted.total << ','
        << m.true_report.iterations << ',' << m.true_report.objective_evals << ','
        << to_string(m.true_report.termination_reason) << ',' << m.corrupted_report.iterations
        << ',' << m.corrupted_report.objective_evals << ','
        << to_string(m.corrupted_report.termination_reason) << ',' << m.rock_outer_iterations
        << ',' << m.rock_inner_iterations << ',' << m.rock_inner_evals << ',' << m.rock_stop
        << '\n';
}

double linf_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

void fill_errors(MetricsReport& m, const std::vector<double>& z_rock,
                 const std::vector<double>& z_corr, const std::vector<double>& z_true,
                 const InnerProduct& ip) {
    m.e_rel_rock = relative_l2_error(z_rock, z_true, ip);
    m.e_rel_corrupted = relative_l2_error(z_corr, z_true, ip);
    m.e_ratio = m.e_rel_corrupted / m.e_rel_rock; // +inf when the relaxed error is zero
}

void fill_adi_counters(MetricsReport& m, const ADIResult& adi) {
    m.rock_outer_iterations = adi.outer_iterations;
    for (const ADITraceRow& row : adi.trace) {
        m.rock_inner_iterations += row.inner.iterations;
        m.rock_inner_evals += row.inner.objective_evals;
    }
    m.rock_stop = to_string(adi.stop);
    m.rock_converged = adi.converged();
}

std::vector<int> deletion_flags(int n, const std::vector<int>& deleted) {
    std::vector<int> flags(static_cast<std::size_t>(n), 0);
    for (int idx : deleted) flags[static_cast<std::size_t>(idx)] = 1;
    return flags;
}

// Weighted combination of per-atom states; atoms with zero weight skip their
// solve, matching the convention of the expectation objectives.
std::vector<double> expected_state_1d(const DiscreteDistribution1D& dist,
                                      const std::vector<double>& w,
                                      const std::vector<double>& z) {
    std::vector<double> eu(z.size(), 0.0);
    for (int i = 0; i < dist.n_atoms(); ++i) {
        if (w[static_cast<std::size_t>(i)] == 0.0) continue;
        StateField1D s = solve_state_1d_mid(dist.coef_mid[static_cast<std::size_t>(i)], z,
                                            *dist.grid);
        for (std::size_t v = 0; v < eu.size(); ++v)
            eu[v] += w[static_cast<std::size_t>(i)] * s.values[v];
    }
    return eu;
}

// ---------------------------------------------------------------------------
// motivating: scalar problem, no PDE. The plain minimizers are immediate
// (both plain objectives are affine in x on [0, 1]), so their reports are
// zero-work placeholders; the relaxed solve goes through the scan + polish.
// ---------------------------------------------------------------------------

ExperimentResult run_motivating(const ExperimentConfig& cfg) {
    MotivatingInstance inst;
    inst.eps = cfg.corruption;
    inst.theta = cfg.theta;
    const MotivatingSolution sol = solve_rockafellian_numeric(inst, cfg.grid_cells);

    ExperimentResult res;
    res.config = cfg;
    res.xs = {0.0};
    res.z_true = {1.0};      // argmin of (1 - x)/2 on [0, 1]
    res.z_corrupted = {0.0}; // argmin of (1 + x)/2 on [0, 1]
    res.z_rock = {sol.x};
    res.p_or_xi = {1.0 - cfg.corruption, cfg.corruption};
    res.t_star = {sol.t[0], sol.t[1]};
    const auto del = deleted_indices(res.p_or_xi, res.t_star);
    res.deleted = deletion_flags(2, del);
    res.linf_rock_vs_true = std::abs(1.0 - sol.x);

    MetricsReport& m = res.metrics;
    fill_errors(m, res.z_rock, res.z_corrupted, res.z_true, InnerProduct::euclidean());
    m.corrupted_deleted = {res.deleted[1], 1}; // the outlier atom sits at index 1
    m.clean_deleted = {res.deleted[0], 1};
    m.true_report.final_value = phi_uncorrupted(1.0);
    m.corrupted_report.final_value = phi_corrupted(0.0, cfg.corruption);
    m.rock_stop = "scan"; // grid scan + polish has no iterative failure mode
    m.rock_converged = true;
    return res;
}

// ---------------------------------------------------------------------------
// ex1: interval problem with the two-atom coefficient law. Plain solves by
// gradient descent on |<z, grad>|; the relaxation by projected descent
// jointly over (z, t2) with t2 clamped to its transfer interval.
// ---------------------------------------------------------------------------

std::vector<ExperimentResult> sweep_ex1(const ExperimentConfig& cfg,
                                        const std::vector<double>& thetas) {
    const Grid1D grid = Grid1D::uniform(cfg.grid_cells);
    const int n = grid.n_nodes();
    const InnerProduct ip = control_inner_product(grid);
    RockafellianConfig ocfg;
    ocfg.alpha = cfg.alpha;
    ocfg.q_norm = 2;
    ocfg.u_star = target_sine(grid);

    const DiscreteDistribution1D dist_true =
        make_constant_coef_distribution(grid, {2.0}, {1.0});
    const DiscreteDistribution1D dist_corr = make_two_atom_distribution(grid, cfg.corruption);
    const LineSearchConfig ls;

    // The source enters the state only through interior nodes, so the two
    // boundary values are pure regularization appendages with exact optimum
    // zero; optimizing them from the all-ones start would just overlay an
    // alpha-rate decay relic on every reported control. Descend on the
    // interior and report the boundary at its known optimum.
    const int ni = n - 2;
    auto embed = [n](const std::vector<double>& zi) {
        std::vector<double> z(static_cast<std::size_t>(n), 0.0);
        std::copy(zi.begin(), zi.end(), z.begin() + 1);
        return z;
    };
    auto interior = [](std::vector<double> v) {
        v.erase(v.begin());
        v.pop_back();
        return v;
    };
    const std::vector<double> z0(static_cast<std::size_t>(ni), 1.0);
    const InnerProduct ipi =
        InnerProduct::diagonal(std::vector<double>(static_cast<std::size_t>(ni), grid.h));

    auto plain = [&](const DiscreteDistribution1D& dist) {
        auto f = [&](const std::vector<double>& zi) {
            return objective_saa(embed(zi), dist, ocfg);
        };
        auto g = [&](const std::vector<double>& zi) {
            return interior(grad_z_saa(embed(zi), dist, ocfg));
        };
        return armijo_gd(f, g, z0, cfg.plain_tol, ls, cfg.plain_max_iter, ipi);
    };
    const OptimResult r_true = plain(dist_true);
    const OptimResult r_corr = plain(dist_corr);

    const auto [t_lo, t_hi] = two_atom_t_bounds(dist_corr);
    std::vector<double> jw(static_cast<std::size_t>(ni), grid.h);
    jw.push_back(1.0); // t2 enters the joint metric with unit weight
    const InnerProduct jip = InnerProduct::diagonal(std::move(jw));

    std::vector<ExperimentResult> rows;
    rows.reserve(thetas.size());
    for (double theta : thetas) {
        RockafellianConfig rcfg = ocfg;
        rcfg.theta = theta;
        auto fj = [&](const std::vector<double>& x) {
            const std::vector<double> z = embed({x.begin(), x.begin() + ni});
            return rock_objective_ex1(z, x[static_cast<std::size_t>(ni)], dist_corr, rcfg);
        };
        auto gj = [&](const std::vector<double>& x) {
            const std::vector<double> z = embed({x.begin(), x.begin() + ni});
            auto [gz, gt] = rock_grad_ex1(z, x[static_cast<std::size_t>(ni)], dist_corr, rcfg);
            std::vector<double> gi = interior(std::move(gz));
            gi.push_back(gt);
            return gi;
        };
        auto proj = [&](std::vector<double> x) {
            x[static_cast<std::size_t>(ni)] =
                std::clamp(x[static_cast<std::size_t>(ni)], t_lo, t_hi);
            return x;
        };
        std::vector<double> x0 = z0;
        x0.push_back(0.0); // relaxation anchored at t = 0
        // same control-gradient stop as the plain solves, so both descents
        // leave their slow low-influence modes at a comparable stage and the
        // reported control difference measures the distributions, not the
        // iteration budgets
        const OptimResult rj =
            projected_gd(fj, gj, proj, x0, cfg.joint_tol, ls, cfg.joint_max_iter, jip,
                         ProjectedStop::control_gradient_product);

        const double t2 = rj.x[static_cast<std::size_t>(ni)];
        ExperimentResult res;
        res.config = cfg;
        res.config.theta = theta;
        res.xs = grid.nodes;
        res.z_true = embed(r_true.x);
        res.z_corrupted = embed(r_corr.x);
        res.z_rock = embed({rj.x.begin(), rj.x.begin() + ni});
        res.p_or_xi = dist_corr.probs;
        res.t_star = {-t2, t2}; // the first atom gives up the mass t2
        const std::vector<double> w_rock = {dist_corr.probs[0] - t2, dist_corr.probs[1] + t2};
        res.deleted = deletion_flags(2, deleted_indices(dist_corr.probs, res.t_star));
        res.eu_true = expected_state_1d(dist_true, {1.0}, res.z_true);
        res.eu_corrupted = expected_state_1d(dist_corr, dist_corr.probs, res.z_corrupted);
        res.eu_rock = expected_state_1d(dist_corr, w_rock, res.z_rock);
        res.linf_rock_vs_true = linf_distance(res.z_true, res.z_rock);

        MetricsReport& m = res.metrics;
        fill_errors(m, res.z_rock, res.z_corrupted, res.z_true, ip);
        m.corrupted_deleted = {res.deleted[0], 1}; // the outlier coefficient atom is first
        m.clean_deleted = {res.deleted[1], 1};
        m.true_report = r_true.report;
        m.corrupted_report = r_corr.report;
        m.rock_inner_iterations = rj.report.iterations;
        m.rock_inner_evals = rj.report.objective_evals;
        m.rock_stop = to_string(rj.report.termination_reason);
        m.rock_converged = rj.report.termination_reason == StopReason::tolerance;
        rows.push_back(std::move(res));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// ex2: sample-average problem over the log-normal coefficient field. The
// corrupted set scales the first M sample rows; the relaxation re-weights
// samples through the transfer LP inside the alternating loop.
// ---------------------------------------------------------------------------

std::vector<ExperimentResult> sweep_ex2(const ExperimentConfig& cfg,
                                        const std::vector<double>& thetas) {
    const Grid1D grid = Grid1D::uniform(cfg.grid_cells);
    const int n_samples = cfg.n_samples;
    const int m_corrupt = static_cast<int>(std::llround(cfg.corruption * n_samples));
    if (m_corrupt >= n_samples)
        throw std::invalid_argument("config: corruption fraction rounds to every sample");

    const InnerProduct ip = control_inner_product(grid);
    RockafellianConfig ocfg;
    ocfg.alpha = cfg.alpha;
    ocfg.q_norm = 1;
    ocfg.u_star.assign(static_cast<std::size_t>(grid.n_nodes()), 1.0);

    const KKLCoefficient coef = KKLCoefficient::make(cfg.sigma, cfg.kkl_terms);
    const SampleSet clean = sample_standard_normal(n_samples, cfg.kkl_terms, cfg.seed);
    const SampleSet corrupted = corrupt_samples(clean, m_corrupt);
    const DiscreteDistribution1D dist_true = make_kkl_distribution(grid, coef, clean);
    const DiscreteDistribution1D dist_corr = make_kkl_distribution(grid, coef, corrupted);
    const std::vector<double> z0(static_cast<std::size_t>(grid.n_nodes()), 1.0);
    const LineSearchConfig ls;

    auto plain = [&](const DiscreteDistribution1D& dist) {
        auto f = [&](const std::vector<double>& z) { return objective_saa(z, dist, ocfg); };
        auto g = [&](const std::vector<double>& z) { return grad_z_saa(z, dist, ocfg); };
        return bfgs(f, g, z0, cfg.z_gtol, cfg.z_max_iter, ls, ip);
    };
    const OptimResult r_true = plain(dist_true);
    const OptimResult r_corr = plain(dist_corr);

    std::vector<ExperimentResult> rows;
    rows.reserve(thetas.size());
    for (double theta : thetas) {
        RockafellianConfig rcfg = ocfg;
        rcfg.theta = theta;
        ADIProblem prob = make_adi_problem_ex2(dist_corr, rcfg, /*stringent_bounds=*/true);
        prob.z_gtol = cfg.z_gtol;
        prob.z_max_iter = cfg.z_max_iter;
        prob.line_search = ls;
        ADIConfig acfg;
        acfg.t_tol = cfg.t_tol;
        acfg.t_metric = TMetric::l1;
        acfg.max_outer = cfg.max_outer;
        acfg.z_solver = ZSolver::bfgs;
        acfg.t_solver = TSolver::lp;
        const ADIResult adi = run_adi(prob, z0, acfg);

        ExperimentResult res;
        res.config = cfg;
        res.config.theta = theta;
        res.xs = grid.nodes;
        res.z_true = r_true.x;
        res.z_corrupted = r_corr.x;
        res.z_rock = adi.z;
        res.p_or_xi = dist_corr.probs;
        res.t_star = adi.t;
        const auto del = deleted_indices(dist_corr.probs, adi.t);
        res.deleted = deletion_flags(n_samples, del);
        std::vector<double> w_rock(dist_corr.probs);
        for (std::size_t i = 0; i < w_rock.size(); ++i) w_rock[i] += adi.t[i];
        res.eu_true = expected_state_1d(dist_true, dist_true.probs, res.z_true);
        res.eu_corrupted = expected_state_1d(dist_corr, dist_corr.probs, res.z_corrupted);
        res.eu_rock = expected_state_1d(dist_corr, w_rock, res.z_rock);
        res.trace = adi.trace;
        res.linf_rock_vs_true = linf_distance(res.z_true, res.z_rock);

        MetricsReport& m = res.metrics;
        fill_errors(m, res.z_rock, res.z_corrupted, res.z_true, ip);
        int del_corr = 0;
        for (int idx : del)
            if (idx < m_corrupt) ++del_corr;
        m.corrupted_deleted = {del_corr, m_corrupt};
        m.clean_deleted = {static_cast<int>(del.size()) - del_corr, n_samples - m_corrupt};
        m.true_report = r_true.report;
        m.corrupted_report = r_corr.report;
        fill_adi_counters(m, adi);
        rows.push_back(std::move(res));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// ex3: disk problem with the coefficient window. The uncorrupted reference
// pins the coefficient parameter at the window center, so it gets its own
// deterministic solve sharing the mass matrix and warm-started CG.
// ---------------------------------------------------------------------------

class DeterministicDiskSolve {
public:
    DeterministicDiskSolve(const DiskMesh2D& mesh, const SparseSPDMatrix& mass,
                           const std::vector<double>& ustar, double alpha)
        : mesh_(&mesh), mass_(&mass), ustar_(&ustar), alpha_(alpha) {
        P1Assembler assembler(mesh);
        const auto coef = assembler.coef_at_centroids(
            [](double px, double py) { return eval_osc(3.5, px, py); });
        stiffness_ = assembler.assemble(coef);
    }

    double objective(const std::vector<double>& z) const {
        const std::vector<double>& u = state(z);
        std::vector<double> r(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) r[i] = u[i] - (*ustar_)[i];
        return 0.5 * mass_dot(r, r) + 0.5 * alpha_ * mass_dot(z, z);
    }

    std::vector<double> gradient(const std::vector<double>& z) const {
        const std::vector<double>& u = state(z);
        std::vector<double> r(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) r[i] = u[i] - (*ustar_)[i];
        std::vector<double> mr(r.size());
        mass_->matvec(r.data(), mr.data());
        std::vector<double> p_free =
            solve_cg(stiffness_, restrict_free(*mesh_, mr), warm_adjoint_, 1e-10);
        warm_adjoint_ = p_free;
        std::vector<double> g = extend_by_zero(*mesh_, p_free);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += alpha_ * z[i];
        return g;
    }

    const std::vector<double>& state(const std::vector<double>& z) const {
        if (!cache_u_.empty() && z == cache_z_) return cache_u_;
        std::vector<double> mz(z.size());
        mass_->matvec(z.data(), mz.data());
        std::vector<double> u_free =
            solve_cg(stiffness_, restrict_free(*mesh_, mz), warm_state_, 1e-10);
        warm_state_ = u_free;
        cache_z_ = z;
        cache_u_ = extend_by_zero(*mesh_, u_free);
        return cache_u_;
    }

private:
    double mass_dot(const std::vector<double>& a, const std::vector<double>& b) const {
        std::vector<double> mb(b.size());
        mass_->matvec(b.data(), mb.data());
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * mb[i];
        return s;
    }

    const DiskMesh2D* mesh_;
    const SparseSPDMatrix* mass_;
    const std::vector<double>* ustar_;
    double alpha_;
    SparseSPDMatrix stiffness_;
    mutable std::vector<double> warm_state_, warm_adjoint_;
    mutable std::vector<double> cache_z_, cache_u_;
};

std::vector<ExperimentResult> sweep_ex3(const ExperimentConfig& cfg,
                                        const std::vector<double>& thetas) {
    const DiskMesh2D mesh = build_disk_mesh(cfg.mesh_dof);
    RockafellianConfig ocfg;
    ocfg.alpha = cfg.alpha;
    ocfg.q_norm = 2;
    ocfg.u_star.assign(mesh.vx.size(), 1.0);
    const LineSearchConfig ls;

    // One problem object for the corrupted anchor solve and the per-node
    // state norms; each theta gets its own below (theta sits inside the
    // objective). All of them share the mesh.
    Ex3Problem anchor(mesh, cfg.corruption, ocfg, cfg.n_xi);
    anchor.reuse_state_guesses(true);
    const InnerProduct zip = anchor.z_inner_product();
    const std::vector<double> z0(mesh.vx.size(), 1.0);
    const std::vector<double> t0(static_cast<std::size_t>(anchor.n_xi()), 0.0);

    // Dense quasi-Newton throughout: the z-subproblems are quadratics whose
    // conditioning (alpha = 1e-5) starves the limited-memory variant under a
    // backtracking line search, while the full update converges in a few
    // hundred iterations.
    DeterministicDiskSolve det(mesh, anchor.mass(), ocfg.u_star, cfg.alpha);
    auto f_true = [&](const std::vector<double>& z) { return det.objective(z); };
    auto g_true = [&](const std::vector<double>& z) { return det.gradient(z); };
    const OptimResult r_true = bfgs(f_true, g_true, z0, cfg.z_gtol, cfg.z_max_iter, ls, zip);

    auto f_corr = [&](const std::vector<double>& z) { return anchor.objective(z, t0); };
    auto g_corr = [&](const std::vector<double>& z) { return anchor.grad_z(z, t0); };
    const OptimResult r_corr = bfgs(f_corr, g_corr, z0, cfg.z_gtol, cfg.z_max_iter, ls, zip);

    // Per-node state norms of the corrupted run, reused by every theta row.
    const auto& us_corr = anchor.node_states(r_corr.x, t0);
    const int n_xi = anchor.n_xi();
    std::vector<double> norms_corr(static_cast<std::size_t>(n_xi));
    std::vector<double> xi_weights(static_cast<std::size_t>(n_xi));
    for (int j = 0; j < n_xi; ++j) {
        const auto& u = us_corr[static_cast<std::size_t>(j)];
        norms_corr[static_cast<std::size_t>(j)] = std::sqrt(anchor.mass_dot(u, u));
        xi_weights[static_cast<std::size_t>(j)] =
            anchor.xi_rule().weights[static_cast<std::size_t>(j)] * anchor.density();
    }
    auto weighted_state_sum = [&](const std::vector<std::vector<double>>& us) {
        std::vector<double> eu(mesh.vx.size(), 0.0);
        for (int j = 0; j < n_xi; ++j)
            for (std::size_t v = 0; v < eu.size(); ++v)
                eu[v] += xi_weights[static_cast<std::size_t>(j)] *
                         us[static_cast<std::size_t>(j)][v];
        return eu;
    };
    const std::vector<double> eu_true = det.state(r_true.x);
    const std::vector<double> eu_corr = weighted_state_sum(us_corr);

    std::vector<ExperimentResult> rows;
    rows.reserve(thetas.size());
    for (double theta : thetas) {
        RockafellianConfig rcfg = ocfg;
        rcfg.theta = theta;
        Ex3Problem prob(mesh, cfg.corruption, rcfg, cfg.n_xi);
        prob.reuse_state_guesses(true);
        ADIProblem ap = make_adi_problem_ex3(prob);
        ap.z_gtol = cfg.z_gtol;
        ap.z_max_iter = cfg.z_max_iter;
        ap.t_inner_tol = cfg.t_inner_tol;
        ap.t_max_iter = cfg.t_max_iter;
        ap.line_search = ls;
        ADIConfig acfg;
        acfg.t_tol = cfg.t_tol;
        acfg.t_metric = TMetric::L2_quadrature;
        acfg.max_outer = cfg.max_outer;
        acfg.z_solver = ZSolver::bfgs;
        acfg.t_solver = TSolver::projected_gd;
        const ADIResult adi = run_adi(ap, z0, acfg);

        const auto& us_rock = prob.node_states(adi.z, adi.t);
        std::vector<double> norms_rock(static_cast<std::size_t>(n_xi));
        for (int j = 0; j < n_xi; ++j) {
            const auto& u = us_rock[static_cast<std::size_t>(j)];
            norms_rock[static_cast<std::size_t>(j)] = std::sqrt(prob.mass_dot(u, u));
        }

        ExperimentResult res;
        res.config = cfg;
        res.config.theta = theta;
        res.xs = mesh.vx;
        res.ys = mesh.vy;
        res.z_true = r_true.x;
        res.z_corrupted = r_corr.x;
        res.z_rock = adi.z;
        res.p_or_xi = anchor.xi_rule().nodes;
        res.t_star = adi.t;
        res.deleted.assign(static_cast<std::size_t>(n_xi), 0); // no atom deletion here
        res.eu_true = eu_true;
        res.eu_corrupted = eu_corr;
        res.eu_rock = weighted_state_sum(us_rock);
        res.trace = adi.trace;
        res.linf_rock_vs_true = linf_distance(res.z_true, res.z_rock);

        MetricsReport& m = res.metrics;
        fill_errors(m, res.z_rock, res.z_corrupted, res.z_true, zip);
        m.v_ratio = variance_ratio(norms_corr, norms_rock, xi_weights);
        m.true_report = r_true.report;
        m.corrupted_report = r_corr.report;
        fill_adi_counters(m, adi);
        rows.push_back(std::move(res));
    }
    return rows;
}

std::vector<ExperimentResult> sweep_impl(const ExperimentConfig& cfg,
                                         const std::vector<double>& thetas) {
    switch (cfg.example) {
    case ExampleKind::motivating: {
        std::vector<ExperimentResult> rows;
        rows.reserve(thetas.size());
        for (double theta : thetas) {
            ExperimentConfig c = cfg;
            c.theta = theta;
            rows.push_back(run_motivating(c));
        }
        return rows;
    }
    case ExampleKind::ex1: return sweep_ex1(cfg, thetas);
    case ExampleKind::ex2: return sweep_ex2(cfg, thetas);
    case ExampleKind::ex3: return sweep_ex3(cfg, thetas);
    }
    throw std::logic_error("unreachable example kind");
}

} // namespace

ExperimentResult run_example(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResult res = std::move(sweep_impl(cfg, {cfg.theta}).front());
    if (!cfg.output_dir.empty()) write_run_outputs(res, cfg.output_dir);
    return res;
}

std::vector<ExperimentResult> theta_sweep(const ExperimentConfig& cfg,
                                          const std::vector<double>& thetas) {
    cfg.validate();
    if (thetas.empty()) throw std::invalid_argument("theta_sweep: empty theta list");
    for (double theta : thetas)
        if (!(theta > 0.0)) throw std::invalid_argument("theta_sweep: thetas must be positive");
    std::vector<ExperimentResult> rows = sweep_impl(cfg, thetas);
    if (!cfg.output_dir.empty()) write_sweep_outputs(rows, cfg.output_dir);
    return rows;
}

// ---------------------------------------------------------------------------
// Convergence study along an (eps, theta) schedule. Everything is reduced to
// dense algebra on the two coefficient atoms so the inner minimizations are
// exact (one SPD solve), keeping solver noise out of the reported distances:
// a schedule entry whose global optimum deletes the outlier reproduces the
// reference weights (0, 1) exactly and hence the reference control bitwise.
// ---------------------------------------------------------------------------

namespace {

// In-place Cholesky solve of a dense SPD system, row-major.
std::vector<double> dense_spd_solve(std::vector<double> a, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int j = 0; j < n; ++j) {
        double d = a[static_cast<std::size_t>(j) * n + j];
        for (int k = 0; k < j; ++k) {
            const double l = a[static_cast<std::size_t>(j) * n + k];
            d -= l * l;
        }
        if (d <= 0.0) throw std::runtime_error("dense solve: matrix not positive definite");
        d = std::sqrt(d);
        a[static_cast<std::size_t>(j) * n + j] = d;
        for (int i = j + 1; i < n; ++i) {
            double s = a[static_cast<std::size_t>(i) * n + j];
            for (int k = 0; k < j; ++k)
                s -= a[static_cast<std::size_t>(i) * n + k] *
                     a[static_cast<std::size_t>(j) * n + k];
            a[static_cast<std::size_t>(i) * n + j] = s / d;
        }
    }
    for (int i = 0; i < n; ++i) {
        double s = b[static_cast<std::size_t>(i)];
        for (int k = 0; k < i; ++k)
            s -= a[static_cast<std::size_t>(i) * n + k] * b[static_cast<std::size_t>(k)];
        b[static_cast<std::size_t>(i)] = s / a[static_cast<std::size_t>(i) * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < n; ++k)
            s -= a[static_cast<std::size_t>(k) * n + i] * b[static_cast<std::size_t>(k)];
        b[static_cast<std::size_t>(i)] = s / a[static_cast<std::size_t>(i) * n + i];
    }
    return b;
}

// Dense reduction of one coefficient atom: with S the nodal solution
// operator and W the trapezoid weights, gram = S^T W S and load = S^T W u*,
// so the misfit 1/2 ||S z - u*||_W^2 = 1/2 z^T gram z - load^T z + c0.
struct AtomOperator {
    std::vector<double> gram;
    std::vector<double> load;
};

AtomOperator build_atom_operator(const std::vector<double>& coef_mid, const Grid1D& grid,
                                 const std::vector<double>& ustar,
                                 const std::vector<double>& w) {
    const int n = grid.n_nodes();
    std::vector<std::vector<double>> cols(static_cast<std::size_t>(n));
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        e[static_cast<std::size_t>(j)] = 1.0;
        cols[static_cast<std::size_t>(j)] = solve_state_1d_mid(coef_mid, e, grid).values;
        e[static_cast<std::size_t>(j)] = 0.0;
    }
    AtomOperator op;
    op.gram.assign(static_cast<std::size_t>(n) * n, 0.0);
    op.load.assign(static_cast<std::size_t>(n), 0.0);
    std::vector<double> wc(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const auto& cj = cols[static_cast<std::size_t>(j)];
        for (int v = 0; v < n; ++v)
            wc[static_cast<std::size_t>(v)] = w[static_cast<std::size_t>(v)] *
                                              cj[static_cast<std::size_t>(v)];
        for (int k = j; k < n; ++k) {
            const auto& ck = cols[static_cast<std::size_t>(k)];
            double s = 0.0;
            for (int v = 0; v < n; ++v)
                s += wc[static_cast<std::size_t>(v)] * ck[static_cast<std::size_t>(v)];
            op.gram[static_cast<std::size_t>(j) * n + k] = s;
            op.gram[static_cast<std::size_t>(k) * n + j] = s;
        }
        double b = 0.0;
        for (int v = 0; v < n; ++v)
            b += wc[static_cast<std::size_t>(v)] * ustar[static_cast<std::size_t>(v)];
        op.load[static_cast<std::size_t>(j)] = b;
    }
    return op;
}

struct GammaSolver {
    int n = 0;
    double alpha = 0.0;
    std::vector<double> w; // trapezoid weights
    double c0 = 0.0;       // 1/2 u*^T W u*, shared by both atoms
    std::vector<AtomOperator> ops;

    std::vector<double> solve_z(const std::vector<double>& wts) const {
        std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
        std::vector<double> rhs(static_cast<std::size_t>(n), 0.0);
        for (std::size_t atom = 0; atom < ops.size(); ++atom) {
            const double wa = wts[atom];
            if (wa == 0.0) continue;
            const AtomOperator& op = ops[atom];
            for (std::size_t e = 0; e < a.size(); ++e) a[e] += wa * op.gram[e];
            for (int i = 0; i < n; ++i)
                rhs[static_cast<std::size_t>(i)] += wa * op.load[static_cast<std::size_t>(i)];
        }
        for (int i = 0; i < n; ++i)
            a[static_cast<std::size_t>(i) * n + i] += alpha * w[static_cast<std::size_t>(i)];
        return dense_spd_solve(std::move(a), std::move(rhs));
    }

    // Full objective at the inner optimum for the given atom weights.
    double reduced_value(const std::vector<double>& wts, double penalty) const {
        const std::vector<double> z = solve_z(wts);
        double total = penalty;
        for (std::size_t atom = 0; atom < ops.size(); ++atom) {
            const double wa = wts[atom];
            if (wa == 0.0) continue;
            const AtomOperator& op = ops[atom];
            double quad = 0.0, lin = 0.0;
            for (int i = 0; i < n; ++i) {
                double row = 0.0;
                for (int k = 0; k < n; ++k)
                    row += op.gram[static_cast<std::size_t>(i) * n + k] *
                           z[static_cast<std::size_t>(k)];
                quad += z[static_cast<std::size_t>(i)] * row;
                lin += op.load[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(i)];
            }
            total += wa * (0.5 * quad - lin + c0);
        }
        double reg = 0.0;
        for (int i = 0; i < n; ++i)
            reg += w[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(i)] *
                   z[static_cast<std::size_t>(i)];
        return total + 0.5 * alpha * reg;
    }
};

} // namespace

std::vector<GammaScheduleEntry> default_gamma_schedule(int steps) {
    if (steps < 1) throw std::invalid_argument("gamma schedule needs at least one step");
    std::vector<GammaScheduleEntry> schedule;
    schedule.reserve(static_cast<std::size_t>(steps));
    for (int k = 1; k <= steps; ++k) {
        GammaScheduleEntry e;
        e.eps = std::ldexp(1.0, -k); // 2^-k, exact
        e.theta = 1.0 / std::sqrt(e.eps);
        schedule.push_back(e);
    }
    return schedule;
}

std::vector<GammaRow> gamma_schedule_study(const ExperimentConfig& cfg,
                                           const std::vector<GammaScheduleEntry>& schedule) {
    cfg.validate();
    if (cfg.example != ExampleKind::ex1)
        throw std::invalid_argument(
            "gamma_schedule_study: only ex1 has a transfer-coordinate schedule");
    if (schedule.empty()) throw std::invalid_argument("gamma_schedule_study: empty schedule");
    for (const GammaScheduleEntry& e : schedule) {
        if (!(e.eps >= 0.0 && e.eps < 1.0))
            throw std::invalid_argument("gamma_schedule_study: eps must be in [0, 1)");
        if (!(e.theta > 0.0))
            throw std::invalid_argument("gamma_schedule_study: theta must be positive");
    }

    const Grid1D grid = Grid1D::uniform(cfg.grid_cells);
    // Atom coefficients are fixed; only the masses move along the schedule,
    // so the dense reductions are built once.
    const DiscreteDistribution1D atoms =
        make_constant_coef_distribution(grid, {0.2, 2.0}, {0.5, 0.5});
    GammaSolver gs;
    gs.n = grid.n_nodes();
    gs.alpha = cfg.alpha;
    gs.w = trapezoid_weights(grid);
    const std::vector<double> ustar = target_sine(grid);
    for (int i = 0; i < gs.n; ++i)
        gs.c0 += 0.5 * gs.w[static_cast<std::size_t>(i)] * ustar[static_cast<std::size_t>(i)] *
                 ustar[static_cast<std::size_t>(i)];
    gs.ops.push_back(build_atom_operator(atoms.coef_mid[0], grid, ustar, gs.w));
    gs.ops.push_back(build_atom_operator(atoms.coef_mid[1], grid, ustar, gs.w));

    const std::vector<double> z_ref = gs.solve_z({0.0, 1.0});
    const InnerProduct ip = control_inner_product(grid);

    std::vector<GammaRow> rows;
    rows.reserve(schedule.size());
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const double eps = schedule[k].eps;
        const double theta = schedule[k].theta;
        const double p1 = eps, p2 = 1.0 - eps;
        const double lo = std::max(p1 - 1.0, -p2);
        const double hi = std::min(p1, 1.0 - p2);

        auto value = [&](double t2) {
            return gs.reduced_value({p1 - t2, p2 + t2}, theta * t2 * t2);
        };

        // Coarse scan so the refinement starts inside the global basin.
        const int scan_pts = 129;
        int best_i = 0;
        double best_v = value(lo);
        std::vector<double> ts(scan_pts), vs(scan_pts);
        for (int i = 0; i < scan_pts; ++i) {
            double t = lo + (hi - lo) * i / (scan_pts - 1);
            if (i == scan_pts - 1) t = hi;
            ts[static_cast<std::size_t>(i)] = t;
            vs[static_cast<std::size_t>(i)] = value(t);
            if (vs[static_cast<std::size_t>(i)] < best_v) {
                best_v = vs[static_cast<std::size_t>(i)];
                best_i = i;
            }
        }
        double a = ts[static_cast<std::size_t>(std::max(0, best_i - 1))];
        double b = ts[static_cast<std::size_t>(std::min(scan_pts - 1, best_i + 1))];
        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
        double f1 = value(x1), f2 = value(x2);
        for (int it = 0; it < 90 && (b - a) > 1e-13; ++it) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = value(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = value(x2);
            }
        }
        double t_star = 0.5 * (a + b);
        double v_star = value(t_star);
        // The exact interval ends stay candidates so a bound-active optimum
        // is reported at the stored bound, not a float one ulp away.
        for (double cand : {lo, hi}) {
            const double v = value(cand);
            if (v <= v_star) {
                v_star = v;
                t_star = cand;
            }
        }

        const std::vector<double> z_k = gs.solve_z({p1 - t_star, p2 + t_star});
        GammaRow row;
        row.k = static_cast<int>(k) + 1;
        row.eps = eps;
        row.theta = theta;
        row.t2_star = t_star;
        std::vector<double> diff(z_k.size());
        for (std::size_t i = 0; i < z_k.size(); ++i) diff[i] = z_k[i] - z_ref[i];
        row.distance = ip.norm(diff);
        rows.push_back(row);
    }
    if (!cfg.output_dir.empty()) write_gamma_outputs(rows, cfg.output_dir);
    return rows;
}

// ---------------------------------------------------------------------------
// CSV writers
// ---------------------------------------------------------------------------

void write_run_outputs(const ExperimentResult& res, const std::string& dir) {
    namespace fs = std::filesystem;
    const fs::path root(dir);
    fs::create_directories(root);
    const bool has_y = !res.ys.empty();
    {
        std::ofstream out = open_csv(root / "controls.csv");
        out << (has_y ? "x,y,z_true,z_corrupted,z_rock" : "x,z_true,z_corrupted,z_rock") << '\n';
        for (std::size_t i = 0; i < res.z_true.size(); ++i) {
            out << fmt(res.xs[i]) << ',';
            if (has_y) out << fmt(res.ys[i]) << ',';
            out << fmt(res.z_true[i]) << ',' << fmt(res.z_corrupted[i]) << ','
                << fmt(res.z_rock[i]) << '\n';
        }
    }
    {
        std::ofstream out = open_csv(root / "states.csv");
        out << (has_y ? "x,y,Eu_true,Eu_corrupted,Eu_rock" : "x,Eu_true,Eu_corrupted,Eu_rock")
            << '\n';
        for (std::size_t i = 0; i < res.eu_true.size(); ++i) {
            out << fmt(res.xs[i]) << ',';
            if (has_y) out << fmt(res.ys[i]) << ',';
            out << fmt(res.eu_true[i]) << ',' << fmt(res.eu_corrupted[i]) << ','
                << fmt(res.eu_rock[i]) << '\n';
        }
    }
    {
        std::ofstream out = open_csv(root / "t_vector.csv");
        out << "index,p_or_xi,t_star,deleted_flag\n";
        for (std::size_t i = 0; i < res.t_star.size(); ++i)
            out << i << ',' << fmt(res.p_or_xi[i]) << ',' << fmt(res.t_star[i]) << ','
                << res.deleted[i] << '\n';
    }
    {
        std::ofstream out = open_csv(root / "metrics.csv");
        out << kMetricsHeader << '\n';
        write_metrics_row(out, res);
    }
    {
        std::ofstream out = open_csv(root / "adi_trace.csv");
        out << "outer_iter,phase,objective,t_distance,inner_iters,inner_evals\n";
        for (const ADITraceRow& row : res.trace)
            out << row.outer << ',' << row.phase << ',' << fmt(row.objective) << ','
                << fmt(row.t_distance) << ',' << row.inner.iterations << ','
                << row.inner.objective_evals << '\n';
    }
}

void write_sweep_outputs(const std::vector<ExperimentResult>& rows, const std::string& dir) {
    namespace fs = std::filesystem;
    const fs::path root(dir);
    fs::create_directories(root);
    std::ofstream out = open_csv(root / "metrics.csv");
    out << kMetricsHeader << '\n';
    for (const ExperimentResult& r : rows) write_metrics_row(out, r);
}

void write_gamma_outputs(const std::vector<GammaRow>& rows, const std::string& dir) {
    namespace fs = std::filesystem;
    const fs::path root(dir);
    fs::create_directories(root);
    std::ofstream out = open_csv(root / "gamma_schedule.csv");
    out << "k,eps,theta,distance\n";
    for (const GammaRow& r : rows)
        out << r.k << ',' << fmt(r.eps) << ',' << fmt(r.theta) << ',' << fmt(r.distance) << '\n';
}

} // namespace rockrelax
