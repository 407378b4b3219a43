#include "rockrelax/adi.hpp"

#include "rockrelax/lp_subproblem.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace rockrelax {

namespace {

void check_adi(const ADIProblem& prob, const ADIConfig& cfg) {
    if (!(cfg.t_tol > 0.0)) throw std::invalid_argument("t_tol must be positive");
    if (cfg.max_outer < 1) throw std::invalid_argument("max_outer must be at least one");
    if (prob.t_dim < 1) throw std::invalid_argument("t dimension must be at least one");
    if (!prob.objective || !prob.grad_z)
        throw std::invalid_argument("objective and grad_z hooks are required");
    if (cfg.t_solver == TSolver::lp && !prob.exact_t_step)
        throw std::invalid_argument("lp t-step requires the exact_t_step hook");
    if (cfg.t_solver == TSolver::projected_gd && (!prob.grad_t || !prob.project_t))
        throw std::invalid_argument("projected_gd t-step requires grad_t and project_t hooks");
}

double t_distance(const ADIConfig& cfg, const ADIProblem& prob, const std::vector<double>& a,
                  const std::vector<double>& b) {
    if (cfg.t_metric == TMetric::l1) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
        return s;
    }
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return prob.t_ip.norm(d);
}

} // namespace

const char* to_string(ADIStop s) {
    switch (s) {
        case ADIStop::tolerance: return "tolerance";
        case ADIStop::max_outer: return "max_outer";
        case ADIStop::inner_failures: return "inner_failures";
    }
    return "unknown";
}

ADIResult run_adi(const ADIProblem& prob, std::vector<double> z0, const ADIConfig& cfg) {
    check_adi(prob, cfg);

    ADIResult res;
    res.z = std::move(z0);
    res.t.assign(static_cast<std::size_t>(prob.t_dim), 0.0);

    int consecutive_failures = 0;
    for (int outer = 1; outer <= cfg.max_outer; ++outer) {
        res.outer_iterations = outer;

        // z half-step at fixed t.
        const std::vector<double> t_fixed = res.t;
        Objective fz = [&](const std::vector<double>& z) { return prob.objective(z, t_fixed); };
        Gradient gz = [&](const std::vector<double>& z) { return prob.grad_z(z, t_fixed); };
        OptimResult zres =
            cfg.z_solver == ZSolver::bfgs
                ? bfgs(fz, gz, res.z, prob.z_gtol, prob.z_max_iter, prob.line_search, prob.z_ip)
                : lbfgs(fz, gz, res.z, prob.z_gtol, prob.z_lbfgs_memory, prob.line_search,
                        prob.z_max_iter, prob.z_ip);
        res.z = std::move(zres.x);

        ADITraceRow zrow;
        zrow.outer = outer;
        zrow.phase = 'z';
        zrow.objective = prob.objective(res.z, res.t);
        zrow.inner = zres.report;
        zrow.inner_failed = zres.report.termination_reason == StopReason::line_search_failure;
        res.trace.push_back(zrow);

        consecutive_failures = zrow.inner_failed ? consecutive_failures + 1 : 0;
        if (consecutive_failures >= 2) {
            res.stop = ADIStop::inner_failures;
            return res;
        }

        // t half-step at fixed z.
        const std::vector<double> t_prev = res.t;
        ADITraceRow trow;
        trow.outer = outer;
        trow.phase = 't';
        if (cfg.t_solver == TSolver::lp) {
            res.t = prob.exact_t_step(res.z);
        } else {
            const std::vector<double> z_fixed = res.z;
            Objective ft = [&](const std::vector<double>& t) { return prob.objective(z_fixed, t); };
            Gradient gt = [&](const std::vector<double>& t) { return prob.grad_t(z_fixed, t); };
            OptimResult tres =
                projected_gd(ft, gt, prob.project_t, res.t, prob.t_inner_tol, prob.line_search,
                             prob.t_max_iter, prob.t_ip, ProjectedStop::step_norm);
            res.t = std::move(tres.x);
            trow.inner = tres.report;
            trow.inner_failed = tres.report.termination_reason == StopReason::line_search_failure;
        }
        trow.objective = prob.objective(res.z, res.t);
        trow.t_distance = t_distance(cfg, prob, res.t, t_prev);
        res.trace.push_back(trow);

        consecutive_failures = trow.inner_failed ? consecutive_failures + 1 : 0;
        if (consecutive_failures >= 2) {
            res.stop = ADIStop::inner_failures;
            return res;
        }
        if (trow.t_distance < cfg.t_tol) {
            res.stop = ADIStop::tolerance;
            return res;
        }
    }
    res.stop = ADIStop::max_outer;
    return res;
}

ADIProblem make_adi_problem_ex2(const DiscreteDistribution1D& dist, const RockafellianConfig& ocfg,
                                bool stringent_bounds) {
    ADIProblem prob;
    prob.t_dim = dist.n_atoms();
    prob.objective = [&dist, &ocfg](const std::vector<double>& z, const std::vector<double>& t) {
        return rock_objective_ex2(z, t, dist, ocfg);
    };
    prob.grad_z = [&dist, &ocfg](const std::vector<double>& z, const std::vector<double>& t) {
        return rock_grad_z_ex2(z, t, dist, ocfg);
    };
    prob.exact_t_step = [&dist, &ocfg, stringent_bounds](const std::vector<double>& z) {
        TSubproblem sub;
        sub.costs = t_subproblem_costs(z, dist, ocfg);
        sub.probs = dist.probs;
        sub.theta = ocfg.theta;
        sub.stringent_bounds = stringent_bounds;
        return solve_t_lp(sub);
    };
    prob.z_ip = control_inner_product(*dist.grid);
    return prob;
}

ADIProblem make_adi_problem_ex3(const Ex3Problem& ex3) {
    ADIProblem prob;
    prob.t_dim = ex3.n_xi();
    prob.objective = [&ex3](const std::vector<double>& z, const std::vector<double>& t) {
        return ex3.objective(z, t);
    };
    prob.grad_z = [&ex3](const std::vector<double>& z, const std::vector<double>& t) {
        return ex3.grad_z(z, t);
    };
    prob.grad_t = [&ex3](const std::vector<double>& z, const std::vector<double>& t) {
        return ex3.grad_t(z, t);
    };
    prob.project_t = [&ex3](const std::vector<double>& t) { return ex3.project_t(t); };
    prob.z_ip = ex3.z_inner_product();
    prob.t_ip = ex3.t_inner_product();
    return prob;
}

} // namespace rockrelax
