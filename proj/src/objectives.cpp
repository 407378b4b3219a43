#include "rockrelax/objectives.hpp"

#include "rockrelax/elliptic_1d.hpp"
#include "rockrelax/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rockrelax {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kFeasSlack = 1e-12;

void check_config(const RockafellianConfig& cfg, std::size_t n_points) {
    if (!(cfg.alpha > 0.0))
        throw std::invalid_argument("alpha must be positive");
    if (!(cfg.theta > 0.0))
        throw std::invalid_argument("theta must be positive");
    if (cfg.q_norm != 1 && cfg.q_norm != 2)
        throw std::invalid_argument("q_norm must be 1 or 2");
    if (cfg.u_star.size() != n_points)
        throw std::invalid_argument("u_star size does not match the discretization");
}

void check_dist(const DiscreteDistribution1D& dist) {
    if (dist.grid == nullptr)
        throw std::invalid_argument("distribution carries no grid");
    if (dist.coef_mid.size() != dist.probs.size())
        throw std::invalid_argument("probs / coefficient table size mismatch");
    const std::size_t cells = static_cast<std::size_t>(dist.grid->n_cells);
    for (const auto& row : dist.coef_mid)
        if (row.size() != cells)
            throw std::invalid_argument("coefficient table has wrong cell count");
    for (double p : dist.probs)
        if (!(p >= 0.0))
            throw std::invalid_argument("atom probabilities must be nonnegative");
}

struct WeightedEval {
    double half_misfit = 0.0; // 1/2 sum_i w_i ||u_i - u*||^2
    double znorm2 = 0.0;      // trapezoid ||z||^2
    std::vector<double> costs;
    std::vector<double> grad;
};

// One pass over the atoms: per-atom state solve, misfit cost, and (when
// asked) the adjoint-accumulated Riesz gradient alpha z + sum_i w_i p_i.
// Zero-weight atoms are skipped unless their cost is explicitly wanted.
WeightedEval eval_weighted(const std::vector<double>& z, const DiscreteDistribution1D& dist,
                           const RockafellianConfig& cfg, const std::vector<double>& weights,
                           bool want_costs, bool want_grad) {
    const Grid1D& grid = *dist.grid;
    const int nn = grid.n_nodes();
    if (static_cast<int>(z.size()) != nn)
        throw std::invalid_argument("control size does not match the grid");
    check_config(cfg, static_cast<std::size_t>(nn));

    const std::vector<double> tw = trapezoid_weights(grid);
    WeightedEval ev;
    for (int j = 0; j < nn; ++j) ev.znorm2 += tw[j] * z[j] * z[j];
    if (want_costs) ev.costs.assign(dist.probs.size(), 0.0);
    if (want_grad) ev.grad.assign(nn, 0.0);

    std::vector<double> resid(nn);
    for (int i = 0; i < dist.n_atoms(); ++i) {
        const double w = weights[static_cast<std::size_t>(i)];
        if (w == 0.0 && !want_costs) continue;

        StateField1D u = solve_state_1d_mid(dist.coef_mid[static_cast<std::size_t>(i)], z, grid);
        double cost = 0.0;
        for (int j = 0; j < nn; ++j) {
            resid[j] = u.values[j] - cfg.u_star[j];
            cost += tw[j] * resid[j] * resid[j];
        }
        if (want_costs) ev.costs[static_cast<std::size_t>(i)] = cost;
        ev.half_misfit += 0.5 * w * cost;

        if (want_grad && w != 0.0) {
            StateField1D p =
                solve_adjoint_1d_mid(dist.coef_mid[static_cast<std::size_t>(i)], resid, grid);
            for (int j = 0; j < nn; ++j) ev.grad[j] += w * p.values[j];
        }
    }
    if (want_grad)
        for (int j = 0; j < nn; ++j) ev.grad[j] += cfg.alpha * z[j];
    return ev;
}

// Perturbed atom weights p + t for the l1-penalized objective, after the
// feasibility screen. Slack-sized negatives are clamped to zero.
std::vector<double> perturbed_weights_ex2(const std::vector<double>& t,
                                          const DiscreteDistribution1D& dist) {
    const std::size_t n = dist.probs.size();
    if (t.size() != n)
        throw std::invalid_argument("perturbation size does not match the atom count");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = dist.probs[i];
        if (t[i] < -p - kFeasSlack || t[i] > p + kFeasSlack)
            throw InfeasibleError("perturbation exceeds the componentwise bound |t_i| <= p_i");
        if (p + t[i] > 1.0 + kFeasSlack)
            throw InfeasibleError("perturbed probability exceeds one");
        total += p + t[i];
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw InfeasibleError("perturbed probabilities do not sum to one");
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = std::max(0.0, dist.probs[i] + t[i]);
    return w;
}

} // namespace

DiscreteDistribution1D make_constant_coef_distribution(const Grid1D& grid,
                                                       const std::vector<double>& atoms,
                                                       const std::vector<double>& probs) {
    if (atoms.size() != probs.size())
        throw std::invalid_argument("atoms and probs must pair up");
    DiscreteDistribution1D dist;
    dist.grid = &grid;
    dist.probs = probs;
    dist.coef_mid.reserve(atoms.size());
    for (double a : atoms) {
        if (!(a > 0.0))
            throw CoercivityError("constant coefficient atom must be positive, got " +
                                  std::to_string(a));
        dist.coef_mid.emplace_back(static_cast<std::size_t>(grid.n_cells), a);
    }
    check_dist(dist);
    return dist;
}

DiscreteDistribution1D make_two_atom_distribution(const Grid1D& grid, double eps) {
    if (!(eps >= 0.0 && eps <= 1.0))
        throw std::invalid_argument("two-atom corruption must lie in [0, 1]");
    return make_constant_coef_distribution(grid, {0.2, 2.0}, {eps, 1.0 - eps});
}

DiscreteDistribution1D make_kkl_distribution(const Grid1D& grid, const KKLCoefficient& coef,
                                             const SampleSet& samples) {
    if (samples.d != coef.d)
        throw std::invalid_argument("sample dimension does not match the field truncation");
    if (samples.n < 1)
        throw std::invalid_argument("need at least one sample");
    DiscreteDistribution1D dist;
    dist.grid = &grid;
    dist.probs.assign(static_cast<std::size_t>(samples.n), 1.0 / samples.n);
    dist.coef_mid.assign(static_cast<std::size_t>(samples.n),
                         std::vector<double>(static_cast<std::size_t>(grid.n_cells)));
    for (int i = 0; i < samples.n; ++i)
        for (int c = 0; c < grid.n_cells; ++c)
            dist.coef_mid[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] =
                eval_kkl(coef, (c + 0.5) * grid.h, samples.row(i));
    check_dist(dist);
    return dist;
}

std::vector<double> target_sine(const Grid1D& grid) {
    std::vector<double> u(static_cast<std::size_t>(grid.n_nodes()));
    for (int j = 0; j < grid.n_nodes(); ++j) u[static_cast<std::size_t>(j)] = std::sin(kPi * grid.nodes[static_cast<std::size_t>(j)]);
    return u;
}

InnerProduct control_inner_product(const Grid1D& grid) {
    return InnerProduct::diagonal(trapezoid_weights(grid));
}

double objective_saa(const std::vector<double>& z, const DiscreteDistribution1D& dist,
                     const RockafellianConfig& cfg) {
    check_dist(dist);
    WeightedEval ev = eval_weighted(z, dist, cfg, dist.probs, false, false);
    return ev.half_misfit + 0.5 * cfg.alpha * ev.znorm2;
}

std::vector<double> grad_z_saa(const std::vector<double>& z, const DiscreteDistribution1D& dist,
                               const RockafellianConfig& cfg) {
    check_dist(dist);
    return eval_weighted(z, dist, cfg, dist.probs, false, true).grad;
}

std::vector<double> t_subproblem_costs(const std::vector<double>& z,
                                       const DiscreteDistribution1D& dist,
                                       const RockafellianConfig& cfg) {
    check_dist(dist);
    WeightedEval ev = eval_weighted(z, dist, cfg, dist.probs, true, false);
    for (double& c : ev.costs) c *= 0.5;
    return ev.costs;
}

std::pair<double, double> two_atom_t_bounds(const DiscreteDistribution1D& dist) {
    if (dist.n_atoms() != 2)
        throw std::invalid_argument("transfer bounds need exactly two atoms");
    const double p1 = dist.probs[0], p2 = dist.probs[1];
    return {std::max(p1 - 1.0, -p2), std::min(p1, 1.0 - p2)};
}

double rock_objective_ex1(const std::vector<double>& z, double t2,
                          const DiscreteDistribution1D& dist, const RockafellianConfig& cfg) {
    check_dist(dist);
    if (cfg.q_norm != 2)
        throw std::invalid_argument("two-atom relaxation uses the squared penalty (q_norm 2)");
    const auto [lo, hi] = two_atom_t_bounds(dist);
    if (t2 < lo - kFeasSlack || t2 > hi + kFeasSlack)
        throw InfeasibleError("transfer t2 leaves the probability simplex");
    const std::vector<double> w = {std::max(0.0, dist.probs[0] - t2),
                                   std::max(0.0, dist.probs[1] + t2)};
    WeightedEval ev = eval_weighted(z, dist, cfg, w, false, false);
    return ev.half_misfit + 0.5 * cfg.alpha * ev.znorm2 + cfg.theta * t2 * t2;
}

std::pair<std::vector<double>, double> rock_grad_ex1(const std::vector<double>& z, double t2,
                                                     const DiscreteDistribution1D& dist,
                                                     const RockafellianConfig& cfg) {
    check_dist(dist);
    if (cfg.q_norm != 2)
        throw std::invalid_argument("two-atom relaxation uses the squared penalty (q_norm 2)");
    const auto [lo, hi] = two_atom_t_bounds(dist);
    if (t2 < lo - kFeasSlack || t2 > hi + kFeasSlack)
        throw InfeasibleError("transfer t2 leaves the probability simplex");
    const std::vector<double> w = {std::max(0.0, dist.probs[0] - t2),
                                   std::max(0.0, dist.probs[1] + t2)};
    WeightedEval ev = eval_weighted(z, dist, cfg, w, true, true);
    const double gt = 0.5 * (ev.costs[1] - ev.costs[0]) + 2.0 * cfg.theta * t2;
    return {std::move(ev.grad), gt};
}

double rock_objective_ex2(const std::vector<double>& z, const std::vector<double>& t,
                          const DiscreteDistribution1D& dist, const RockafellianConfig& cfg) {
    check_dist(dist);
    if (cfg.q_norm != 1)
        throw std::invalid_argument("sample relaxation uses the l1 penalty (q_norm 1)");
    const std::vector<double> w = perturbed_weights_ex2(t, dist);
    WeightedEval ev = eval_weighted(z, dist, cfg, w, false, false);
    double l1 = 0.0;
    for (double ti : t) l1 += std::abs(ti);
    return ev.half_misfit + 0.5 * cfg.alpha * ev.znorm2 + cfg.theta * l1;
}

std::vector<double> rock_grad_z_ex2(const std::vector<double>& z, const std::vector<double>& t,
                                    const DiscreteDistribution1D& dist,
                                    const RockafellianConfig& cfg) {
    check_dist(dist);
    if (cfg.q_norm != 1)
        throw std::invalid_argument("sample relaxation uses the l1 penalty (q_norm 1)");
    const std::vector<double> w = perturbed_weights_ex2(t, dist);
    return eval_weighted(z, dist, cfg, w, false, true).grad;
}

Ex3Problem::Ex3Problem(const DiskMesh2D& mesh, double delta, RockafellianConfig cfg, int n_xi)
    : mesh_(&mesh), assembler_(mesh), delta_(delta), cfg_(std::move(cfg)) {
    if (!(delta > 0.0 && delta < 0.5))
        throw std::invalid_argument("uncertainty half-width must lie in (0, 0.5)");
    if (n_xi < 1)
        throw std::invalid_argument("need at least one quadrature node");
    check_config(cfg_, static_cast<std::size_t>(mesh.n_dof()));
    if (cfg_.q_norm != 2)
        throw std::invalid_argument("disk relaxation uses the squared penalty (q_norm 2)");
    mass_ = std::make_shared<SparseSPDMatrix>(assemble_mass(mesh));
    rule_ = gauss_legendre(n_xi, 3.5 - delta, 3.5 + delta);
    rho_ = 1.0 / (2.0 * delta);
    const auto& cen = assembler_.centroids();
    sin_term_.resize(cen.size());
    for (std::size_t t = 0; t < cen.size(); ++t)
        sin_term_[t] =
            3.0 * std::sin(10.0 * kPi * std::sqrt(cen[t][0] * cen[t][0] + cen[t][1] * cen[t][1]));
}

void Ex3Problem::reuse_state_guesses(bool enable) {
    reuse_guesses_ = enable;
    warm_state_.assign(static_cast<std::size_t>(n_xi()), {});
    warm_adjoint_.assign(static_cast<std::size_t>(n_xi()), {});
}

std::vector<double> Ex3Problem::project_t(std::vector<double> t) const {
    if (t.size() != static_cast<std::size_t>(n_xi()))
        throw std::invalid_argument("perturbation size does not match the quadrature rule");
    for (int j = 0; j < n_xi(); ++j)
        t[static_cast<std::size_t>(j)] =
            std::clamp(t[static_cast<std::size_t>(j)], t_lower(j), t_upper(j));
    return t;
}

std::vector<double> Ex3Problem::coef_per_tri(int j, double tj) const {
    const double xi = rule_.nodes[static_cast<std::size_t>(j)] + tj;
    std::vector<double> coef(sin_term_.size());
    for (std::size_t t = 0; t < sin_term_.size(); ++t) {
        const double denom = xi + sin_term_[t];
        if (!(denom > 0.0))
            throw CoercivityError("oscillatory coefficient lost positivity");
        coef[t] = 1.0 / denom;
    }
    return coef;
}

void Ex3Problem::check_zt(const std::vector<double>& z, const std::vector<double>& t) const {
    if (z.size() != static_cast<std::size_t>(mesh_->n_dof()))
        throw std::invalid_argument("control size does not match the mesh");
    if (t.size() != static_cast<std::size_t>(n_xi()))
        throw std::invalid_argument("perturbation size does not match the quadrature rule");
    for (int j = 0; j < n_xi(); ++j) {
        const double tj = t[static_cast<std::size_t>(j)];
        if (tj < t_lower(j) - kFeasSlack || tj > t_upper(j) + kFeasSlack)
            throw InfeasibleError("perturbed parameter leaves the uncertainty window");
    }
}

const std::vector<std::vector<double>>& Ex3Problem::states(const std::vector<double>& z,
                                                           const std::vector<double>& t) const {
    if (cache_valid_ && cache_z_ == z && cache_t_ == t) return cache_states_;
    cache_valid_ = false;
    const std::vector<double> rhs = restrict_free(*mesh_, mass_->matvec(z));
    cache_states_.assign(static_cast<std::size_t>(n_xi()), {});
    for (int j = 0; j < n_xi(); ++j) {
        const SparseSPDMatrix K = assembler_.assemble(coef_per_tri(j, t[static_cast<std::size_t>(j)]));
        std::vector<double> u_free;
        if (reuse_guesses_) {
            u_free = solve_cg(K, rhs, warm_state_[static_cast<std::size_t>(j)], 1e-10);
            warm_state_[static_cast<std::size_t>(j)] = u_free;
        } else {
            u_free = solve_cg(K, rhs, 1e-10);
        }
        cache_states_[static_cast<std::size_t>(j)] = extend_by_zero(*mesh_, u_free);
    }
    cache_z_ = z;
    cache_t_ = t;
    cache_valid_ = true;
    return cache_states_;
}

std::vector<double> Ex3Problem::adjoint_state(const std::vector<double>& u,
                                              const std::vector<double>& coef, int j) const {
    std::vector<double> resid(u.size());
    for (std::size_t v = 0; v < u.size(); ++v) resid[v] = u[v] - cfg_.u_star[v];
    const SparseSPDMatrix K = assembler_.assemble(coef);
    const std::vector<double> rhs = restrict_free(*mesh_, mass_->matvec(resid));
    if (!reuse_guesses_)
        return extend_by_zero(*mesh_, solve_cg(K, rhs, 1e-10));
    std::vector<double> p_free = solve_cg(K, rhs, warm_adjoint_[static_cast<std::size_t>(j)], 1e-10);
    warm_adjoint_[static_cast<std::size_t>(j)] = p_free;
    return extend_by_zero(*mesh_, p_free);
}

const std::vector<std::vector<double>>& Ex3Problem::node_states(const std::vector<double>& z,
                                                                const std::vector<double>& t) const {
    check_zt(z, t);
    return states(z, t);
}

double Ex3Problem::objective(const std::vector<double>& z, const std::vector<double>& t) const {
    check_zt(z, t);
    const auto& us = states(z, t);
    double val = 0.5 * cfg_.alpha * mass_dot(z, z);
    std::vector<double> resid(z.size());
    for (int j = 0; j < n_xi(); ++j) {
        const auto& u = us[static_cast<std::size_t>(j)];
        for (std::size_t v = 0; v < u.size(); ++v) resid[v] = u[v] - cfg_.u_star[v];
        const double cost = mass_dot(resid, resid);
        const double tj = t[static_cast<std::size_t>(j)];
        val += rule_.weights[static_cast<std::size_t>(j)] * rho_ *
               (0.5 * cost + 0.5 * cfg_.theta * tj * tj);
    }
    return val;
}

std::vector<double> Ex3Problem::grad_t(const std::vector<double>& z,
                                       const std::vector<double>& t) const {
    check_zt(z, t);
    const auto& us = states(z, t);
    std::vector<double> g(static_cast<std::size_t>(n_xi()));
    for (int j = 0; j < n_xi(); ++j) {
        const double tj = t[static_cast<std::size_t>(j)];
        std::vector<double> coef = coef_per_tri(j, tj);
        const std::vector<double> p = adjoint_state(us[static_cast<std::size_t>(j)], coef, j);
        // d a / d xi = -a^2, so the adjoint term -int a' grad u . grad p
        // carries coefficient +a^2 per triangle.
        for (double& c : coef) c *= c;
        const double shape =
            assembler_.grad_dot_sum(us[static_cast<std::size_t>(j)], p, coef);
        g[static_cast<std::size_t>(j)] = rule_.weights[static_cast<std::size_t>(j)] * rho_ *
                                         (cfg_.theta * tj + shape);
    }
    return g;
}

std::vector<double> Ex3Problem::grad_z(const std::vector<double>& z,
                                       const std::vector<double>& t) const {
    check_zt(z, t);
    const auto& us = states(z, t);
    std::vector<double> g(z.size());
    for (std::size_t v = 0; v < z.size(); ++v) g[v] = cfg_.alpha * z[v];
    for (int j = 0; j < n_xi(); ++j) {
        const std::vector<double> coef = coef_per_tri(j, t[static_cast<std::size_t>(j)]);
        const std::vector<double> p = adjoint_state(us[static_cast<std::size_t>(j)], coef, j);
        const double wj = rule_.weights[static_cast<std::size_t>(j)] * rho_;
        for (std::size_t v = 0; v < g.size(); ++v) g[v] += wj * p[v];
    }
    return g;
}

double Ex3Problem::mass_dot(const std::vector<double>& a, const std::vector<double>& b) const {
    const std::vector<double> mb = mass_->matvec(b);
    double s = 0.0;
    for (std::size_t v = 0; v < a.size(); ++v) s += a[v] * mb[v];
    return s;
}

InnerProduct Ex3Problem::z_inner_product() const {
    InnerProduct ip;
    auto mass = mass_;
    ip.dot = [mass](const std::vector<double>& a, const std::vector<double>& b) {
        const std::vector<double> mb = mass->matvec(b);
        double s = 0.0;
        for (std::size_t v = 0; v < a.size(); ++v) s += a[v] * mb[v];
        return s;
    };
    ip.apply = [mass](const std::vector<double>& v) { return mass->matvec(v); };
    return ip;
}

InnerProduct Ex3Problem::t_inner_product() const {
    std::vector<double> w(rule_.weights);
    for (double& wj : w) wj *= rho_;
    return InnerProduct::diagonal(std::move(w));
}

double rock_objective_ex3(const Ex3Problem& prob, const std::vector<double>& z,
                          const std::vector<double>& t) {
    return prob.objective(z, t);
}

std::vector<double> rock_grad_t_ex3(const Ex3Problem& prob, const std::vector<double>& z,
                                    const std::vector<double>& t) {
    return prob.grad_t(z, t);
}

std::vector<double> rock_grad_z_ex3(const Ex3Problem& prob, const std::vector<double>& z,
                                    const std::vector<double>& t) {
    return prob.grad_z(z, t);
}

} // namespace rockrelax
