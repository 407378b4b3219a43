#include "rockrelax/lp_subproblem.hpp"

#include "rockrelax/errors.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace rockrelax {

namespace {

constexpr double kPivotTol = 1e-12;

// Split formulation: variable j < N is t+_j (row coefficient +1), j >= N is t-_{j-N}
// (row coefficient -1). Both live in [0, upper_j].
struct SplitLP {
    int n = 0;
    std::vector<double> cost;
    std::vector<double> upper;

    double sign(int j) const { return j < n ? 1.0 : -1.0; }
};

SplitLP build_split(const TSubproblem& prob) {
    const int n = prob.size();
    if (n < 1)
        throw std::invalid_argument("t subproblem needs at least one sample");
    if (static_cast<int>(prob.probs.size()) != n)
        throw std::invalid_argument("t subproblem: costs and probs sizes differ");
    if (!(prob.theta >= 0.0))
        throw std::invalid_argument("t subproblem: theta must be nonnegative");
    double psum = 0.0;
    for (double p : prob.probs) {
        if (!(p >= 0.0))
            throw std::invalid_argument("t subproblem: probabilities must be nonnegative");
        psum += p;
    }
    if (std::abs(psum - 1.0) > 1e-9)
        throw std::invalid_argument("t subproblem: probabilities must sum to one");

    SplitLP lp;
    lp.n = n;
    lp.cost.resize(2 * n);
    lp.upper.resize(2 * n);
    for (int i = 0; i < n; ++i) {
        lp.cost[i] = prob.costs[i] + prob.theta;
        lp.cost[n + i] = prob.theta - prob.costs[i];
        double room = 1.0 - prob.probs[i];
        lp.upper[i] = prob.stringent_bounds ? std::min(prob.probs[i], room) : room;
        lp.upper[n + i] = prob.probs[i];
    }
    return lp;
}

std::vector<double> assemble_t(const SplitLP& lp, const std::vector<double>& x) {
    std::vector<double> t(lp.n);
    for (int i = 0; i < lp.n; ++i)
        t[i] = x[i] - x[lp.n + i];
    return t;
}

} // namespace

std::vector<double> solve_t_lp(const TSubproblem& prob) {
    SplitLP lp = build_split(prob);
    const int m = 2 * lp.n;

    // All variables start at their lower bound 0 with variable 0 basic (value 0):
    // a feasible, degenerate vertex. The single equality row keeps the basis 1x1.
    std::vector<char> at_upper(m, 0);
    int basic = 0;
    double xb = 0.0;

    const long long cap = 200LL * m + 1000;
    long long iter = 0;
    for (; iter < cap; ++iter) {
        const double y = lp.cost[basic] * lp.sign(basic);

        // Bland: lowest-index variable whose reduced cost allows improvement.
        int enter = -1;
        double dir = 0.0;
        for (int j = 0; j < m; ++j) {
            if (j == basic)
                continue;
            double r = lp.cost[j] - y * lp.sign(j);
            if (!at_upper[j] && r < -kPivotTol && lp.upper[j] > 0.0) {
                enter = j;
                dir = 1.0;
                break;
            }
            if (at_upper[j] && r > kPivotTol) {
                enter = j;
                dir = -1.0;
                break;
            }
        }
        if (enter < 0)
            break;

        // Moving x_enter by dir*delta changes the basic value at this rate.
        const double rate = -(lp.sign(enter) / lp.sign(basic)) * dir;
        const double limit_flip = lp.upper[enter];
        const double limit_basic = rate > 0.0 ? lp.upper[basic] - xb : xb;

        if (limit_basic <= limit_flip) {
            // The old basic variable hits a bound first: pivot.
            const double delta = limit_basic;
            at_upper[basic] = rate > 0.0 ? 1 : 0;
            double enter_val = at_upper[enter] ? lp.upper[enter] - delta : delta;
            at_upper[enter] = 0;
            basic = enter;
            xb = enter_val;
        } else {
            // The entering variable swaps bounds; the basis stays.
            xb += rate * limit_flip;
            at_upper[enter] ^= 1;
        }
    }
    if (iter >= cap)
        throw ConvergenceError("solve_t_lp: simplex failed to terminate");

    std::vector<double> x(m, 0.0);
    for (int j = 0; j < m; ++j)
        if (at_upper[j])
            x[j] = lp.upper[j];
    // Recompute the basic value from the equality row so the zero-sum is exact.
    double residual = 0.0;
    for (int j = 0; j < m; ++j)
        if (j != basic)
            residual += lp.sign(j) * x[j];
    x[basic] = -residual / lp.sign(basic);

    return assemble_t(lp, x);
}

std::vector<double> enumerate_vertices(const TSubproblem& prob) {
    SplitLP lp = build_split(prob);
    const int m = 2 * lp.n;
    if (lp.n > 8)
        throw std::invalid_argument("enumerate_vertices: restricted to N <= 8");

    std::vector<double> best_t(lp.n, 0.0);
    double best = 0.0; // t = 0 is always feasible
    std::vector<double> x(m, 0.0);

    for (int basic = 0; basic < m; ++basic) {
        const std::uint32_t patterns = 1u << (m - 1);
        for (std::uint32_t mask = 0; mask < patterns; ++mask) {
            double residual = 0.0;
            double cost_nb = 0.0;
            std::uint32_t bit = 1;
            for (int j = 0; j < m; ++j) {
                if (j == basic)
                    continue;
                double v = (mask & bit) ? lp.upper[j] : 0.0;
                x[j] = v;
                residual += lp.sign(j) * v;
                cost_nb += lp.cost[j] * v;
                bit <<= 1;
            }
            double xb = -residual / lp.sign(basic);
            if (xb < -1e-12 || xb > lp.upper[basic] + 1e-12)
                continue;
            xb = std::min(std::max(xb, 0.0), lp.upper[basic]);
            double obj = cost_nb + lp.cost[basic] * xb;
            if (obj < best) {
                best = obj;
                x[basic] = xb;
                best_t = assemble_t(lp, x);
            }
        }
    }
    return best_t;
}

double t_lp_objective(const TSubproblem& prob, const std::vector<double>& t) {
    if (t.size() != prob.costs.size())
        throw std::invalid_argument("t_lp_objective: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
        acc += prob.costs[i] * t[i] + prob.theta * std::abs(t[i]);
    return acc;
}

std::vector<int> deleted_indices(const std::vector<double>& probs, const std::vector<double>& t) {
    if (probs.size() != t.size())
        throw std::invalid_argument("deleted_indices: size mismatch");
    const double threshold = 1e-9 / static_cast<double>(probs.size());
    std::vector<int> out;
    for (std::size_t i = 0; i < probs.size(); ++i)
        if (probs[i] + t[i] <= threshold)
            out.push_back(static_cast<int>(i));
    return out;
}

} // namespace rockrelax
