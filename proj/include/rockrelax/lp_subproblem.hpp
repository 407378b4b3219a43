#pragma once

#include <vector>

namespace rockrelax {

// The probability-perturbation step: minimize  sum_i c_i t_i + theta * |t|_1  subject to
// sum_i t_i = 0 and per-sample box bounds keeping p + t a probability vector.
// With stringent_bounds the upper bound is min(p_i, 1 - p_i) instead of 1 - p_i.
struct TSubproblem {
    std::vector<double> costs;
    std::vector<double> probs;
    double theta = 0.0;
    bool stringent_bounds = true;

    int size() const { return static_cast<int>(costs.size()); }
};

// Exact vertex optimum via bounded-variable simplex on the split t = t+ - t-.
// Always feasible (t = 0); the result never has a larger objective than t = 0.
std::vector<double> solve_t_lp(const TSubproblem& prob);

// Brute-force optimum over all basic solutions of the split program. Test oracle,
// exponential in the size; restricted to N <= 8.
std::vector<double> enumerate_vertices(const TSubproblem& prob);

// sum_i c_i t_i + theta * |t|_1
double t_lp_objective(const TSubproblem& prob, const std::vector<double>& t);

// Indices with p_i + t_i <= 1e-9 / N: the samples the perturbation removed.
// Vertex solutions put t_i exactly at -p_i, so the threshold only absorbs round-off.
std::vector<int> deleted_indices(const std::vector<double>& probs, const std::vector<double>& t);

} // namespace rockrelax
