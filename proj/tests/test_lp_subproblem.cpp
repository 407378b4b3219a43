#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rockrelax/lp_subproblem.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace rockrelax;

TEST_CASE("equal costs leave the distribution alone") {
    TSubproblem prob;
    prob.costs = {2.2, 2.2, 2.2, 2.2, 2.2};
    prob.probs = {0.1, 0.3, 0.2, 0.25, 0.15};
    prob.theta = 0.3;
    std::vector<double> t = solve_t_lp(prob);
    for (double v : t)
        CHECK(v == 0.0);
}

TEST_CASE("a cheap sample absorbs all the expensive mass") {
    TSubproblem prob;
    prob.costs = {10.0, 0.0};
    prob.probs = {0.5, 0.5};
    prob.theta = 0.05;
    std::vector<double> t = solve_t_lp(prob);
    CHECK(t[0] == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(t[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(t_lp_objective(prob, t) == doctest::Approx(-4.95).epsilon(1e-12));
}

TEST_CASE("a steep transfer price freezes the distribution") {
    TSubproblem prob;
    prob.costs = {5.0, 1.0, 3.0};
    prob.probs = {0.2, 0.5, 0.3};
    prob.theta = 4.5; // larger than the cost spread 4: every move pays 2*theta > gain
    std::vector<double> t = solve_t_lp(prob);
    for (double v : t)
        CHECK(v == 0.0);
}

TEST_CASE("single-sample problems cannot move") {
    TSubproblem prob;
    prob.costs = {7.0};
    prob.probs = {1.0};
    prob.theta = 0.1;
    std::vector<double> ts = solve_t_lp(prob);
    std::vector<double> te = enumerate_vertices(prob);
    CHECK(ts[0] == 0.0);
    CHECK(te[0] == 0.0);
}

TEST_CASE("with free transfers everything flows to the cheapest sample") {
    TSubproblem prob;
    prob.costs = {3.0, 9.0, 1.0, 5.0};
    prob.probs = {0.25, 0.25, 0.25, 0.25};
    prob.theta = 0.0;
    std::vector<double> t = solve_t_lp(prob);
    // Capacities are 0.25 everywhere, so the two costly samples (9 and 5) each donate
    // their full mass to the two cheap ones (1 and 3): gain 0.25*8 + 0.25*2 = 2.5.
    CHECK(t_lp_objective(prob, t) == doctest::Approx(-2.5).epsilon(1e-12));
    std::vector<double> te = enumerate_vertices(prob);
    CHECK(t_lp_objective(prob, te) == doctest::Approx(-2.5).epsilon(1e-12));
    CHECK(t[1] == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(t[2] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("stringent bounds cap the receiver at its own mass") {
    TSubproblem prob;
    prob.costs = {10.0, 0.0};
    prob.probs = {0.7, 0.3};
    prob.theta = 0.05;

    prob.stringent_bounds = true;
    std::vector<double> tight = solve_t_lp(prob);
    CHECK(tight[0] == doctest::Approx(-0.3).epsilon(1e-12));
    CHECK(tight[1] == doctest::Approx(0.3).epsilon(1e-12));

    prob.stringent_bounds = false;
    std::vector<double> loose = solve_t_lp(prob);
    CHECK(loose[0] == doctest::Approx(-0.7).epsilon(1e-12));
    CHECK(loose[1] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("simplex matches brute-force enumeration on random instances") {
    std::mt19937 rng(271828182u);
    std::uniform_real_distribution<double> cost_dist(0.0, 10.0);
    std::uniform_real_distribution<double> theta_dist(0.0, 1.0);
    std::uniform_int_distribution<int> size_dist(1, 6);
    std::exponential_distribution<double> expo(1.0);

    for (int inst = 0; inst < 200; ++inst) {
        const int n = size_dist(rng);
        TSubproblem prob;
        prob.costs.resize(n);
        prob.probs.resize(n);
        prob.theta = theta_dist(rng);
        prob.stringent_bounds = (inst % 2 == 0);
        double psum = 0.0;
        for (int i = 0; i < n; ++i) {
            prob.costs[i] = cost_dist(rng);
            prob.probs[i] = (inst % 3 == 0) ? 1.0 : expo(rng) + 1e-3;
            psum += prob.probs[i];
        }
        for (int i = 0; i < n; ++i)
            prob.probs[i] /= psum;

        std::vector<double> t = solve_t_lp(prob);
        std::vector<double> oracle = enumerate_vertices(prob);

        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            sum += t[i];
            double room = 1.0 - prob.probs[i];
            double up = prob.stringent_bounds ? std::min(prob.probs[i], room) : room;
            CHECK(t[i] >= -prob.probs[i] - 1e-12);
            CHECK(t[i] <= up + 1e-12);
        }
        CHECK(std::abs(sum) <= 1e-12);

        double obj = t_lp_objective(prob, t);
        CHECK(obj <= 1e-15); // never worse than t = 0
        CHECK(std::abs(obj - t_lp_objective(prob, oracle)) <= 1e-9);
    }
}

TEST_CASE("deletion flags fire only when a sample loses all its mass") {
    std::vector<double> probs = {0.3, 0.7};
    CHECK(deleted_indices(probs, {-0.3, 0.3}) == std::vector<int>{0});
    CHECK(deleted_indices(probs, {-0.3 + 1e-8, 0.3 - 1e-8}).empty());
    CHECK(deleted_indices(probs, {0.0, 0.0}).empty());
    CHECK(deleted_indices({0.5, 0.5}, {-0.5, 0.5}) == std::vector<int>{0});
}

TEST_CASE("malformed subproblems are rejected") {
    TSubproblem prob;
    prob.costs = {1.0, 2.0};
    prob.probs = {0.5};
    CHECK_THROWS_AS(solve_t_lp(prob), std::invalid_argument);

    prob.probs = {0.5, 0.6};
    CHECK_THROWS_AS(solve_t_lp(prob), std::invalid_argument);

    prob.probs = {-0.1, 1.1};
    CHECK_THROWS_AS(solve_t_lp(prob), std::invalid_argument);

    prob.probs = {0.5, 0.5};
    prob.theta = -1.0;
    CHECK_THROWS_AS(solve_t_lp(prob), std::invalid_argument);

    TSubproblem empty;
    CHECK_THROWS_AS(solve_t_lp(empty), std::invalid_argument);

    TSubproblem big;
    big.costs.assign(9, 1.0);
    big.probs.assign(9, 1.0 / 9.0);
    big.theta = 0.1;
    CHECK_THROWS_AS(enumerate_vertices(big), std::invalid_argument);
    CHECK_NOTHROW(solve_t_lp(big));
}
