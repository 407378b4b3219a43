#pragma once

#include <cstdint>
#include <vector>

namespace rockrelax {

// Truncated log-normal field a(x, xi) = exp(sigma * sum_k sqrt(lambda_k) sin(x/sqrt(lambda_k)) xi_k)
// with lambda_k = 4 / ((2k-1)^2 pi^2), the eigenvalues of the Brownian-motion covariance on [0,1].
struct KKLCoefficient {
    double sigma = 1.0;
    int d = 1;
    std::vector<double> lambdas;

    static KKLCoefficient make(double sigma, int d);
};

// Row-major n x d sample matrix plus the seed that produced it. Rows 0..n_corrupted-1
// have been scaled by the corruption map.
struct SampleSet {
    int n = 0;
    int d = 0;
    std::uint64_t seed = 0;
    int n_corrupted = 0;
    std::vector<double> samples;

    double at(int row, int col) const { return samples[static_cast<std::size_t>(row) * d + col]; }
    const double* row(int i) const { return samples.data() + static_cast<std::size_t>(i) * d; }
};

// Standard normal draws from mt19937_64 via Box-Muller, filled row by row.
// Pinned stream: each pair of outputs consumes two uniforms
//   u = ((mt() >> 11) + 0.5) * 2^-53   (53-bit, strictly inside (0,1))
// and yields r*cos(2*pi*u2), r*sin(2*pi*u2) with r = sqrt(-2*ln(u1)).
// When n*d is odd the trailing sin draw is discarded.
SampleSet sample_standard_normal(int n, int d, std::uint64_t seed);

// Scales rows 0..m-1 by 10 and records m. Refuses to corrupt an already corrupted
// set (that would compound to x100); pass m = 0 for a no-op copy.
SampleSet corrupt_samples(const SampleSet& s, int m);

double eval_kkl(const KKLCoefficient& coef, double x, const double* xi);
double eval_kkl(const KKLCoefficient& coef, double x, const std::vector<double>& xi);

// Oscillatory disk coefficient a(x, xi) = 1/(xi + 3 sin(10 pi |x|)) and its xi-derivative.
double eval_osc(double xi, double px, double py);
double eval_osc_dxi(double xi, double px, double py);

// sup_x a / inf_x a = (xi+3)/(xi-3); requires xi > 3.
double contrast_ratio(double xi);

} // namespace rockrelax
