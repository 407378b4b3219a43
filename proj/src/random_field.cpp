#include "rockrelax/random_field.hpp"

#include "rockrelax/errors.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace rockrelax {

namespace {

constexpr double kPi = 3.14159265358979323846;

double uniform53(std::mt19937_64& gen) {
    return (static_cast<double>(gen() >> 11) + 0.5) * 0x1p-53;
}

} // namespace

KKLCoefficient KKLCoefficient::make(double sigma, int d) {
    if (d < 1)
        throw std::invalid_argument("KKLCoefficient: need at least one mode");
    KKLCoefficient coef;
    coef.sigma = sigma;
    coef.d = d;
    coef.lambdas.resize(d);
    for (int k = 1; k <= d; ++k) {
        double odd = 2.0 * k - 1.0;
        coef.lambdas[k - 1] = 4.0 / (odd * odd * kPi * kPi);
    }
    return coef;
}

SampleSet sample_standard_normal(int n, int d, std::uint64_t seed) {
    if (n < 1 || d < 1)
        throw std::invalid_argument("sample_standard_normal: n and d must be >= 1");
    SampleSet s;
    s.n = n;
    s.d = d;
    s.seed = seed;
    s.n_corrupted = 0;
    const std::size_t total = static_cast<std::size_t>(n) * d;
    s.samples.resize(total);

    std::mt19937_64 gen(seed);
    for (std::size_t i = 0; i < total; i += 2) {
        double u1 = uniform53(gen);
        double u2 = uniform53(gen);
        double r = std::sqrt(-2.0 * std::log(u1));
        s.samples[i] = r * std::cos(2.0 * kPi * u2);
        if (i + 1 < total)
            s.samples[i + 1] = r * std::sin(2.0 * kPi * u2);
    }
    return s;
}

SampleSet corrupt_samples(const SampleSet& s, int m) {
    if (m < 0 || m > s.n)
        throw std::invalid_argument("corrupt_samples: m out of range");
    if (m > 0 && s.n_corrupted > 0)
        throw std::invalid_argument("corrupt_samples: set is already corrupted");
    SampleSet out = s;
    out.n_corrupted = m;
    const std::size_t head = static_cast<std::size_t>(m) * s.d;
    for (std::size_t i = 0; i < head; ++i)
        out.samples[i] *= 10.0;
    return out;
}

double eval_kkl(const KKLCoefficient& coef, double x, const double* xi) {
    double expo = 0.0;
    for (int k = 0; k < coef.d; ++k) {
        double root = std::sqrt(coef.lambdas[k]);
        expo += root * std::sin(x / root) * xi[k];
    }
    return std::exp(coef.sigma * expo);
}

double eval_kkl(const KKLCoefficient& coef, double x, const std::vector<double>& xi) {
    if (static_cast<int>(xi.size()) != coef.d)
        throw std::invalid_argument("eval_kkl: xi dimension mismatch");
    return eval_kkl(coef, x, xi.data());
}

double eval_osc(double xi, double px, double py) {
    double denom = xi + 3.0 * std::sin(10.0 * kPi * std::sqrt(px * px + py * py));
    if (!(denom > 0.0))
        throw CoercivityError("eval_osc: coefficient denominator is not positive");
    return 1.0 / denom;
}

double eval_osc_dxi(double xi, double px, double py) {
    double a = eval_osc(xi, px, py);
    return -a * a;
}

double contrast_ratio(double xi) {
    if (!(xi > 3.0))
        throw std::invalid_argument("contrast_ratio: requires xi > 3");
    return (xi + 3.0) / (xi - 3.0);
}

} // namespace rockrelax
