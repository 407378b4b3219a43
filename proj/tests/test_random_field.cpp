#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rockrelax/errors.hpp"
#include "rockrelax/random_field.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

using namespace rockrelax;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("mode weights decay like the Brownian covariance spectrum") {
    KKLCoefficient coef = KKLCoefficient::make(0.5, 50);
    REQUIRE(coef.lambdas.size() == 50);
    CHECK(std::abs(coef.lambdas[0] - 4.0 / (kPi * kPi)) < 1e-15);
    for (int k = 0; k < 50; ++k) {
        CHECK(coef.lambdas[k] > 0.0);
        if (k > 0)
            CHECK(coef.lambdas[k] < coef.lambdas[k - 1]);
    }
    CHECK_THROWS_AS(KKLCoefficient::make(1.0, 0), std::invalid_argument);
}

TEST_CASE("sampling is deterministic in the seed") {
    SampleSet a = sample_standard_normal(37, 11, 123456789u);
    SampleSet b = sample_standard_normal(37, 11, 123456789u);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        CHECK(a.samples[i] == b.samples[i]);

    SampleSet c = sample_standard_normal(37, 11, 987654321u);
    int diffs = 0;
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        if (a.samples[i] != c.samples[i])
            ++diffs;
    CHECK(diffs > 300);
}

TEST_CASE("a million draws have standard-normal mean and variance") {
    SampleSet s = sample_standard_normal(1000, 1000, 20240101u);
    double mean = 0.0;
    for (double v : s.samples)
        mean += v;
    mean /= static_cast<double>(s.samples.size());
    CHECK(std::abs(mean) <= 0.005);

    double var = 0.0;
    for (double v : s.samples)
        var += (v - mean) * (v - mean);
    var /= static_cast<double>(s.samples.size() - 1);
    CHECK(var >= 0.99);
    CHECK(var <= 1.01);

    double amax = 0.0;
    for (double v : s.samples)
        amax = std::max(amax, std::abs(v));
    CHECK(std::isfinite(amax));
    CHECK(amax < 10.0);
}

TEST_CASE("odd-length streams only append one extra draw") {
    // The first n*d entries must agree regardless of how the tail pair is cut off.
    SampleSet odd = sample_standard_normal(3, 3, 777u);
    SampleSet even = sample_standard_normal(5, 2, 777u);
    for (int i = 0; i < 9; ++i)
        CHECK(odd.samples[i] == even.samples[i]);
}

TEST_CASE("corruption scales the leading rows by ten") {
    SampleSet s = sample_standard_normal(20, 6, 31415u);

    SampleSet same = corrupt_samples(s, 0);
    CHECK(same.n_corrupted == 0);
    for (std::size_t i = 0; i < s.samples.size(); ++i)
        CHECK(same.samples[i] == s.samples[i]);

    SampleSet c = corrupt_samples(s, 7);
    CHECK(c.n_corrupted == 7);
    for (int i = 0; i < 20; ++i) {
        double norm_before = 0.0, norm_after = 0.0;
        for (int k = 0; k < 6; ++k) {
            norm_before += s.at(i, k) * s.at(i, k);
            norm_after += c.at(i, k) * c.at(i, k);
            if (i < 7)
                CHECK(c.at(i, k) == 10.0 * s.at(i, k));
            else
                CHECK(c.at(i, k) == s.at(i, k));
        }
        if (i < 7)
            CHECK(std::sqrt(norm_after) == doctest::Approx(10.0 * std::sqrt(norm_before)));
    }

    CHECK_THROWS_AS(corrupt_samples(c, 3), std::invalid_argument);
    CHECK_THROWS_AS(corrupt_samples(s, 21), std::invalid_argument);
    CHECK_THROWS_AS(corrupt_samples(s, -1), std::invalid_argument);
}

TEST_CASE("field is one at zero modes or zero spread") {
    KKLCoefficient coef = KKLCoefficient::make(1.0, 5);
    std::vector<double> zero(5, 0.0);
    CHECK(eval_kkl(coef, 0.37, zero) == doctest::Approx(1.0).epsilon(1e-15));

    KKLCoefficient flat = KKLCoefficient::make(0.0, 5);
    std::vector<double> xi = {1.2, -0.3, 0.8, 2.0, -1.1};
    CHECK(eval_kkl(flat, 0.37, xi) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("single-mode field hits its closed form at the sine peak") {
    KKLCoefficient coef = KKLCoefficient::make(1.0, 1);
    std::vector<double> xi = {1.0};
    // sqrt(lambda_1) = 2/pi, so x = 1 puts the sine at its maximum.
    CHECK(eval_kkl(coef, 1.0, xi) == doctest::Approx(std::exp(2.0 / kPi)).epsilon(1e-14));
}

TEST_CASE("field stays positive for wild arguments") {
    KKLCoefficient coef = KKLCoefficient::make(0.9, 50);
    std::mt19937 rng(8675309u);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    std::normal_distribution<double> uxi(0.0, 10.0);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> xi(50);
        for (auto& v : xi)
            v = uxi(rng);
        double a = eval_kkl(coef, ux(rng), xi);
        CHECK(a > 0.0);
        CHECK(std::isfinite(a));
    }
}

TEST_CASE("oscillatory coefficient matches hand values") {
    CHECK(eval_osc(3.5, 0.0, 0.0) == doctest::Approx(1.0 / 3.5).epsilon(1e-15));
    CHECK(eval_osc(3.5, 0.05, 0.0) == doctest::Approx(1.0 / 6.5).epsilon(1e-12));
    CHECK(eval_osc(3.5, 0.03, 0.04) == doctest::Approx(1.0 / 6.5).epsilon(1e-12));
    CHECK(eval_osc_dxi(3.5, 0.0, 0.0) == doctest::Approx(-1.0 / 12.25).epsilon(1e-15));
    // sin(10*pi*0.15) = -1 makes the denominator xi - 3.
    CHECK_THROWS_AS(eval_osc(2.9, 0.15, 0.0), CoercivityError);
    CHECK_THROWS_AS(eval_osc_dxi(0.1, 0.15, 0.0), CoercivityError);
}

TEST_CASE("oscillatory xi-derivative agrees with finite differences") {
    const double step = 1e-6;
    const double pts[][3] = {{3.5, 0.0, 0.0},  {3.5, 0.05, 0.0}, {3.2, 0.3, -0.4},
                             {3.9, -0.7, 0.1}, {3.05, 0.5, 0.5}, {3.6, 0.0, 0.99}};
    for (const auto& p : pts) {
        double fd = (eval_osc(p[0] + step, p[1], p[2]) - eval_osc(p[0] - step, p[1], p[2])) /
                    (2.0 * step);
        double an = eval_osc_dxi(p[0], p[1], p[2]);
        CHECK(std::abs(fd - an) <= 1e-8 * std::abs(an));
    }
}

TEST_CASE("contrast ratio spans the sine extremes") {
    CHECK(contrast_ratio(3.5) == doctest::Approx(13.0).epsilon(1e-14));
    CHECK(contrast_ratio(3.1) == doctest::Approx(61.0).epsilon(1e-12));
    CHECK(contrast_ratio(1e9) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK_THROWS_AS(contrast_ratio(3.0), std::invalid_argument);
    CHECK_THROWS_AS(contrast_ratio(-5.0), std::invalid_argument);
}
