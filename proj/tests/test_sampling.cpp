#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "oracle_helpers.hpp"
#include "skewpower/sampling.hpp"

using namespace skewpower;
using Catch::Approx;

namespace {

double fraction_below(const std::vector<double>& v, double cut) {
    std::size_t c = 0;
    for (double x : v)
        if (x < cut) ++c;
    return static_cast<double>(c) / static_cast<double>(v.size());
}

// Monte Carlo standard error of the sample variance, from the closed-form
// moments about theta.
double variance_se(const Distribution& d, std::size_t n) {
    const double m1 = central_moment(d, 1);
    const double m2 = central_moment(d, 2);
    const double m3 = central_moment(d, 3);
    const double m4 = central_moment(d, 4);
    const double c2 = m2 - m1 * m1;
    const double c4 = m4 - 4.0 * m3 * m1 + 6.0 * m2 * m1 * m1 - 3.0 * m1 * m1 * m1 * m1;
    return std::sqrt((c4 - c2 * c2) / static_cast<double>(n));
}

} // namespace

TEST_CASE("samplers are bit-deterministic for a fixed seed") {
    const Distribution e = Distribution::esep(0.5, 2.0, -0.3, 1.5);
    const Distribution t = Distribution::est(-1.0, 0.5, 0.4, 4.0);
    const Distribution g = Distribution::esgt(0.0, 1.0, 0.2, 2.0, 3.0);
    for (const auto& d : {e, t, g}) {
        const SampleBatch a = sample(d, 512, 99);
        const SampleBatch b = sample(d, 512, 99);
        REQUIRE(a.values == b.values);
        const SampleBatch c = sample(d, 512, 100);
        REQUIRE(a.values != c.values);
    }
}

TEST_CASE("sampler family tags are enforced") {
    CHECK_THROWS_AS(sample_esep(Distribution::est(0, 1, 0, 3), 10, 1), parameter_error);
    CHECK_THROWS_AS(sample_est(Distribution::esn(0, 1, 0), 10, 1), parameter_error);
    CHECK_THROWS_AS(sample_esgt(Distribution::esn(0, 1, 0), 10, 1), parameter_error);
    CHECK_THROWS_AS(sample(Distribution::esn(0, 1, 0), 0, 1), parameter_error);
}

TEST_CASE("esep sampler: left-of-theta mass and normal reduction") {
    const std::size_t n = 100000;

    const SampleBatch skewed = sample_esep(Distribution::esn(0.0, 1.0, -0.5), n, 42);
    const double se_mass = std::sqrt(0.25 * 0.75 / static_cast<double>(n));
    CHECK(fraction_below(skewed.values, 0.0) == Approx(0.25).margin(3.0 * se_mass));

    const SampleBatch normal = sample_esep(Distribution::esn(0.0, 1.0, 0.0), n, 43);
    CHECK(oracle::mean_of(normal.values)
          == Approx(0.0).margin(3.0 / std::sqrt(static_cast<double>(n))));
    CHECK(oracle::variance_of(normal.values)
          == Approx(1.0).margin(3.0 * std::sqrt(2.0 / static_cast<double>(n))));
}

TEST_CASE("esep sampler matches the closed-form first moment") {
    const std::size_t n = 100000;
    const Distribution d = Distribution::esl(0.0, 1.0, -0.5);
    const SampleBatch batch = sample_esep(d, n, 44);
    const double m1 = central_moment(d, 1);
    const double m2 = central_moment(d, 2);
    const double se = std::sqrt((m2 - m1 * m1) / static_cast<double>(n));
    CHECK(oracle::mean_of(batch.values) == Approx(m1).margin(3.0 * se));
}

TEST_CASE("sampler empirical moments match closed forms within 3 MC standard errors") {
    const std::size_t n = 100000;
    std::uint64_t seed = 1000;
    const std::vector<Distribution> combos{
        Distribution::esep(2.0, 0.5, -0.3, 1.5),
        Distribution::esep(-1.0, 2.0, 0.2, 0.7),
        Distribution::esep(0.0, 1.0, -0.8, 3.0),
        Distribution::est(0.0, 1.0, -0.8, 5.0),
        Distribution::est(5.0, 2.0, 0.0, 6.0),
        Distribution::esgt(0.0, 1.0, -0.2, 2.0, 3.0),
        Distribution::esgt(1.0, 0.5, 0.3, 1.5, 4.0),
    };
    for (const auto& d : combos) {
        const SampleBatch batch = sample(d, n, seed++);
        const double m1 = central_moment(d, 1);
        const double m2 = central_moment(d, 2);
        const double c2 = m2 - m1 * m1;
        const double mean_se = std::sqrt(c2 / static_cast<double>(n));
        REQUIRE(oracle::mean_of(batch.values) == Approx(d.theta + m1).margin(3.0 * mean_se));
        REQUIRE(oracle::variance_of(batch.values) == Approx(c2).margin(3.0 * variance_se(d, n)));
        const double p_left = d.left_mass();
        const double mass_se = std::sqrt(p_left * (1.0 - p_left) / static_cast<double>(n));
        REQUIRE(fraction_below(batch.values, d.theta) == Approx(p_left).margin(3.0 * mass_se));
    }
}

TEST_CASE("est sampler: skewed mass, location shift, t reduction") {
    const std::size_t n = 100000;

    const SampleBatch skewed = sample_est(Distribution::est(0.0, 1.0, -0.8, 3.0), n, 7);
    const double se_mass = std::sqrt(0.1 * 0.9 / static_cast<double>(n));
    CHECK(fraction_below(skewed.values, 0.0) == Approx(0.1).margin(3.0 * se_mass));

    SampleBatch shifted = sample_est(Distribution::est(5.0, 2.0, 0.0, 3.0), n, 8);
    std::vector<double> sorted = shifted.values;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[n / 2];
    const double iqr = sorted[(3 * n) / 4] - sorted[n / 4];
    CHECK(median == Approx(5.0).margin(3.0 * iqr / std::sqrt(static_cast<double>(n))));

    // eps = 0 is a plain Student-t: compare against an independent sampler
    const SampleBatch tsample = sample_est(Distribution::est(0.0, 1.0, 0.0, 3.0), n, 9);
    const std::vector<double> reference = oracle::student_t_sample(3.0, n, 1234);
    CHECK_FALSE(oracle::two_sample_ks_reject(tsample.values, reference, 0.01));
}

TEST_CASE("seed derivation separates cells and replications") {
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
}
