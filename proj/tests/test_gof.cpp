#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracle_helpers.hpp"
#include "skewpower/gof.hpp"
#include "skewpower/sampling.hpp"

using namespace skewpower;
using Catch::Approx;

TEST_CASE("ks statistic on a plug-in quantile grid is the half spacing") {
    const Distribution d = Distribution::esn(0.0, 1.0, 0.0);
    const std::size_t n = 100;
    std::vector<double> data;
    for (std::size_t i = 1; i <= n; ++i)
        data.push_back(quantile(d, (static_cast<double>(i) - 0.5) / static_cast<double>(n)));
    const KsResult r = ks_test(data, d);
    CHECK(r.stat == Approx(0.005).margin(1e-9));
}

TEST_CASE("ks input validation") {
    const Distribution d = Distribution::esn(0.0, 1.0, 0.0);
    CHECK_THROWS_AS(ks_test(std::vector<double>{}, d), data_error);
    CHECK_THROWS_AS(ks_test(std::vector<double>{1.0, std::nan("")}, d), data_error);
}

TEST_CASE("ks statistic is affine invariant") {
    const SampleBatch batch = sample_esep(Distribution::esep(0.5, 1.2, -0.3, 1.5), 200, 31);
    const Distribution d = Distribution::esep(0.4, 1.1, -0.3, 1.5);
    const double base = ks_test(batch.values, d).stat;
    for (double a : {2.0, 0.3}) {
        for (double b : {-1.0, 4.0}) {
            std::vector<double> moved = batch.values;
            for (auto& x : moved) x = a * x + b;
            const Distribution slid = Distribution::esep(a * 0.4 + b, a * 1.1, -0.3, 1.5);
            REQUIRE(ks_test(moved, slid).stat == Approx(base).margin(1e-12));
        }
    }
}

TEST_CASE("ks statistic agrees with a brute-force sup for small n") {
    std::mt19937_64 seeds(17);
    for (std::size_t n : {7u, 20u, 50u}) {
        const Distribution d = Distribution::est(0.3, 1.4, -0.4, 4.0);
        const SampleBatch batch = sample_est(d, n, seeds());
        const double stat = ks_test(batch.values, d).stat;

        std::vector<double> sorted = batch.values;
        std::sort(sorted.begin(), sorted.end());
        double brute = 0.0;
        const double lo = sorted.front() - 4.0, hi = sorted.back() + 4.0;
        for (int g = 0; g <= 200000; ++g) {
            const double x = lo + (hi - lo) * g / 200000.0;
            const double femp =
                static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), x)
                                    - sorted.begin())
                / static_cast<double>(n);
            brute = std::max(brute, std::fabs(femp - cdf(d, x)));
        }
        REQUIRE(std::fabs(brute - stat) <= 0.5 / static_cast<double>(n));
    }
}

TEST_CASE("ks p-value is monotone in the statistic and well calibrated") {
    const std::size_t n = 500;
    double prev = 1.0;
    for (double stat : {0.01, 0.02, 0.04, 0.08, 0.16, 0.32}) {
        const double p = kolmogorov_tail(std::sqrt(static_cast<double>(n)) * stat);
        REQUIRE(p <= prev + 1e-15);
        REQUIRE(p >= 0.0);
        REQUIRE(p <= 1.0);
        prev = p;
    }

    // draws from the hypothesized member rarely reject
    const Distribution d = Distribution::esl(0.0, 1.0, 0.2);
    int above = 0;
    for (unsigned trial = 0; trial < 100; ++trial) {
        const SampleBatch batch = sample_esep(d, 10000, 40000 + trial);
        if (ks_test(batch.values, d).pvalue > 0.01) ++above;
    }
    CHECK(above >= 95);
}

TEST_CASE("information criteria formulas") {
    const InformationCriteria at_zero = information_criteria(0.0, 20, 3);
    CHECK(at_zero.aic == Approx(6.0));
    CHECK(at_zero.bic == Approx(3.0 * std::log(20.0)));

    // aic - bic = k (2 - ln n)
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ull(-500.0, 500.0);
    for (int i = 0; i < 50; ++i) {
        const double ll = ull(rng);
        const std::size_t n = 2 + static_cast<std::size_t>(i) * 37;
        const int k = 1 + i % 5;
        const InformationCriteria ic = information_criteria(ll, n, k);
        REQUIRE(ic.aic - ic.bic
                == Approx(k * (2.0 - std::log(static_cast<double>(n)))).margin(1e-9));
        if (n > 8)
            REQUIRE(ic.aic < ic.bic); // n > e^2
        if (n <= 7) REQUIRE(ic.aic > ic.bic);
    }
    CHECK_THROWS_AS(information_criteria(0.0, 0, 3), parameter_error);
    CHECK_THROWS_AS(information_criteria(0.0, 10, 0), parameter_error);
}

TEST_CASE("aic/bic ordering is invariant to a common log-density shift") {
    const SampleBatch batch = sample_esep(Distribution::esl(0.0, 1.0, 0.1), 300, 77);
    const double ll_a = log_likelihood(Distribution::esl(0.0, 1.0, 0.1), batch.values);
    const double ll_b = log_likelihood(Distribution::esn(0.0, 1.0, 0.1), batch.values);
    const double n = static_cast<double>(batch.values.size());
    for (double c : {-3.0, 0.5, 11.0}) {
        const InformationCriteria a0 = information_criteria(ll_a, batch.values.size(), 3);
        const InformationCriteria b0 = information_criteria(ll_b, batch.values.size(), 3);
        const InformationCriteria a1 = information_criteria(ll_a + c * n, batch.values.size(), 3);
        const InformationCriteria b1 = information_criteria(ll_b + c * n, batch.values.size(), 3);
        REQUIRE((a0.aic < b0.aic) == (a1.aic < b1.aic));
        REQUIRE((a0.bic < b0.bic) == (a1.bic < b1.bic));
    }
}

TEST_CASE("cdf overlay table") {
    const Distribution truth = Distribution::esl(0.0, 1.0, 0.3);
    const SampleBatch batch = sample_esep(truth, 400, 123);
    const Distribution other = Distribution::esn(0.0, 1.2, 0.0);
    const OverlayTable t = cdf_overlay_table(batch.values, {truth, other}, {"esl", "esn"});

    REQUIRE(t.x.size() == batch.values.size());
    CHECK(t.f_emp.back() == 1.0);
    CHECK(t.model_names == std::vector<std::string>{"esl", "esn"});
    for (const auto& col : t.fitted)
        for (std::size_t i = 1; i < col.size(); ++i) REQUIRE(col[i] >= col[i - 1] - 1e-14);

    // the two one-sided gaps reconstructed from the table give the KS statistic
    // (exact for all-distinct observations: f_emp and f_emp - 1/n are the
    // post- and pre-jump empirical values at each row)
    const double n = static_cast<double>(t.x.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < t.x.size(); ++i) {
        sup = std::max(sup, std::fabs(t.f_emp[i] - t.fitted[0][i]));
        sup = std::max(sup, std::fabs(t.f_emp[i] - 1.0 / n - t.fitted[0][i]));
    }
    CHECK(sup == Approx(ks_test(batch.values, truth).stat).margin(1e-12));
}

TEST_CASE("cdf overlay table shares the upper step across ties") {
    std::vector<double> tied{1.0, 2.0, 2.0, 2.0, 3.0, 5.0};
    const OverlayTable t = cdf_overlay_table(tied, {Distribution::esn(2.0, 1.0, 0.0)});
    CHECK(t.f_emp == std::vector<double>{1.0 / 6.0, 4.0 / 6.0, 4.0 / 6.0, 4.0 / 6.0, 5.0 / 6.0, 1.0});
}
