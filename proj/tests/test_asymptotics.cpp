#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracle_helpers.hpp"
#include "skewpower/asymptotics.hpp"
#include "skewpower/sampling.hpp"

using namespace skewpower;
using Catch::Approx;

TEST_CASE("esep information matrix entries and structure") {
    const InfoMatrices info = fisher_info_esep(Distribution::esn(0.0, 1.0, 0.0), 1.0);
    CHECK(info.fisher(0, 0) == Approx(1.0).epsilon(1e-12));
    CHECK(info.fisher(1, 1) == Approx(2.0).epsilon(1e-12));
    CHECK(info.fisher(2, 2) == Approx(3.0).epsilon(1e-12));
    CHECK(info.fisher(0, 1) == 0.0);
    CHECK(info.fisher(1, 2) == 0.0);
    CHECK(info.fisher(0, 2) == Approx(4.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-12));

    CHECK_THROWS_AS(fisher_info_esep(Distribution::esl(0.0, 1.0, 0.0), 1.0), regularity_error);
    CHECK_THROWS_AS(fisher_info_esep(Distribution::esep(0.0, 1.0, 0.0, 0.9), 1.0),
                    regularity_error);
    CHECK_THROWS_AS(fisher_info_esep(Distribution::est(0.0, 1.0, 0.0, 3.0), 1.0), parameter_error);
}

TEST_CASE("esep information: inverse identity and n scaling") {
    for (double alpha : {1.2, 1.5, 2.0, 3.0, 4.0})
        for (double eps : {-0.8, -0.2, 0.0, 0.5, 0.8}) {
            const Distribution d = Distribution::esep(0.0, 1.4, eps, alpha);
            const InfoMatrices info = fisher_info_esep(d, 37.0);
            const Mat3 product = info.fisher * info.acov;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    REQUIRE(product(i, j) == Approx(i == j ? 1.0 : 0.0).margin(1e-8));

            // information is linear in n, covariance is 1/n
            const InfoMatrices doubled = fisher_info_esep(d, 74.0);
            REQUIRE(doubled.fisher(0, 0) == Approx(2.0 * info.fisher(0, 0)).epsilon(1e-14));
            REQUIRE(doubled.acov(2, 2) == Approx(0.5 * info.acov(2, 2)).epsilon(1e-12));
        }
}

TEST_CASE("closed-form esep covariance equals the information inverse") {
    for (double alpha : {1.2, 1.7, 2.0, 2.8, 4.0})
        for (double eps : {-0.8, -0.3, 0.0, 0.4, 0.8}) {
            const Distribution d = Distribution::esep(0.0, 0.9, eps, alpha);
            const Mat3 cov = asymptotic_cov_esep(d, 50.0);
            const Mat3 inv = fisher_info_esep(d, 50.0).acov;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    REQUIRE(cov(i, j) == Approx(inv(i, j)).margin(1e-10));
        }
}

TEST_CASE("reference pins for the esn asymptotic variances") {
    const Distribution low = Distribution::esn(0.0, 1.0, -0.2);
    const Mat3 c30 = asymptotic_cov_esep(low, 30.0);
    CHECK(c30(0, 0) == Approx(0.211680).margin(1e-5));
    CHECK(c30(1, 1) == Approx(0.016667).margin(1e-5));
    CHECK(c30(2, 2) == Approx(0.070560).margin(1e-5));
    CHECK(c30(0, 1) == 0.0);
    CHECK(c30(1, 2) == 0.0);

    const Mat3 c100 = asymptotic_cov_esep(Distribution::esn(0.0, 1.0, -0.8), 100.0);
    CHECK(c100(0, 0) == Approx(0.023814).margin(1e-5));

    // the alpha = 2 closed form collapses to 3 pi (1-eps^2) sigma^2 / (n (3pi - 8))
    for (double eps : {-0.8, -0.5, -0.2, 0.3}) {
        const double direct = 3.0 * M_PI * (1.0 - eps * eps) / (100.0 * (3.0 * M_PI - 8.0));
        CHECK(asymptotic_cov_esep(Distribution::esn(0.0, 1.0, eps), 100.0)(0, 0)
              == Approx(direct).margin(1e-6));
    }
}

TEST_CASE("esn determinant closed form") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> us(0.3, 3.0), ue(-0.85, 0.85), un(5.0, 500.0);
    for (int i = 0; i < 20; ++i) {
        const double sigma = us(rng), eps = ue(rng), n = std::floor(un(rng));
        const InfoMatrices info = fisher_info_esep(Distribution::esn(0.0, sigma, eps), n);
        const double closed = esn_fisher_det_closed_form(sigma, eps, n);
        REQUIRE(info.det == Approx(closed).epsilon(1e-10));
    }
}

TEST_CASE("numeric est information reproduces the reference variance grid") {
    const InfoMatrices i30 = fisher_info_est(Distribution::est(0.0, 1.0, -0.2, 3.0), 30.0);
    CHECK(i30.acov(0, 0) == Approx(0.17173).epsilon(5e-3));
    CHECK(i30.acov(1, 1) == Approx(0.13333).epsilon(5e-3));
    CHECK(i30.acov(2, 2) == Approx(0.05725).epsilon(5e-3));

    const InfoMatrices mid = fisher_info_est(Distribution::est(0.0, 1.0, -0.5, 3.0), 100.0);
    CHECK(mid.acov(0, 0) == Approx(0.040250).epsilon(5e-3));
    CHECK(mid.acov(2, 2) == Approx(0.013417).epsilon(5e-3));

    const InfoMatrices high = fisher_info_est(Distribution::est(0.0, 1.0, -0.8, 3.0), 150.0);
    CHECK(high.acov(0, 0) == Approx(0.012880).epsilon(5e-3));
    CHECK(high.acov(1, 1) == Approx(0.026667).epsilon(5e-3));
    CHECK(high.acov(2, 2) == Approx(0.004293).epsilon(5e-3));

    // the scale block stays constant across the skewness rows
    for (double eps : {-0.8, -0.5, -0.2}) {
        const InfoMatrices i =
            fisher_info_est(Distribution::est(0.0, 1.0, eps, 3.0), 30.0);
        REQUIRE(i.acov(1, 1) == Approx(4.0 / 30.0).epsilon(1e-6));
        REQUIRE(i.fisher(0, 1) == Approx(0.0).margin(1e-9));
        REQUIRE(i.fisher(1, 2) == Approx(0.0).margin(1e-9));
    }
}

TEST_CASE("numeric est information: inverse identity and n scaling") {
    const Distribution d = Distribution::est(0.0, 1.3, -0.4, 5.0);
    const InfoMatrices info = fisher_info_est(d, 25.0);
    const Mat3 product = info.fisher * info.acov;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            REQUIRE(product(i, j) == Approx(i == j ? 1.0 : 0.0).margin(1e-8));

    const InfoMatrices doubled = fisher_info_est(d, 50.0);
    CHECK(doubled.fisher(2, 2) == Approx(2.0 * info.fisher(2, 2)).epsilon(1e-13));
    CHECK(doubled.acov(0, 0) == Approx(0.5 * info.acov(0, 0)).epsilon(1e-12));
}

TEST_CASE("numeric est determinant matches the closed form") {
    for (double nu : {3.0, 5.0, 10.0})
        for (double eps : {-0.8, -0.5, -0.2, 0.0}) {
            const Distribution d = Distribution::est(0.0, 1.0, eps, nu);
            const InfoMatrices info = fisher_info_est(d, 1.0);
            const double closed = est_fisher_det_closed_form(nu, 1.0, eps, 1.0);
            REQUIRE(info.det == Approx(closed).epsilon(1e-3));
            REQUIRE(info.det > 0.0);
        }

    // sigma scaling: det carries sigma^{-6}
    const double base = fisher_info_est(Distribution::est(0.0, 1.0, 0.0, 3.0), 1.0).det;
    const double scaled = fisher_info_est(Distribution::est(0.0, 2.0, 0.0, 3.0), 1.0).det;
    CHECK(scaled == Approx(base / 64.0).epsilon(1e-6));
}

TEST_CASE("esgt log integral closed form") {
    CHECK(esgt_log_integral(1.0, 1.0) == Approx(1.0).epsilon(1e-12));

    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> ua(0.4, 3.0), uq(0.4, 4.0);
    for (int i = 0; i < 10; ++i) {
        const double alpha = ua(rng), q = uq(rng);
        const double closed = esgt_log_integral(alpha, q);
        REQUIRE(closed > 0.0);
        const double numeric = oracle::integrate(
            [&](double y) {
                const double ya = std::pow(y, alpha);
                return std::pow(1.0 + ya, -q - 1.0 / alpha) * std::log1p(ya);
            },
            0.0, oracle::kInf);
        REQUIRE(closed == Approx(numeric).margin(1e-8));
    }
    CHECK_THROWS_AS(esgt_log_integral(0.0, 1.0), parameter_error);
}

TEST_CASE("regularity report: esn passes, esl trips iv, est3 trips vii") {
    const RegularityReport esn = regularity_check(Distribution::esn(0.0, 1.0, -0.2));
    CHECK(esn.iv.pass);
    CHECK(esn.v.pass);
    CHECK(esn.vi.pass);
    CHECK(esn.vii.pass);
    CHECK(esn.fisher_det > 0.0);

    const RegularityReport esl = regularity_check(Distribution::esl(0.0, 1.0, 0.0));
    CHECK_FALSE(esl.iv.pass);
    CHECK(esl.v.pass);
    CHECK_FALSE(esl.vi.pass); // information undefined at alpha = 1
    CHECK(esl.vii.pass);

    const RegularityReport est3 = regularity_check(Distribution::est(0.0, 1.0, 0.0, 3.0));
    CHECK(est3.iv.pass);
    CHECK(est3.v.pass);
    CHECK(est3.vi.pass);
    CHECK_FALSE(est3.vii.pass);
    CHECK(est3.moment_ok[0]);
    CHECK(est3.moment_ok[1]);
    CHECK_FALSE(est3.moment_ok[2]);
    CHECK_FALSE(est3.moment_ok[3]);
}

TEST_CASE("plug-in Cramer-Rao report") {
    // Gaussian fit with eps frozen: Var(theta) ~ sigma^2 / n
    const std::size_t n = 4000;
    const SampleBatch batch = sample_esep(Distribution::esn(0.0, 1.0, 0.0), n, 5150);
    FitConfig config;
    config.freeze_eps = true;
    const FitResult r = fit(batch.values, FitModel::esn(), config);
    REQUIRE(r.converged);
    const Mat3 crlb = cramer_rao_report(r);
    CHECK(crlb(0, 0) == Approx(1.0 / static_cast<double>(n)).epsilon(0.2));
    CHECK(crlb(2, 2) == 0.0); // frozen parameter carries no variance
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) REQUIRE(crlb(i, j) == crlb(j, i));

    // full three-parameter report matches the closed-form covariance at the fit
    FitConfig full;
    const FitResult r3 = fit(batch.values, FitModel::esn(), full);
    REQUIRE(r3.converged);
    const Mat3 crlb3 = cramer_rao_report(r3);
    const Mat3 closed = asymptotic_cov_esep(r3.distribution(), static_cast<double>(n));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) REQUIRE(crlb3(i, j) == Approx(closed(i, j)).margin(1e-12));

    FitResult unconverged = r;
    unconverged.converged = false;
    CHECK_THROWS_AS(cramer_rao_report(unconverged), parameter_error);
}
