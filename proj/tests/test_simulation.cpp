#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "skewpower/io.hpp"
#include "skewpower/simulation.hpp"

using namespace skewpower;
using Catch::Approx;

namespace {

bool summaries_equal(const SimSummary& a, const SimSummary& b) {
    const auto stats_equal = [](const ParamStats& x, const ParamStats& y) {
        return x.mean == y.mean && x.var == y.var && x.mse == y.mse;
    };
    return a.n == b.n && a.failures == b.failures && stats_equal(a.theta, b.theta)
        && stats_equal(a.sigma, b.sigma) && stats_equal(a.eps, b.eps);
}

} // namespace

TEST_CASE("plan validation") {
    SimPlan plan;
    plan.reps = 0;
    CHECK_THROWS_AS(plan.validate(), parameter_error);
    plan.reps = 10;
    plan.n_list = {4};
    CHECK_THROWS_AS(plan.validate(), parameter_error);
}

TEST_CASE("single-replication cell reduces to the plain squared error") {
    SimPlan plan;
    plan.sim_case = SimCase::esn;
    plan.eps0 = -0.2;
    plan.reps = 1;
    plan.seed = 5;
    const SimSummary s = run_cell(plan, 40);
    REQUIRE(s.failures == 0);
    CHECK(s.theta.var == 0.0);
    CHECK(s.theta.mse == Approx((s.theta.mean - 0.0) * (s.theta.mean - 0.0)).margin(1e-15));
    CHECK(s.eps.mse == Approx((s.eps.mean + 0.2) * (s.eps.mean + 0.2)).margin(1e-15));
}

TEST_CASE("cells are bit-reproducible and independent of the n-list order") {
    SimPlan plan;
    plan.sim_case = SimCase::est3;
    plan.eps0 = -0.5;
    plan.reps = 25;
    plan.seed = 99;
    plan.n_list = {30, 50};

    const std::vector<CellResult> a = run_plan(plan);
    const std::vector<CellResult> b = run_plan(plan);
    REQUIRE(a.size() == 2);
    for (std::size_t i = 0; i < a.size(); ++i)
        REQUIRE(summaries_equal(a[i].summary, b[i].summary));

    SimPlan reversed = plan;
    reversed.n_list = {50, 30};
    const std::vector<CellResult> c = run_plan(reversed);
    REQUIRE(summaries_equal(a[0].summary, c[1].summary));
    REQUIRE(summaries_equal(a[1].summary, c[0].summary));

    // a direct cell call matches the plan's cell
    REQUIRE(summaries_equal(run_cell(plan, 50), a[1].summary));
}

TEST_CASE("mse decomposes into variance and squared bias") {
    SimPlan plan;
    plan.sim_case = SimCase::esl;
    plan.eps0 = -0.2;
    plan.reps = 60;
    plan.seed = 7;
    const SimSummary s = run_cell(plan, 30);
    const double m = static_cast<double>(plan.reps - s.failures);
    for (const ParamStats* p : {&s.theta, &s.sigma, &s.eps}) {
        const double bias = p->mean - p->truth;
        const double pop_var = p->var * (m - 1.0) / m;
        REQUIRE(p->mse == Approx(pop_var + bias * bias).margin(1e-12));
        REQUIRE(p->mse + 1e-12 >= pop_var);
    }
}

TEST_CASE("comparison columns exist exactly where asymptotics do") {
    SimPlan plan;
    plan.eps0 = -0.2;
    plan.reps = 2;
    plan.n_list = {30};

    plan.sim_case = SimCase::esn;
    CHECK(run_plan(plan)[0].asym_var.has_value());
    plan.sim_case = SimCase::est3;
    CHECK(run_plan(plan)[0].asym_var.has_value());
    plan.sim_case = SimCase::esl;
    CHECK_FALSE(run_plan(plan)[0].asym_var.has_value());
}

TEST_CASE("small esn recovery run lands near the truth") {
    SimPlan plan;
    plan.sim_case = SimCase::esn;
    plan.eps0 = -0.2;
    plan.reps = 50;
    plan.seed = 314;
    plan.n_list = {150};
    const std::vector<CellResult> cells = run_plan(plan);
    const SimSummary& s = cells[0].summary;
    CHECK(s.failures <= 2);
    CHECK(s.theta.mean == Approx(0.0).margin(0.1));
    CHECK(s.sigma.mean == Approx(1.0).margin(0.1));
    CHECK(s.eps.mean == Approx(-0.2).margin(0.1));
    REQUIRE(cells[0].mse_ratio.has_value());
    CHECK((*cells[0].mse_ratio)[0] > 0.2);
    CHECK((*cells[0].mse_ratio)[0] < 5.0);
}

TEST_CASE("smoke: two-replication plan completes and serializes") {
    SimPlan plan;
    plan.sim_case = SimCase::esn;
    plan.eps0 = -0.5;
    plan.reps = 2;
    plan.n_list = {30};
    const std::vector<CellResult> cells = run_plan(plan);

    std::ostringstream csv;
    write_simulation_csv(csv, cells);
    CHECK(csv.str().find("mean_n30") != std::string::npos);
    CHECK(csv.str().find("esn") != std::string::npos);

    const nlohmann::json j = to_json(cells);
    CHECK(j.is_array());
    CHECK(j[0]["summary"]["n"] == 30);

    // round trip is idempotent
    const std::string dumped = j.dump(2);
    CHECK(nlohmann::json::parse(dumped).dump(2) == dumped);
}
