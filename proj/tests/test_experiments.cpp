#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "wdl/csv.hpp"
#include "wdl/experiments.hpp"

using namespace wdl;

namespace {

ExperimentPlan tiny_plan(std::uint64_t seed) {
    ExperimentPlan plan;
    plan.n_grid = {100, 300};
    plan.replications = 4;
    plan.target_m = 1500;
    plan.master_seed = seed;
    plan.train.max_epochs = 60;
    return plan;
}

}  // namespace

TEST_CASE("plan validation") {
    ExperimentPlan plan = tiny_plan(1);
    plan.n_grid = {200, 200};
    CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
    plan.n_grid = {};
    CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
    CHECK_NOTHROW(tiny_plan(1).validate());
    const ExperimentPlan desk = ExperimentPlan::desk_profile(3);
    CHECK(desk.n_grid == std::vector<std::size_t>{200, 600, 1000, 1400, 2000});
    CHECK(desk.replications == 50);
    const ExperimentPlan paper = ExperimentPlan::paper_profile(3);
    CHECK(paper.n_grid.size() == 91);
    CHECK(paper.n_grid.front() == 200);
    CHECK(paper.n_grid.back() == 2000);
    CHECK(paper.replications == 500);
}

TEST_CASE("target estimation brackets the bayes risk") {
    ExperimentPlan plan = tiny_plan(11);
    plan.target_m = 4000;
    const TargetEstimate est = estimate_target(plan);
    // the family contains a near-oracle predictor, so the trained target
    // should not trail the Bayes risk by much; MC noise at m = 4000 is ~0.01
    CHECK(est.target_risk <= est.bayes_risk + 0.02);
    CHECK(est.target_risk > 0.0);
    const double exact = exact_risk_oracle(plan.dgp).hinge_risk;
    CHECK(std::fabs(est.bayes_risk - exact) < 3.0 * 2.0 / std::sqrt(4000.0));
}

TEST_CASE("target estimation is deterministic per master seed") {
    const TargetEstimate a = estimate_target(tiny_plan(21));
    const TargetEstimate b = estimate_target(tiny_plan(21));
    CHECK(a.target_risk == b.target_risk);
    CHECK(a.bayes_risk == b.bayes_risk);
    const TargetEstimate c = estimate_target(tiny_plan(22));
    CHECK(a.target_risk != c.target_risk);
}

TEST_CASE("gap curve shape, aggregation audit and csv export") {
    const ExperimentPlan plan = tiny_plan(31);
    const GapCurve curve = run_gap_curve(plan, 1);
    REQUIRE(curve.rows.size() == plan.n_grid.size());
    for (const GapRow& row : curve.rows) {
        CHECK(row.per_rep_risk.size() + row.failed == plan.replications);
        // std error recomputable from the stored per-rep values
        double mean = 0.0;
        for (double v : row.per_rep_risk) mean += v;
        mean /= static_cast<double>(row.per_rep_risk.size());
        double var = 0.0;
        for (double v : row.per_rep_risk) var += (v - mean) * (v - mean);
        var /= static_cast<double>(row.per_rep_risk.size() - 1);
        const double se = std::sqrt(var / static_cast<double>(row.per_rep_risk.size()));
        CHECK(row.gap_target_se == doctest::Approx(se).epsilon(1e-12));
        CHECK(row.gap_target_mean ==
              doctest::Approx(mean - curve.target_risk).epsilon(1e-12));
        CHECK(row.gap_bayes_mean == doctest::Approx(mean - curve.bayes_risk).epsilon(1e-12));
        // the target is near-optimal in class; the allowance adds 3 MC
        // standard errors of the target-risk estimate itself (the hinge
        // floor of an m-sample has sd 2 sqrt(p(1-p)/m), p = 0.121875)
        const double target_mc_se =
            2.0 * std::sqrt(0.121875 * (1.0 - 0.121875) / static_cast<double>(plan.target_m));
        CHECK(row.gap_target_mean >= -2.0 * row.gap_target_se - 3.0 * target_mc_se);
    }

    const std::string path = "test_gap_curve.csv";
    curve.export_csv(path);
    const auto lines = read_lines(path);
    REQUIRE(lines.size() == 1 + plan.n_grid.size());
    CHECK(lines[0] == "n,gap_target_mean,gap_target_se,gap_bayes_mean,gap_bayes_se,failed");
    std::remove(path.c_str());
}

TEST_CASE("gap curve is bitwise reproducible and schedule-independent") {
    const ExperimentPlan plan = tiny_plan(41);
    const GapCurve a = run_gap_curve(plan, 1);
    const GapCurve b = run_gap_curve(plan, 1);
    const GapCurve c = run_gap_curve(plan, 0);  // all threads
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].per_rep_risk == b.rows[i].per_rep_risk);
        CHECK(a.rows[i].per_rep_risk == c.rows[i].per_rep_risk);
        CHECK(a.rows[i].gap_target_mean == c.rows[i].gap_target_mean);
    }
}

TEST_CASE("variance proxy estimate is positive and stable") {
    const double c1 = estimate_variance_proxy(BinaryDgpSpec::dgp1(), 400, 40, 7);
    CHECK(c1 > 0.0);
    // the hinge loss of the Bayes predictor takes values {0, 2}; per-step
    // variance is 4 p (1 - p) with p = 0.121875, and positive dependence
    // keeps the sum variance above the iid value
    const double iid = 4.0 * 0.121875 * (1.0 - 0.121875);
    CHECK(c1 > 0.5 * iid);
    CHECK(c1 < 20.0 * iid);
}
