#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "wdl/process_sim.hpp"
#include "wdl/recession.hpp"

using namespace wdl;

#ifndef WDL_DATA_DIR
#define WDL_DATA_DIR "data"
#endif

namespace {

const std::string kFixture = std::string(WDL_DATA_DIR) + "/usrecq_1933_2022.csv";

QuarterlySeries from_values(const std::vector<double>& values) {
    QuarterlySeries s;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::size_t year = 1933 + i / 4;
        const std::size_t month = 1 + 3 * (i % 4);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%04zu-%02zu-01", year, month);
        s.dates.push_back(buf);
        s.values.push_back(values[i]);
    }
    return s;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary);
    for (const auto& l : lines) out << l << '\n';
}

}  // namespace

TEST_CASE("bundled fixture loads with 360 quarters recoded to +-1") {
    const QuarterlySeries s = load_usrecq(kFixture);
    REQUIRE(s.size() == 360);
    CHECK(s.dates.front() == "1933-01-01");
    CHECK(s.dates.back() == "2022-10-01");
    std::size_t rec = 0;
    for (double v : s.values) {
        REQUIRE((v == 1.0 || v == -1.0));
        rec += v > 0;
    }
    CHECK(rec == 51);
    // recode is invertible: mapping back to 0/1 and forward again is identity
    for (double v : s.values) {
        const int orig = v > 0 ? 1 : 0;
        CHECK((orig == 1 ? 1.0 : -1.0) == v);
    }
}

TEST_CASE("loader rejects malformed rows with their row number") {
    const std::string path = "test_usrecq_bad.csv";

    write_lines(path, {"DATE,USRECQ", "1933-01-01,0", "1933-04-01,2"});
    CHECK_THROWS_WITH_AS((void)load_usrecq(path), doctest::Contains("row 3"),
                         std::runtime_error);

    write_lines(path, {"DATE,USRECQ", "1933-01-01,0", "1933-01-01,1"});
    CHECK_THROWS_WITH_AS((void)load_usrecq(path), doctest::Contains("duplicate"),
                         std::runtime_error);

    write_lines(path, {"DATE,USRECQ", "not-a-date,0"});
    CHECK_THROWS_AS((void)load_usrecq(path), std::runtime_error);

    write_lines(path, {"DATE,USRECQ", "1933-01-01"});
    CHECK_THROWS_AS((void)load_usrecq(path), std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("log likelihood baseline and the known maximizer") {
    const QuarterlySeries s = load_usrecq(kFixture);
    const double T = static_cast<double>(s.size());
    CHECK(loglik_ar1(s, 0.0, 0.0) == doctest::Approx(-(T - 1.0) * std::log(2.0)));
    CHECK(loglik_ar1(s, -0.248, 0.660) > loglik_ar1(s, 0.0, 0.0));
    CHECK_THROWS_AS((void)loglik_ar1(s, 0.7, 0.4), std::invalid_argument);
}

TEST_CASE("mle on the fixture reproduces the reference estimate") {
    const QuarterlySeries s = load_usrecq(kFixture);
    const Ar1LogitFit fit = fit_mle(s);
    CHECK(fit.converged);
    CHECK(std::fabs(fit.alpha0 - (-0.248)) < 0.005);
    CHECK(std::fabs(fit.alpha1 - 0.660) < 0.005);
    // certificate: no grid point beats the returned optimum
    for (int i = -99; i <= 99; i += 3) {
        for (int j = -99; j <= 99; j += 3) {
            const double a0 = 0.01 * i, a1 = 0.01 * j;
            if (std::fabs(a0) + std::fabs(a1) >= 1.0) continue;
            CHECK(fit.log_likelihood >= loglik_ar1(s, a0, a1) - 1e-9);
        }
    }
}

TEST_CASE("mle consistency on synthetic dgp1 data") {
    const Trajectory traj = simulate_binary(BinaryDgpSpec::dgp1(), 100000, 77, 500);
    QuarterlySeries s = from_values(traj.labels);
    // (values beyond 360 quarters get synthetic dates; only ordering matters)
    const Ar1LogitFit fit = fit_mle(s);
    CHECK(std::fabs(fit.alpha0 - (-0.25)) < 0.02);
    CHECK(std::fabs(fit.alpha1 - 0.6) < 0.02);
    CHECK(loglik_ar1(s, -0.25, 0.6) > fit.log_likelihood - 1.0);
}

TEST_CASE("alternating series drives alpha1 negative") {
    std::vector<double> values;
    for (int i = 0; i < 80; ++i) values.push_back(i % 2 == 0 ? 1.0 : -1.0);
    const QuarterlySeries s = from_values(values);
    const Ar1LogitFit fit = fit_mle(s);
    CHECK(fit.alpha1 < -0.9);
    CHECK(std::fabs(fit.alpha0) < 0.1);
    CHECK_FALSE(fit.converged);  // boundary-seeking
    CHECK(!fit.boundary_note.empty());
    CHECK(fit.log_likelihood > loglik_ar1(s, 0.0, 0.0));
}

TEST_CASE("all-constant series is flagged as boundary-seeking") {
    const QuarterlySeries s = from_values(std::vector<double>(40, -1.0));
    const Ar1LogitFit fit = fit_mle(s);
    CHECK_FALSE(fit.converged);
    CHECK(!fit.boundary_note.empty());
}

TEST_CASE("pipeline split arithmetic and confusion bookkeeping") {
    const QuarterlySeries s = load_usrecq(kFixture);
    Architecture arch = Architecture::mlp(1, {16, 16}, Activation::ReLU, OutputActivation::Tanh);
    TrainConfig cfg;
    cfg.seed = 0;
    const RecessionResult r = run_recession_pipeline(s, arch, cfg);
    CHECK(r.train_pairs == 180);
    CHECK(r.test_pairs == 179);
    CHECK(r.test_report.sample_size() == 179);
    CHECK(r.test_report.accuracy ==
          doctest::Approx(static_cast<double>(r.test_report.confusion[0][0] +
                                              r.test_report.confusion[1][1]) /
                          179.0));
}

TEST_CASE("pipeline on the fixture lands near the reference accuracy") {
    const QuarterlySeries s = load_usrecq(kFixture);
    Architecture arch = Architecture::mlp(1, {16, 16}, Activation::ReLU, OutputActivation::Tanh);
    TrainConfig cfg;
    cfg.seed = 1;
    const RecessionResult r = run_recession_pipeline(s, arch, cfg);
    CHECK(r.test_report.accuracy > 0.9);
    CHECK(r.test_report.accuracy < 0.97);
    CHECK(std::fabs(r.fit.alpha0 - (-0.248)) < 0.005);
    CHECK(std::fabs(r.fit.alpha1 - 0.660) < 0.005);
}

TEST_CASE("pipeline is deterministic per seed") {
    const QuarterlySeries s = load_usrecq(kFixture);
    Architecture arch = Architecture::mlp(1, {8}, Activation::ReLU, OutputActivation::Tanh);
    TrainConfig cfg;
    cfg.seed = 9;
    cfg.max_epochs = 50;
    const RecessionResult a = run_recession_pipeline(s, arch, cfg);
    const RecessionResult b = run_recession_pipeline(s, arch, cfg);
    CHECK(a.test_report.hinge_risk == b.test_report.hinge_risk);
    CHECK(a.test_report.confusion == b.test_report.confusion);
}

TEST_CASE("all-minus-one series yields the constant predictor") {
    const QuarterlySeries s = from_values(std::vector<double>(24, -1.0));
    Architecture arch = Architecture::mlp(1, {8}, Activation::ReLU, OutputActivation::Tanh);
    TrainConfig cfg;
    cfg.seed = 4;
    cfg.max_epochs = 60;
    const RecessionResult r = run_recession_pipeline(s, arch, cfg);
    CHECK(r.test_report.accuracy == doctest::Approx(1.0));
    CHECK(r.test_report.confusion[0][0] == r.test_pairs);
    CHECK(r.test_report.confusion[0][1] + r.test_report.confusion[1][0] +
              r.test_report.confusion[1][1] ==
          0);
}
