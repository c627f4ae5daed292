#include "wdl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wdl/csv.hpp"
#include "wdl/parallel.hpp"
#include "wdl/rng.hpp"

namespace wdl {

namespace {
// stream ids for derived seeds
constexpr std::uint64_t kTargetStream = 1;
constexpr std::uint64_t kTrainStream = 2;
constexpr std::uint64_t kTestStream = 3;
}  // namespace

ExperimentPlan ExperimentPlan::desk_profile(std::uint64_t master_seed) {
    ExperimentPlan p;
    p.n_grid = {200, 600, 1000, 1400, 2000};
    p.replications = 50;
    p.master_seed = master_seed;
    return p;
}

ExperimentPlan ExperimentPlan::paper_profile(std::uint64_t master_seed) {
    ExperimentPlan p;
    for (std::size_t n = 200; n <= 2000; n += 20) p.n_grid.push_back(n);
    p.replications = 500;
    p.master_seed = master_seed;
    return p;
}

void ExperimentPlan::validate() const {
    dgp.validate();
    if (n_grid.empty()) throw std::invalid_argument("empty n grid");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1])
            throw std::invalid_argument("n grid must be strictly increasing");
    if (replications == 0) throw std::invalid_argument("replications must be >= 1");
    if (target_m == 0) throw std::invalid_argument("target sample size must be >= 1");
    train.validate();
}

namespace {

// Simulates length n + p so that exactly n supervised pairs come out.
Dataset simulate_pairs(const BinaryDgpSpec& spec, std::size_t n, std::uint64_t seed,
                       std::size_t burn_in) {
    const Trajectory traj = simulate_binary(spec, n + spec.lag_order, seed, burn_in);
    return make_supervised_for(spec, traj);
}

double bayes_hinge_risk_on(const BinaryDgpSpec& spec, const Dataset& sample) {
    // inputs carry the lagged labels first; DGP2 appends x_{t-1} last
    std::vector<double> lags(spec.lag_order);
    std::vector<double> covs;
    double total = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double* x = sample.input(i);
        for (std::size_t k = 0; k < spec.lag_order; ++k) lags[k] = x[k];
        if (spec.kind == BinaryDgpKind::DGP2) covs.assign(1, x[2]);
        const double pred = bayes_predict(spec, lags, covs);
        total += hinge(sample.labels[i] * pred);
    }
    return total / static_cast<double>(sample.size());
}

}  // namespace

TargetEstimate estimate_target(const ExperimentPlan& plan) {
    plan.validate();
    const std::uint64_t seed = derive_seed(plan.master_seed, {kTargetStream});
    Dataset sample = simulate_pairs(plan.dgp, plan.target_m, seed, plan.burn_in);

    TrainConfig cfg = plan.train;
    cfg.seed = derive_seed(plan.master_seed, {kTargetStream, 1});
    const TrainResult trained = train_erm(sample, plan.arch, cfg);

    TargetEstimate est;
    est.params = trained.params;
    est.target_risk = empirical_surrogate_risk(plan.arch, trained.params, sample);
    est.bayes_risk = bayes_hinge_risk_on(plan.dgp, sample);
    return est;
}

GapCurve run_gap_curve(const ExperimentPlan& plan, int jobs) {
    plan.validate();
    const TargetEstimate target = estimate_target(plan);

    struct RepResult {
        double risk = 0.0;
        bool failed = false;
    };
    const std::size_t R = plan.replications;
    const std::size_t total = plan.n_grid.size() * R;
    std::vector<RepResult> results(total);

    parallel_for_index(total, jobs, [&](std::size_t idx) {
        const std::size_t ni = idx / R;
        const std::size_t rep = idx % R;
        const std::size_t n = plan.n_grid[ni];
        RepResult& out = results[idx];
        try {
            const std::uint64_t train_seed =
                derive_seed(plan.master_seed, {kTrainStream, n, rep});
            // test randomness is shared across grid points within a
            // replication (common random numbers), so consecutive gap
            // differences are not dominated by independent test-floor noise
            const std::uint64_t test_seed = derive_seed(plan.master_seed, {kTestStream, rep});
            Dataset train_sample = simulate_pairs(plan.dgp, n, train_seed, plan.burn_in);
            TrainConfig cfg = plan.train;
            cfg.seed = derive_seed(plan.master_seed, {kTrainStream, n, rep, 1});
            const TrainResult trained = train_erm(train_sample, plan.arch, cfg);
            const std::size_t test_n = plan.fixed_test_size.value_or(n);
            Dataset test_sample = simulate_pairs(plan.dgp, test_n, test_seed, plan.burn_in);
            out.risk = empirical_surrogate_risk(plan.arch, trained.params, test_sample);
        } catch (const std::exception&) {
            out.failed = true;
        }
    });

    GapCurve curve;
    curve.target_risk = target.target_risk;
    curve.bayes_risk = target.bayes_risk;
    std::size_t failed_total = 0;
    for (std::size_t ni = 0; ni < plan.n_grid.size(); ++ni) {
        GapRow row;
        row.n = plan.n_grid[ni];
        for (std::size_t rep = 0; rep < R; ++rep) {
            const RepResult& r = results[ni * R + rep];
            if (r.failed) {
                ++row.failed;
                continue;
            }
            row.per_rep_risk.push_back(r.risk);
        }
        failed_total += row.failed;
        const std::size_t k = row.per_rep_risk.size();
        if (k == 0) throw std::runtime_error("every replication failed at n = " +
                                             std::to_string(row.n));
        double mean = 0.0;
        for (double v : row.per_rep_risk) mean += v;
        mean /= static_cast<double>(k);
        double var = 0.0;
        for (double v : row.per_rep_risk) var += (v - mean) * (v - mean);
        var = k > 1 ? var / static_cast<double>(k - 1) : 0.0;
        const double se = std::sqrt(var / static_cast<double>(k));
        row.gap_target_mean = mean - target.target_risk;
        row.gap_target_se = se;
        row.gap_bayes_mean = mean - target.bayes_risk;
        row.gap_bayes_se = se;
        curve.rows.push_back(row);
    }
    if (static_cast<double>(failed_total) >
        plan.max_failed_fraction * static_cast<double>(total))
        throw std::runtime_error("too many failed replications: " +
                                 std::to_string(failed_total) + " of " +
                                 std::to_string(total));
    return curve;
}

void GapCurve::export_csv(const std::string& path) const {
    CsvWriter w(path);
    w.row({"n", "gap_target_mean", "gap_target_se", "gap_bayes_mean", "gap_bayes_se",
           "failed"});
    for (const auto& r : rows)
        w.row({std::to_string(r.n), format_double(r.gap_target_mean),
               format_double(r.gap_target_se), format_double(r.gap_bayes_mean),
               format_double(r.gap_bayes_se), std::to_string(r.failed)});
}

double estimate_variance_proxy(const BinaryDgpSpec& spec, std::size_t n,
                               std::size_t replications, std::uint64_t seed) {
    if (n == 0 || replications == 0)
        throw std::invalid_argument("n and replications must be >= 1");
    // first pass: long-run mean of the Bayes predictor's hinge loss
    const BinaryChainOracle oracle = spec.lag_order == 1 && !spec.covariate_spec
                                         ? exact_risk_oracle(spec)
                                         : BinaryChainOracle{};
    double mean_loss;
    if (spec.lag_order == 1 && !spec.covariate_spec) {
        mean_loss = oracle.hinge_risk;
    } else {
        Dataset big = simulate_pairs(spec, 100000, derive_seed(seed, {17}), 500);
        mean_loss = bayes_hinge_risk_on(spec, big);
    }
    double sum_sq = 0.0;
    std::vector<double> lags(spec.lag_order);
    std::vector<double> covs;
    for (std::size_t r = 0; r < replications; ++r) {
        Dataset sample = simulate_pairs(spec, n, derive_seed(seed, {18, r}), 500);
        double s = 0.0;
        for (std::size_t i = 0; i < sample.size(); ++i) {
            const double* x = sample.input(i);
            for (std::size_t k = 0; k < spec.lag_order; ++k) lags[k] = x[k];
            if (spec.kind == BinaryDgpKind::DGP2) covs.assign(1, x[2]);
            const double pred = bayes_predict(spec, lags, covs);
            s += hinge(sample.labels[i] * pred) - mean_loss;
        }
        sum_sq += s * s;
    }
    return sum_sq / static_cast<double>(replications) / static_cast<double>(n);
}

}  // namespace wdl
