#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wdl/erm.hpp"
#include "wdl/neuralnet.hpp"
#include "wdl/process_sim.hpp"

namespace wdl {

struct ExperimentPlan {
    BinaryDgpSpec dgp = BinaryDgpSpec::dgp1();
    std::vector<std::size_t> n_grid;     // strictly increasing
    std::size_t replications = 50;
    std::size_t target_m = 10000;        // target-network estimation sample
    Architecture arch = Architecture::mlp(1, {16, 16}, Activation::ReLU,
                                          OutputActivation::Tanh);
    TrainConfig train;
    std::uint64_t master_seed = 0;
    std::size_t burn_in = 500;
    // optional fixed-size independent test sample (default: test size = n)
    std::optional<std::size_t> fixed_test_size;
    double max_failed_fraction = 0.02;  // abort past this failure rate

    static ExperimentPlan desk_profile(std::uint64_t master_seed);
    static ExperimentPlan paper_profile(std::uint64_t master_seed);
    void validate() const;
};

struct TargetEstimate {
    NetworkParams params;
    double target_risk = 0.0;  // trained network, hinge risk on the m-sample
    double bayes_risk = 0.0;   // Bayes predictor, hinge risk on the same sample
};

// Trains on an m-sample and evaluates both the trained network and the Bayes
// predictor on it.
TargetEstimate estimate_target(const ExperimentPlan& plan);

struct GapRow {
    std::size_t n = 0;
    double gap_target_mean = 0.0;
    double gap_target_se = 0.0;
    double gap_bayes_mean = 0.0;
    double gap_bayes_se = 0.0;
    std::size_t failed = 0;
    std::vector<double> per_rep_risk;  // test hinge risk per replication
};

struct GapCurve {
    std::vector<GapRow> rows;
    double target_risk = 0.0;
    double bayes_risk = 0.0;

    void export_csv(const std::string& path) const;
};

// One row per n: train on a fresh trajectory, evaluate the hinge risk on an
// independent trajectory, aggregate over replications. Replication seeds are
// derived from (master_seed, n, rep); the fan-out is parallel over (n, rep)
// with results folded in fixed order.
GapCurve run_gap_curve(const ExperimentPlan& plan, int jobs = 1);

// Empirical variance proxy for sums of centered losses: estimates the
// smallest C with E[(sum_i (loss_i - mean))^2] <= C n via replicated
// simulation of the Bayes predictor's hinge losses.
double estimate_variance_proxy(const BinaryDgpSpec& spec, std::size_t n,
                               std::size_t replications, std::uint64_t seed);

}  // namespace wdl
