#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "wdl/neuralnet.hpp"
#include "wdl/process_sim.hpp"

namespace wdl {

// hinge(u) = max(1 - u, 0); convex, 1-Lipschitz
inline double hinge(double u) { return u < 1.0 ? 1.0 - u : 0.0; }

// subgradient convention: -1 below the kink, 0 at and above it
inline double hinge_subgradient(double u) { return u < 1.0 ? -1.0 : 0.0; }

inline double square_loss(double u, double y) { return (u - y) * (u - y); }
inline double square_loss_derivative(double u, double y) { return 2.0 * (u - y); }

enum class Loss { Hinge, Square };

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
    std::size_t patience_epochs = 30;
    std::size_t max_epochs = 1000;
    std::uint64_t seed = 0;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    Loss loss = Loss::Hinge;

    void validate() const;
};

struct EvalReport {
    double hinge_risk = 0.0;
    double zero_one_risk = 0.0;
    double accuracy = 0.0;
    // confusion[a][p]: actual label a, predicted p, indexed 0 = -1, 1 = +1
    std::array<std::array<std::size_t, 2>, 2> confusion{{{0, 0}, {0, 0}}};

    std::size_t sample_size() const;
    std::string pretty() const;
    void export_csv(const std::string& path) const;
};

// Mean of hinge(y_i h(x_i)) over the sample. jobs selects the deterministic
// blocked-parallel kernel; the result is bitwise independent of jobs.
double empirical_surrogate_risk(const Architecture& arch, const NetworkParams& params,
                                const Dataset& sample, int jobs = 1);
// Straight serial loop, kept as the reference for the kernel above.
double empirical_surrogate_risk_serial(const Architecture& arch,
                                       const NetworkParams& params, const Dataset& sample);

// Hinge risk, 0-1 risk, accuracy and confusion matrix with predictions
// sign(h(x)), sign(0) = +1.
EvalReport empirical_01_risk(const Architecture& arch, const NetworkParams& params,
                             const Dataset& sample, int jobs = 1);

// Exact minibatch-mean loss gradient for every weight and bias; hinge kink
// resolved to 0, ReLU derivative at 0 taken as 0.
NetworkParams backprop_gradient(const Architecture& arch, const NetworkParams& params,
                                const Dataset& sample,
                                const std::vector<std::size_t>& batch_indices,
                                Loss loss = Loss::Hinge);

struct EpochRecord {
    std::size_t epoch = 0;  // 0 is the pre-training state
    double surrogate_risk = 0.0;
    double accuracy = 0.0;
};

struct TrainResult {
    NetworkParams params;  // parameters from the best-accuracy epoch
    std::vector<EpochRecord> log;
    std::size_t best_epoch = 0;
    bool stopped_early = false;
};

void export_training_log_csv(const std::vector<EpochRecord>& log, const std::string& path);

// Minibatch Adam on the empirical hinge risk, epoch-wise seeded reshuffling,
// last short batch kept. Stops once training accuracy has not strictly
// improved for patience_epochs epochs; returns the best-accuracy parameters.
TrainResult train_erm(const Dataset& sample, const Architecture& arch,
                      const TrainConfig& config);

}  // namespace wdl
