#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wdl {

// AR(1) exogenous covariate: X_t = ar_coefficient * X_{t-1} + innovation_std * eta_t,
// eta_t standard normal.
struct CovariateSpec {
    double ar_coefficient = 0.5;
    double innovation_std = 1.0;
    void validate() const;
};

enum class BinaryDgpKind { DGP1, DGP2, CustomAffine };

// Binary autoregression: Y_t | past ~ 2 Bernoulli(p_t) - 1 with
// p_t = (1 + f(state)) / 2, where f is the model link.
//   DGP1:  f = -0.25 + 0.6 y1                       coefficients (c0, c1)
//   DGP2:  f = 0.1 - 0.15 max(y1,0) + 0.25 min(y1,0) + 0.15 y2 + 0.2/(1+x1^2)
//          coefficients (c0, c_pos, c_neg, c2, c_x)
//   CustomAffine: f = c0 + sum_k c_k y_k            coefficients (c0, c1..cp)
struct BinaryDgpSpec {
    BinaryDgpKind kind = BinaryDgpKind::DGP1;
    std::size_t lag_order = 1;
    std::vector<double> coefficients;
    std::optional<CovariateSpec> covariate_spec;

    static BinaryDgpSpec dgp1();
    static BinaryDgpSpec dgp2();
    static BinaryDgpSpec custom_affine(const std::vector<double>& coeffs);

    double link(const double* lagged_labels, const double* lagged_covariates) const;
    double sum_abs_lag_coefficients() const;
    // Throws std::invalid_argument when the link escapes [-1, 1] on the
    // reachable grid or the lag coefficients violate the contraction.
    void validate() const;
};

// Immutable sampled trajectory; covariates, when present, are aligned with
// labels by index.
struct Trajectory {
    std::vector<double> labels;
    std::vector<double> covariates;  // empty when the model has none
    std::uint64_t seed = 0;

    std::size_t size() const { return labels.size(); }
    bool has_covariates() const { return !covariates.empty(); }
    void export_csv(const std::string& path) const;  // header t,y,x1,...
};

Trajectory simulate_binary(const BinaryDgpSpec& spec, std::size_t n,
                           std::uint64_t seed, std::size_t burn_in = 500);

// sign(f(state)) with sign(0) = +1.
double bayes_predict(const BinaryDgpSpec& spec,
                     const std::vector<double>& lagged_labels,
                     const std::vector<double>& lagged_covariates = {});

// Exact stationary distribution and risks for the one-lag no-covariate case
// (a two-state Markov chain). Independent oracle for the simulators and the
// Monte-Carlo estimates.
struct BinaryChainOracle {
    double stationary_prob_plus = 0.0;
    double zero_one_risk = 0.0;  // Bayes classifier, 0-1 loss
    double hinge_risk = 0.0;     // Bayes classifier, hinge surrogate
    double trans_plus_given_minus = 0.0;
    double trans_plus_given_plus = 0.0;
};

BinaryChainOracle exact_risk_oracle(const BinaryDgpSpec& spec);

// Finite-lag affine causal process Y_t = M(past) xi_t + f(past).
//   ARX1:    f = f0 + sum_k f_k Y_{t-k},  M = m0 (constant)
//   ARCH1X:  f = 0,  M = sqrt(m0 + sum_k m_k Y_{t-k}^2)   (H = M^2 affine)
// xi_t = innovation_std * u_t with u_t uniform on [-sqrt(3), sqrt(3)]
// (bounded, unit variance).
enum class AcxKind { ARX1, ARCH1X };

struct AcxSpec {
    AcxKind model_kind = AcxKind::ARX1;
    std::vector<double> f_coefficients;  // (f0, f1, ..., fp)
    std::vector<double> m_coefficients;  // ARX1: (m0); ARCH1X: (omega, a1, ..., aq)
    double innovation_std = 1.0;

    double contraction_sum() const;
    void validate() const;  // throws on contraction violation
};

Trajectory simulate_acx(const AcxSpec& spec, std::size_t n, std::uint64_t seed,
                        std::size_t burn_in = 500);

// Supervised view of a trajectory: inputs are the p most recent
// (label, covariate) observations, most recent first, interleaved as
// (y_{t-1}, x_{t-1}, y_{t-2}, x_{t-2}, ...). Row-major storage.
struct Dataset {
    std::size_t dim = 0;
    std::vector<double> inputs;  // size() * dim
    std::vector<double> labels;

    std::size_t size() const { return labels.size(); }
    const double* input(std::size_t i) const { return &inputs[i * dim]; }
};

Dataset make_supervised(const Trajectory& traj, std::size_t lag_order);

// Model-specific inputs used by the experiments: DGP1 (y_{t-1}),
// DGP2 (y_{t-1}, y_{t-2}, x_{t-1}), CustomAffine (y_{t-1}, ..., y_{t-p}).
Dataset make_supervised_for(const BinaryDgpSpec& spec, const Trajectory& traj);

}  // namespace wdl
