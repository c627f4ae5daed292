#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace wdl {

// Lipschitz-coefficient sequence alpha_k, k >= 1:
//   Geometric:  alpha_k = c * a^k,         a in [0, 1)
//   Riemannian: alpha_k = c * (k+1)^-gamma, gamma > 1
// Both conventions put the k = 1 coefficient strictly below c, so the total
// c = 1, gamma = 2 sequence sums to zeta(2) - 1 and stays contracting.
// Riemannian sums are evaluated as an explicit partial sum to K plus an
// integral bracket of the tail; the reported value is the bracket midpoint
// and the certificate its half-width.
class CoefficientSequence {
public:
    static CoefficientSequence geometric(double scale, double ratio);
    static CoefficientSequence riemannian(double scale, double exponent,
                                          std::size_t truncation = 1000000);

    double alpha(std::size_t k) const;  // k >= 1
    bool is_geometric() const { return geometric_; }
    double scale() const { return c_; }
    double ratio_or_exponent() const { return geometric_ ? a_ : gamma_; }

    struct CertifiedSum {
        double value = 0.0;
        double certificate = 0.0;  // |value - exact| <= certificate
    };

    CertifiedSum total_sum() const;                    // sum_{k >= 1} alpha_k
    CertifiedSum tail_sum(std::size_t iota) const;     // sum_{k >= iota+1} alpha_k
    bool contracting() const;                          // total < 1, certified

private:
    CoefficientSequence() = default;
    void ensure_suffix_cache() const;

    bool geometric_ = true;
    double c_ = 0.0, a_ = 0.0, gamma_ = 2.0;
    std::size_t truncation_ = 1000000;
    // suffix_[k] = explicit sum of alpha_j for j in [k, truncation_]
    mutable std::shared_ptr<std::vector<double>> suffix_;
    mutable double beyond_truncation_mid_ = 0.0;
    mutable double beyond_truncation_half_ = 0.0;
};

struct TauBound {
    double value = 0.0;
    std::size_t argmin_iota = 0;
};

// inf over iota in {1..j} of alpha^{j/iota} + tail(iota), by full
// enumeration; requires the contraction alpha = total < 1.
TauBound tau_bound(const CoefficientSequence& seq, std::size_t j);

// A coefficient bound j -> eps_j with enough structure to certify the tails
// of sum_j (j+1)^k eps_j.
struct EpsSequence {
    std::function<double(std::size_t)> eval;

    enum class TailKind { None, GeometricEnvelope, SqrtExpEnvelope };
    TailKind tail_kind = TailKind::None;
    // GeometricEnvelope: eps_j <= env_scale * env_rate^j      (env_rate < 1)
    // SqrtExpEnvelope:   eps_j <= env_scale * exp(-sqrt(env_rate * j))
    double env_scale = 0.0;
    double env_rate = 0.0;

    static EpsSequence geometric(double scale, double rate);
    static EpsSequence sqrt_exp(double scale, double rate);
    static EpsSequence plain(std::function<double(std::size_t)> f);

    // Upper bound on sum_{j > J} (j+1)^k eps_j; +inf when no envelope.
    double tail_certificate(std::size_t k, std::size_t J) const;
};

enum class MomentVerdict { Holds, Fails, Inconclusive };

struct MomentCheckReport {
    std::size_t k = 0;
    double partial_sum = 0.0;
    double tail_certificate = 0.0;  // +inf when unavailable
    double bound = 0.0;             // L1 * L2^k * (k!)^mu
    MomentVerdict verdict = MomentVerdict::Inconclusive;
};

// Checks sum_{j >= 0} (j+1)^k eps_j <= L1 L2^k (k!)^mu for k = 0..k_max,
// summing to j_max and closing the tail with the sequence's certificate.
std::vector<MomentCheckReport> check_factorial_moment(const EpsSequence& eps, double L1, double L2, double mu,
                               std::size_t k_max, std::size_t j_max);

struct MomentFit {
    double L1 = 0.0;
    double L2 = 0.0;
};

// Least squares of log sums against log L1 + k log L2 + mu log k! over
// k = 0..k_max; callers typically inflate the result by 10% before checking.
MomentFit fit_moment_constants(const EpsSequence& eps, double mu, std::size_t k_max,
                       std::size_t j_max);

struct GeometricRateEnvelope {
    double scale = 0.0;  // calibrated so the envelope dominates tau_bound
    double rate = 0.0;   // log(alpha) * log(a) > 0
    double operator()(std::size_t j) const;
    EpsSequence as_eps_sequence() const;
};

// Evaluable envelope c * exp(-sqrt(log(alpha) log(a) j)) for the geometric
// case, with c calibrated against tau_bound on j in {1..j_max}.
GeometricRateEnvelope geometric_case_rate(const CoefficientSequence& seq,
                                          std::size_t j_max = 200);

}  // namespace wdl
