#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "wdl/neuralnet.hpp"

namespace wdl {

// The four covariance-inequality weight choices and their normalized forms.
enum class PsiKind { Theta, Eta, Kappa, Lambda };

struct PsiValue {
    double psi = 0.0;      // psi(Lip g1, Lip g2, u, v)
    double psi_norm = 0.0; // normalized Psi(u, v)
};

PsiValue psi_value(PsiKind kind, std::size_t u, std::size_t v, double lip1, double lip2);
double psi_norm_11(PsiKind kind);  // Psi(1, 1)

// Everything the deviation bounds and the epsilon roots consume.
struct BoundInputs {
    double M = 1.0;       // loss sup bound
    double G = 1.0;       // loss-vs-hypothesis Lipschitz factor
    double C_sigma = 1.0; // activation Lipschitz constant
    double L1 = 1.0;      // weak-dependence constants
    double L2 = 1.0;
    double mu = 0.0;
    PsiKind psi_kind = PsiKind::Theta;
    double C = 1.0;       // variance proxy
    double C3 = 1.0;      // second-regime prefactor
    double nu = 0.5;
    double eta = 0.05;    // confidence level
    double alpha = 3.0;   // rate parameter, > 2
    ComplexityBudget complexity;
    double n = 0.0;       // sample size

    void validate() const;
};

// log N(H, eps/4G) <= 2L(S+1) log((4G/eps) C_sigma L (N+1) (B v 1)).
// Returns nothing when the inner argument is not positive (L = 0 class).
std::optional<double> log_covering_bound(const ComplexityBudget& complexity, double eps,
                                         double G, double C_sigma);

struct MainRegimeConstants {
    double C1 = 0.0;
    double C2 = 0.0;
    double C4 = 0.0;
    double C6 = 0.0;
    double Cn1 = 0.0;        // n^2 / (4 C1 n + 8 C2^{1/(mu+2)} (nM)^{(2mu+3)/(mu+2)})
    double Cn1_prime = 0.0;  // n^2 / (C1 n + 2 C2^{1/(mu+2)} (2nM)^{(2mu+3)/(mu+2)})
};

MainRegimeConstants main_regime_constants(const BoundInputs& in);

// Result of a monotone root solve; `root` is empty when the equation has no
// solution in (0, 2M) at this n.
struct RootResult {
    std::optional<double> root;
    double residual = 0.0;
    std::string reason;  // set when infeasible
};

// Unique zero of phi(eps) = 2L(S+1) log eps + Cn1 eps^2 + log eta - C6
// on (0, 2M), by bisection.
RootResult solve_eps1(const BoundInputs& in);
double phi1(const BoundInputs& in, double eps);

struct Eps1Prime {
    double power_form = 0.0;   // [log(1/eta) / Cn1]^{mu+2}
    double sqrt_form = 0.0;  // [log(1/eta) / Cn1']^{1/2}
};

// Two circulated closed forms for eps1' with different exponents; they
// disagree, so both are computed and reported side by side.
Eps1Prime eps1_prime(const BoundInputs& in);

struct SecondRegimeResult {
    double C5 = 0.0;
    double Cn2 = 0.0;
    double Cn2_prime = 0.0;
    RootResult eps2;
    double eps2_prime = 0.0;  // [log(C3 log n / eta) / Cn2']^{1/2}
};

// Root of phi2(eps) = 2L(S+1) log eps + Cn2 eps^2 + log(eta/C3)
//                     - log log n - C6.
// use_log_n_variant replaces log log n with log n (the line as printed,
// kept behind a flag; the derivation chain gives log log n).
SecondRegimeResult second_regime_eps2(const BoundInputs& in, bool use_log_n_variant = false);
double phi2(const BoundInputs& in, double eps, bool use_log_n_variant = false);

struct NThresholds {
    // smallest integer n satisfying the closed-form main-regime display
    std::uint64_t regime1_closed_form = 1;
    // smallest integer witness of the log-decay condition; empty when it
    // exceeds the search cap
    std::optional<std::uint64_t> n0_witness;
    // smallest integer n satisfying the second-regime sample-size display
    std::uint64_t regime2_closed_form = 1;
};

NThresholds n_thresholds(const BoundInputs& in);

// the n0 decay condition at a given integer n
bool n0_condition_holds(const BoundInputs& in, std::uint64_t n);

enum class DeviationVariant { FactorialMoment, PolynomialDecay, FactorialMomentCapped };

// Right-hand side of the uniform deviation inequality, clipped to [0, 1];
// exactly 0 for eps > 2M.
double deviation_bound_rhs(const BoundInputs& in, double eps, DeviationVariant variant);

struct BoundReport {
    BoundInputs inputs;
    std::map<std::string, double> constants;
    std::optional<double> log_covering;  // at eps1 when feasible
    RootResult eps1;
    Eps1Prime eps1p;
    SecondRegimeResult regime2;
    NThresholds thresholds;
    bool regime1_root_feasible = false;
    bool regime1_rate_n_ok = false;
    bool regime2_root_feasible = false;
    bool regime2_rate_n_ok = false;

    std::string pretty() const;
    void export_csv(const std::string& path) const;
};

BoundReport compute_bound_report(const BoundInputs& in);

}  // namespace wdl
