#include "wdl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "wdl/csv.hpp"

namespace wdl {

PsiValue psi_value(PsiKind kind, std::size_t u, std::size_t v, double lip1, double lip2) {
    if (u == 0 || v == 0) throw std::invalid_argument("u and v must be >= 1");
    if (lip1 < 0.0 || lip2 < 0.0) throw std::invalid_argument("Lipschitz values must be >= 0");
    const double du = static_cast<double>(u), dv = static_cast<double>(v);
    PsiValue out;
    switch (kind) {
        case PsiKind::Theta:
            out.psi = dv * lip2;
            out.psi_norm = 2.0 * dv;
            break;
        case PsiKind::Eta:
            out.psi = du * lip1 + dv * lip2;
            out.psi_norm = du + dv;
            break;
        case PsiKind::Kappa:
            out.psi = du * dv * lip1 * lip2;
            out.psi_norm = du * dv;
            break;
        case PsiKind::Lambda:
            out.psi = du * lip1 + dv * lip2 + du * dv * lip1 * lip2;
            out.psi_norm = (du + dv + du * dv) / 2.0;
            break;
    }
    return out;
}

double psi_norm_11(PsiKind kind) { return psi_value(kind, 1, 1, 1.0, 1.0).psi_norm; }

void BoundInputs::validate() const {
    if (!(M > 0.0 && G > 0.0 && C_sigma > 0.0))
        throw std::invalid_argument("M, G, C_sigma must be positive");
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0, 1)");
    if (!(alpha > 2.0)) throw std::invalid_argument("alpha must exceed 2");
    if (!(nu > 0.0 && nu < 1.0)) throw std::invalid_argument("nu must lie in (0, 1)");
    if (mu < 0.0 || L1 < 0.0 || L2 < 0.0)
        throw std::invalid_argument("mu, L1, L2 must be >= 0");
    if (!(C > 0.0 && C3 > 0.0)) throw std::invalid_argument("C and C3 must be positive");
    if (!(n >= 1.0)) throw std::invalid_argument("n must be >= 1");
}

std::optional<double> log_covering_bound(const ComplexityBudget& cx, double eps,
                                         double G, double C_sigma) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    const double L = cx.depth_bound;
    const double inner = (4.0 * G / eps) * C_sigma * L * (cx.width_bound + 1.0) *
                         std::max(cx.theta_sup_bound, 1.0);
    if (!(inner > 0.0)) return std::nullopt;  // L = 0 degenerates
    return 2.0 * L * (cx.sparsity_level + 1.0) * std::log(inner);
}

MainRegimeConstants main_regime_constants(const BoundInputs& in) {
    in.validate();
    const double Psi11 = psi_norm_11(in.psi_kind);
    const double expo = (2.0 * in.mu + 3.0) / (in.mu + 2.0);
    MainRegimeConstants c;
    c.C1 = 4.0 * in.M * in.M * Psi11 * in.L1;
    c.C2 = 2.0 * in.M * in.L2 * std::max(std::pow(2.0, 3.0 + in.mu) / Psi11, 1.0);
    c.C4 = 4.0 * c.C1 + 8.0 * std::pow(c.C2, 1.0 / (in.mu + 2.0)) * std::pow(in.M, expo);
    const ComplexityBudget& cx = in.complexity;
    c.C6 = 2.0 * cx.depth_bound * (cx.sparsity_level + 1.0) *
           std::log(4.0 * in.G * in.C_sigma * cx.depth_bound * (cx.width_bound + 1.0) *
                    std::max(cx.theta_sup_bound, 1.0));
    const double n = in.n;
    c.Cn1 = n * n / (4.0 * c.C1 * n +
                     8.0 * std::pow(c.C2, 1.0 / (in.mu + 2.0)) * std::pow(n * in.M, expo));
    c.Cn1_prime =
        n * n / (c.C1 * n +
                 2.0 * std::pow(c.C2, 1.0 / (in.mu + 2.0)) * std::pow(2.0 * n * in.M, expo));
    return c;
}

double phi1(const BoundInputs& in, double eps) {
    const MainRegimeConstants c = main_regime_constants(in);
    const double ls = 2.0 * in.complexity.depth_bound * (in.complexity.sparsity_level + 1.0);
    return ls * std::log(eps) + c.Cn1 * eps * eps + std::log(in.eta) - c.C6;
}

namespace {

// Bisection for a strictly increasing function on (lo, hi) with f(lo) < 0 <
// f(hi). Runs until the bracket is below width_tol or the residual target is
// met.
template <typename F>
double bisect_increasing(F f, double lo, double hi, double width_tol, int max_iter) {
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < max_iter && hi - lo > width_tol; ++it) {
        mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::fabs(fm) < 1e-12) return mid;
        if (fm < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

RootResult solve_increasing_on_0_2M(const std::function<double(double)>& f, double M) {
    RootResult out;
    const double hi = 2.0 * M * (1.0 - 1e-12);
    const double lo = 2.0 * M * 1e-30;
    if (!(f(hi) > 0.0)) {
        out.reason = "infeasible: phi(2M) <= 0 at this sample size";
        return out;
    }
    if (!(f(lo) < 0.0)) {
        out.reason = "infeasible: phi has no sign change in (0, 2M)";
        return out;
    }
    const double root = bisect_increasing(f, lo, hi, 1e-14, 200);
    out.root = root;
    out.residual = f(root);
    return out;
}

}  // namespace

RootResult solve_eps1(const BoundInputs& in) {
    in.validate();
    if (in.complexity.depth_bound <= 0.0) {
        RootResult out;
        out.reason = "infeasible: covering bound degenerates at L = 0";
        return out;
    }
    return solve_increasing_on_0_2M([&](double e) { return phi1(in, e); }, in.M);
}

Eps1Prime eps1_prime(const BoundInputs& in) {
    const MainRegimeConstants c = main_regime_constants(in);
    const double log_inv_eta = std::log(1.0 / in.eta);
    Eps1Prime out;
    out.power_form = std::pow(log_inv_eta / c.Cn1, in.mu + 2.0);
    out.sqrt_form = std::sqrt(log_inv_eta / c.Cn1_prime);
    return out;
}

namespace {

struct SecondRegimeCore {
    double C5, Cn2, Cn2_prime;
};

SecondRegimeCore second_regime_core(const BoundInputs& in) {
    SecondRegimeCore c;
    c.C5 = 4.0 * (in.C + std::pow(in.M, in.nu) / in.C);
    const double n = in.n;
    const double logn = std::log(n);
    c.Cn2 = (n * n / 4.0) /
            (n * in.C + logn * std::pow(n, in.nu - 0.25) * std::pow(in.M, in.nu) / in.C);
    c.Cn2_prime =
        n * n /
        (n * in.C + logn * std::pow(n, in.nu - 0.25) * std::pow(2.0 * in.M, in.nu) / in.C);
    return c;
}

double phi2_impl(const BoundInputs& in, double eps, bool use_log_n_variant) {
    const SecondRegimeCore c = second_regime_core(in);
    const ComplexityBudget& cx = in.complexity;
    const double ls = 2.0 * cx.depth_bound * (cx.sparsity_level + 1.0);
    const double C6 = ls * std::log(4.0 * in.G * in.C_sigma * cx.depth_bound *
                                    (cx.width_bound + 1.0) * std::max(cx.theta_sup_bound, 1.0));
    const double tail = use_log_n_variant ? std::log(in.n) : std::log(std::log(in.n));
    return ls * std::log(eps) + c.Cn2 * eps * eps + std::log(in.eta / in.C3) - tail - C6;
}

}  // namespace

double phi2(const BoundInputs& in, double eps, bool use_log_n_variant) {
    return phi2_impl(in, eps, use_log_n_variant);
}

SecondRegimeResult second_regime_eps2(const BoundInputs& in, bool use_log_n_variant) {
    in.validate();
    if (in.n < 3.0) throw std::invalid_argument("second-regime bound needs n >= 3");
    const SecondRegimeCore core = second_regime_core(in);
    SecondRegimeResult out;
    out.C5 = core.C5;
    out.Cn2 = core.Cn2;
    out.Cn2_prime = core.Cn2_prime;
    if (in.complexity.depth_bound <= 0.0) {
        out.eps2.reason = "infeasible: covering bound degenerates at L = 0";
    } else {
        out.eps2 = solve_increasing_on_0_2M(
            [&](double e) { return phi2_impl(in, e, use_log_n_variant); }, in.M);
    }
    out.eps2_prime = std::sqrt(
        std::max(0.0, std::log(in.C3 * std::log(in.n) / in.eta)) / core.Cn2_prime);
    return out;
}

bool n0_condition_holds(const BoundInputs& in, std::uint64_t n) {
    if (n < 1) return false;
    const MainRegimeConstants c = main_regime_constants(in);
    const double expo = (in.alpha - 2.0) / (in.alpha * (in.mu + 2.0));
    const double coef = 2.0 * c.C4 * in.complexity.depth_bound *
                        (in.complexity.sparsity_level + 1.0) /
                        (4.0 * in.alpha * in.M * in.M * (in.mu + 2.0));
    const double dn = static_cast<double>(n);
    return coef * std::log(dn) / std::pow(dn, expo) < 0.5;
}

NThresholds n_thresholds(const BoundInputs& in) {
    in.validate();
    const MainRegimeConstants c = main_regime_constants(in);
    const ComplexityBudget& cx = in.complexity;
    const double ls = 2.0 * cx.depth_bound * (cx.sparsity_level + 1.0);
    NThresholds out;

    constexpr double kIntCap = 9e18;  // stays castable to uint64
    const double gap1 = std::max(c.C6 - std::log(in.eta) - ls * std::log(2.0 * in.M), 0.0);
    const double t1 = std::pow(c.C4 / (2.0 * in.M * in.M) * gap1,
                               in.alpha * (in.mu + 2.0) / (in.alpha - 2.0));
    out.regime1_closed_form = t1 <= 1.0 ? 1
                    : t1 >= kIntCap
                        ? std::numeric_limits<std::uint64_t>::max()
                        : static_cast<std::uint64_t>(std::ceil(t1));

    // n0: smallest integer past the peak of log n / n^expo with the decay
    // condition holding for every larger n
    const double expo = (in.alpha - 2.0) / (in.alpha * (in.mu + 2.0));
    const double peak = std::exp(1.0 / expo);
    const std::uint64_t cap = std::uint64_t{1} << 62;
    std::uint64_t lo = peak >= 2.0 ? static_cast<std::uint64_t>(std::floor(peak)) : 1;
    const std::uint64_t hi0 = lo + 1;
    if (n0_condition_holds(in, lo) && n0_condition_holds(in, hi0)) {
        out.n0_witness = 1;  // the condition holds at and beyond the peak
    } else {
        std::uint64_t hi = std::max<std::uint64_t>(hi0, 2);
        while (hi < cap && !n0_condition_holds(in, hi)) hi *= 2;
        if (hi >= cap) {
            out.n0_witness = std::nullopt;
        } else {
            // first n in (lo, hi] holding; condition is monotone past the peak
            while (hi - lo > 1) {
                const std::uint64_t mid = lo + (hi - lo) / 2;
                if (n0_condition_holds(in, mid))
                    hi = mid;
                else
                    lo = mid;
            }
            out.n0_witness = hi;
        }
    }

    const double C5 = 4.0 * (in.C + std::pow(in.M, in.nu) / in.C);
    const double gap2 =
        std::max(c.C6 - std::log(in.eta / in.C3) - ls * std::log(2.0 * in.M), 0.0);
    const double t2 =
        std::pow(C5 / (2.0 * in.M * in.M) * gap2, in.alpha / (in.alpha - 2.0));
    // strict inequality: smallest integer n with n > t2
    out.regime2_closed_form = t2 < 1.0 ? 1
                    : t2 >= kIntCap
                        ? std::numeric_limits<std::uint64_t>::max()
                        : static_cast<std::uint64_t>(std::floor(t2)) + 1;
    return out;
}

double deviation_bound_rhs(const BoundInputs& in, double eps, DeviationVariant variant) {
    in.validate();
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (eps > 2.0 * in.M) return 0.0;

    const auto covering = log_covering_bound(in.complexity, eps, in.G, in.C_sigma);
    if (!covering) throw std::invalid_argument("degenerate complexity: L = 0");
    const double n = in.n;
    const double Psi11 = psi_norm_11(in.psi_kind);
    double log_rhs = 0.0;
    switch (variant) {
        case DeviationVariant::FactorialMoment: {
            const double An = 2.0 * n * in.M * in.M * Psi11 * in.L1;
            const double Bn =
                2.0 * in.M * in.L2 * std::max(std::pow(2.0, 3.0 + in.mu) / Psi11, 1.0);
            const double expo = (2.0 * in.mu + 3.0) / (in.mu + 2.0);
            const double denom =
                An + std::pow(Bn, 1.0 / (in.mu + 2.0)) * std::pow(n * eps / 2.0, expo);
            log_rhs = *covering - (n * n * eps * eps / 8.0) / denom;
            break;
        }
        case DeviationVariant::PolynomialDecay: {
            const double An = n * in.C;
            const double Bn = std::pow(n, 0.75) * std::log(n) / An;
            const double denom = An + Bn * std::pow(n * eps / 2.0, in.nu);
            log_rhs = std::log(in.C3) + *covering + std::log(std::log(n)) -
                      (n * n * eps * eps / 4.0) / denom;
            break;
        }
        case DeviationVariant::FactorialMomentCapped: {
            const MainRegimeConstants c = main_regime_constants(in);
            const double expo = (2.0 * in.mu + 3.0) / (in.mu + 2.0);
            const double denom =
                c.C1 * n +
                2.0 * std::pow(c.C2, 1.0 / (in.mu + 2.0)) * std::pow(n * in.M, expo);
            log_rhs = *covering - (n * n * eps * eps / 4.0) / denom;
            break;
        }
    }
    if (log_rhs >= 0.0) return 1.0;
    return std::exp(log_rhs);
}

BoundReport compute_bound_report(const BoundInputs& in) {
    in.validate();
    BoundReport rep;
    rep.inputs = in;
    const MainRegimeConstants c1 = main_regime_constants(in);
    rep.constants["C1"] = c1.C1;
    rep.constants["C2"] = c1.C2;
    rep.constants["C4"] = c1.C4;
    rep.constants["C6"] = c1.C6;
    rep.constants["Cn1"] = c1.Cn1;
    rep.constants["Cn1_prime"] = c1.Cn1_prime;
    rep.eps1 = solve_eps1(in);
    rep.eps1p = eps1_prime(in);
    rep.regime2 = second_regime_eps2(in);
    rep.constants["C5"] = rep.regime2.C5;
    rep.constants["Cn2"] = rep.regime2.Cn2;
    rep.constants["Cn2_prime"] = rep.regime2.Cn2_prime;
    rep.thresholds = n_thresholds(in);
    rep.regime1_root_feasible = rep.eps1.root.has_value();
    rep.regime2_root_feasible = rep.regime2.eps2.root.has_value();
    const double n = in.n;
    rep.regime1_rate_n_ok =
        rep.thresholds.n0_witness.has_value() &&
        n >= static_cast<double>(std::max(rep.thresholds.regime1_closed_form, *rep.thresholds.n0_witness));
    rep.regime2_rate_n_ok = n > 0 && n >= static_cast<double>(rep.thresholds.regime2_closed_form);
    if (rep.eps1.root)
        rep.log_covering = log_covering_bound(in.complexity, *rep.eps1.root, in.G, in.C_sigma);
    return rep;
}

std::string BoundReport::pretty() const {
    std::ostringstream os;
    os << "sample size n          " << inputs.n << "\n";
    for (const auto& [k, v] : constants) os << k << std::string(23 - k.size(), ' ') << v << "\n";
    os << "eps1                   ";
    if (eps1.root)
        os << *eps1.root << "  (residual " << eps1.residual << ")\n";
    else
        os << eps1.reason << "\n";
    os << "eps1_prime (statement) " << eps1p.power_form << "\n";
    os << "eps1_prime (proof)     " << eps1p.sqrt_form << "\n";
    os << "eps2                   ";
    if (regime2.eps2.root)
        os << *regime2.eps2.root << "  (residual " << regime2.eps2.residual << ")\n";
    else
        os << regime2.eps2.reason << "\n";
    os << "eps2_prime             " << regime2.eps2_prime << "\n";
    if (log_covering) os << "log covering at eps1   " << *log_covering << "\n";
    os << "n min (main regime)    " << thresholds.regime1_closed_form << "\n";
    os << "n0 decay witness       ";
    if (thresholds.n0_witness)
        os << *thresholds.n0_witness << "\n";
    else
        os << "beyond search cap\n";
    os << "n min (second regime)  " << thresholds.regime2_closed_form << "\n";
    os << "main root feasible     " << (regime1_root_feasible ? "yes" : "no") << "\n";
    os << "main rate n ok         " << (regime1_rate_n_ok ? "yes" : "no") << "\n";
    os << "second root feasible   " << (regime2_root_feasible ? "yes" : "no") << "\n";
    os << "second rate n ok       " << (regime2_rate_n_ok ? "yes" : "no") << "\n";
    return os.str();
}

void BoundReport::export_csv(const std::string& path) const {
    CsvWriter w(path);
    w.row({"name", "value"});
    w.row({"n", format_double(inputs.n)});
    for (const auto& [k, v] : constants) w.row({k, format_double(v)});
    w.row({"eps1", eps1.root ? format_double(*eps1.root) : "infeasible"});
    w.row({"eps1_residual", eps1.root ? format_double(eps1.residual) : ""});
    w.row({"eps1_prime_stmt", format_double(eps1p.power_form)});
    w.row({"eps1_prime_proof", format_double(eps1p.sqrt_form)});
    w.row({"eps2", regime2.eps2.root ? format_double(*regime2.eps2.root) : "infeasible"});
    w.row({"eps2_residual", regime2.eps2.root ? format_double(regime2.eps2.residual) : ""});
    w.row({"eps2_prime", format_double(regime2.eps2_prime)});
    if (log_covering) w.row({"log_covering_at_eps1", format_double(*log_covering)});
    w.row({"n_threshold_regime1_closed_form", std::to_string(thresholds.regime1_closed_form)});
    w.row({"n_threshold_n0_witness",
           thresholds.n0_witness ? std::to_string(*thresholds.n0_witness) : "beyond_cap"});
    w.row({"n_threshold_regime2_closed_form", std::to_string(thresholds.regime2_closed_form)});
    w.row({"regime1_root_feasible", regime1_root_feasible ? "1" : "0"});
    w.row({"regime1_rate_n_ok", regime1_rate_n_ok ? "1" : "0"});
    w.row({"regime2_root_feasible", regime2_root_feasible ? "1" : "0"});
    w.row({"regime2_rate_n_ok", regime2_rate_n_ok ? "1" : "0"});
}

}  // namespace wdl
