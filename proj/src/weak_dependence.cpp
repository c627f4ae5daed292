#include "wdl/weak_dependence.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wdl {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double binom(std::size_t n, std::size_t k) {
    const double v = std::exp(std::lgamma(static_cast<double>(n + 1)) -
                              std::lgamma(static_cast<double>(k + 1)) -
                              std::lgamma(static_cast<double>(n - k + 1)));
    return v < 1e15 ? std::round(v) : v;  // small coefficients are integers
}

// Gamma(m+1, T) = integral_T^inf t^m e^-t dt = m! e^-T sum_{s<=m} T^s / s!
double upper_incomplete_gamma_int(std::size_t m, double T) {
    double term = 1.0;  // T^0 / 0!
    double sum = 1.0;
    for (std::size_t s = 1; s <= m; ++s) {
        term *= T / static_cast<double>(s);
        sum += term;
    }
    double mfact = 1.0;
    for (std::size_t s = 2; s <= m; ++s) mfact *= static_cast<double>(s);
    return mfact * std::exp(-T) * sum;
}
}  // namespace

CoefficientSequence CoefficientSequence::geometric(double scale, double ratio) {
    if (scale < 0.0) throw std::invalid_argument("scale must be >= 0");
    if (!(ratio >= 0.0 && ratio < 1.0)) throw std::invalid_argument("ratio must lie in [0, 1)");
    CoefficientSequence s;
    s.geometric_ = true;
    s.c_ = scale;
    s.a_ = ratio;
    return s;
}

CoefficientSequence CoefficientSequence::riemannian(double scale, double exponent,
                                                    std::size_t truncation) {
    if (scale < 0.0) throw std::invalid_argument("scale must be >= 0");
    if (!(exponent > 1.0)) throw std::invalid_argument("exponent must be > 1");
    if (truncation < 2) throw std::invalid_argument("truncation too small");
    CoefficientSequence s;
    s.geometric_ = false;
    s.c_ = scale;
    s.gamma_ = exponent;
    s.truncation_ = truncation;
    return s;
}

double CoefficientSequence::alpha(std::size_t k) const {
    if (k == 0) throw std::invalid_argument("coefficients are indexed from k = 1");
    if (geometric_) return c_ * std::pow(a_, static_cast<double>(k));
    return c_ * std::pow(static_cast<double>(k + 1), -gamma_);
}

void CoefficientSequence::ensure_suffix_cache() const {
    if (suffix_) return;
    auto suf = std::make_shared<std::vector<double>>(truncation_ + 2, 0.0);
    for (std::size_t k = truncation_; k >= 1; --k)
        (*suf)[k] = (*suf)[k + 1] + c_ * std::pow(static_cast<double>(k + 1), -gamma_);
    suffix_ = std::move(suf);
    // integral bracket of the tail beyond the truncation point: the terms
    // past k = K are c (k+1)^-gamma, i.e. c m^-gamma for m >= K + 2
    const double K = static_cast<double>(truncation_);
    const double hi = c_ * std::pow(K + 1.0, 1.0 - gamma_) / (gamma_ - 1.0);
    const double lo = c_ * std::pow(K + 2.0, 1.0 - gamma_) / (gamma_ - 1.0);
    beyond_truncation_mid_ = 0.5 * (hi + lo);
    beyond_truncation_half_ = 0.5 * (hi - lo);
}

CoefficientSequence::CertifiedSum CoefficientSequence::total_sum() const {
    return tail_sum(0);
}

CoefficientSequence::CertifiedSum CoefficientSequence::tail_sum(std::size_t iota) const {
    CertifiedSum out;
    if (geometric_) {
        // sum_{k >= iota+1} c a^k = c a^{iota+1} / (1 - a)
        out.value = c_ * std::pow(a_, static_cast<double>(iota + 1)) / (1.0 - a_);
        out.certificate = 0.0;
        return out;
    }
    if (iota + 1 <= truncation_) {
        ensure_suffix_cache();
        out.value = (*suffix_)[iota + 1] + beyond_truncation_mid_;
        out.certificate = beyond_truncation_half_;
        return out;
    }
    // terms from k = iota + 1 on are c m^-gamma for m >= iota + 2
    const double I = static_cast<double>(iota);
    const double hi = c_ * std::pow(I + 1.0, 1.0 - gamma_) / (gamma_ - 1.0);
    const double lo = c_ * std::pow(I + 2.0, 1.0 - gamma_) / (gamma_ - 1.0);
    out.value = 0.5 * (hi + lo);
    out.certificate = 0.5 * (hi - lo);
    return out;
}

bool CoefficientSequence::contracting() const {
    const CertifiedSum t = total_sum();
    return t.value + t.certificate < 1.0;
}

TauBound tau_bound(const CoefficientSequence& seq, std::size_t j) {
    if (j == 0) throw std::invalid_argument("j must be >= 1");
    if (!seq.contracting())
        throw std::invalid_argument("tau bound needs the contraction sum < 1");
    const double alpha = seq.total_sum().value;
    TauBound best;
    best.value = kInf;
    for (std::size_t iota = 1; iota <= j; ++iota) {
        const double v = std::pow(alpha, static_cast<double>(j) / static_cast<double>(iota)) +
                         seq.tail_sum(iota).value;
        if (v < best.value) {
            best.value = v;
            best.argmin_iota = iota;
        }
    }
    return best;
}

EpsSequence EpsSequence::geometric(double scale, double rate) {
    if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("rate must lie in [0, 1)");
    EpsSequence e;
    e.eval = [scale, rate](std::size_t j) {
        return scale * std::pow(rate, static_cast<double>(j));
    };
    e.tail_kind = TailKind::GeometricEnvelope;
    e.env_scale = scale;
    e.env_rate = rate;
    return e;
}

EpsSequence EpsSequence::sqrt_exp(double scale, double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("rate must be positive");
    EpsSequence e;
    e.eval = [scale, rate](std::size_t j) {
        return scale * std::exp(-std::sqrt(rate * static_cast<double>(j)));
    };
    e.tail_kind = TailKind::SqrtExpEnvelope;
    e.env_scale = scale;
    e.env_rate = rate;
    return e;
}

EpsSequence EpsSequence::plain(std::function<double(std::size_t)> f) {
    EpsSequence e;
    e.eval = std::move(f);
    e.tail_kind = TailKind::None;
    return e;
}

double EpsSequence::tail_certificate(std::size_t k, std::size_t J) const {
    switch (tail_kind) {
        case TailKind::None:
            return kInf;
        case TailKind::GeometricEnvelope: {
            if (env_rate == 0.0) return 0.0;
            // terms u_j = (j+1)^k c rho^j have ratio <= r for j > J
            const double r = std::pow(static_cast<double>(J + 3) / static_cast<double>(J + 2),
                                      static_cast<double>(k)) *
                             env_rate;
            if (r >= 1.0) return kInf;
            const double u_first = env_scale *
                                   std::pow(static_cast<double>(J + 2), static_cast<double>(k)) *
                                   std::pow(env_rate, static_cast<double>(J + 1));
            return u_first / (1.0 - r);
        }
        case TailKind::SqrtExpEnvelope: {
            const double q = env_rate;
            // u(x) = c (x+1)^k e^{-sqrt(qx)} decreases once x >= 4k^2/q
            const double x_mono = std::max(1.0, 4.0 * static_cast<double>(k * k) / q);
            double tail = 0.0;
            std::size_t Ji = J;
            while (static_cast<double>(Ji) < x_mono) {
                ++Ji;
                tail += env_scale * std::pow(static_cast<double>(Ji + 1), static_cast<double>(k)) *
                        std::exp(-std::sqrt(q * static_cast<double>(Ji)));
            }
            // integral_Ji^inf u(x) dx via t = sqrt(qx)
            const double T = std::sqrt(q * static_cast<double>(Ji));
            double integral = 0.0;
            for (std::size_t i = 0; i <= k; ++i) {
                integral += binom(k, i) / std::pow(q, static_cast<double>(i)) *
                            upper_incomplete_gamma_int(2 * i + 1, T);
            }
            integral *= 2.0 * env_scale / q;
            return tail + integral;
        }
    }
    return kInf;
}

std::vector<MomentCheckReport> check_factorial_moment(const EpsSequence& eps, double L1, double L2, double mu,
                               std::size_t k_max, std::size_t j_max) {
    if (mu < 0.0 || L1 < 0.0 || L2 < 0.0) throw std::invalid_argument("constants must be >= 0");
    std::vector<MomentCheckReport> reports;
    reports.reserve(k_max + 1);
    for (std::size_t k = 0; k <= k_max; ++k) {
        MomentCheckReport rep;
        rep.k = k;
        double partial = 0.0;
        for (std::size_t j = 0; j <= j_max; ++j) {
            const double e = eps.eval(j);
            if (e < 0.0) throw std::invalid_argument("eps_j must be nonnegative");
            partial += std::pow(static_cast<double>(j + 1), static_cast<double>(k)) * e;
        }
        rep.partial_sum = partial;
        rep.tail_certificate = eps.tail_certificate(k, j_max);
        rep.bound = L1 * std::pow(L2, static_cast<double>(k)) *
                    std::exp(mu * std::lgamma(static_cast<double>(k + 1)));
        if (partial > rep.bound)
            rep.verdict = MomentVerdict::Fails;
        else if (partial + rep.tail_certificate <= rep.bound)
            rep.verdict = MomentVerdict::Holds;
        else
            rep.verdict = MomentVerdict::Inconclusive;
        reports.push_back(rep);
    }
    return reports;
}

MomentFit fit_moment_constants(const EpsSequence& eps, double mu, std::size_t k_max,
                       std::size_t j_max) {
    // y_k = log S_k with S_k the certified upper sum; regress on 1 and k
    // after removing mu * log k!
    const std::size_t n = k_max + 1;
    double sx = 0.0, sxx = 0.0, st = 0.0, sxt = 0.0;
    for (std::size_t k = 0; k <= k_max; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j <= j_max; ++j)
            s += std::pow(static_cast<double>(j + 1), static_cast<double>(k)) * eps.eval(j);
        const double cert = eps.tail_certificate(k, j_max);
        if (std::isfinite(cert)) s += cert;
        const double t = std::log(s) - mu * std::lgamma(static_cast<double>(k + 1));
        const double x = static_cast<double>(k);
        sx += x;
        sxx += x * x;
        st += t;
        sxt += x * t;
    }
    const double det = static_cast<double>(n) * sxx - sx * sx;
    MomentFit fit;
    fit.L1 = std::exp((sxx * st - sx * sxt) / det);
    fit.L2 = std::exp((static_cast<double>(n) * sxt - sx * st) / det);
    return fit;
}

double GeometricRateEnvelope::operator()(std::size_t j) const {
    return scale * std::exp(-std::sqrt(rate * static_cast<double>(j)));
}

EpsSequence GeometricRateEnvelope::as_eps_sequence() const {
    return EpsSequence::sqrt_exp(scale, rate);
}

GeometricRateEnvelope geometric_case_rate(const CoefficientSequence& seq,
                                          std::size_t j_max) {
    if (!seq.is_geometric())
        throw std::invalid_argument("geometric-case rate needs a geometric sequence");
    const double alpha = seq.total_sum().value;
    const double a = seq.ratio_or_exponent();
    if (!(alpha > 0.0 && alpha < 1.0) || !(a > 0.0 && a < 1.0))
        throw std::invalid_argument("alpha and a must lie in (0, 1)");
    GeometricRateEnvelope env;
    env.rate = std::log(alpha) * std::log(a);  // both logs negative
    env.scale = 0.0;
    for (std::size_t j = 1; j <= j_max; ++j) {
        const double tb = tau_bound(seq, j).value;
        const double base = std::exp(-std::sqrt(env.rate * static_cast<double>(j)));
        env.scale = std::max(env.scale, tb / base);
    }
    return env;
}

}  // namespace wdl
