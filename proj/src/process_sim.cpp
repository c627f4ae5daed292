#include "wdl/process_sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "wdl/csv.hpp"
#include "wdl/rng.hpp"

namespace wdl {

void CovariateSpec::validate() const {
    if (!(std::fabs(ar_coefficient) < 1.0))
        throw std::invalid_argument("covariate AR coefficient must satisfy |a| < 1");
    if (!(innovation_std > 0.0))
        throw std::invalid_argument("covariate innovation std must be positive");
}

BinaryDgpSpec BinaryDgpSpec::dgp1() {
    BinaryDgpSpec s;
    s.kind = BinaryDgpKind::DGP1;
    s.lag_order = 1;
    s.coefficients = {-0.25, 0.6};
    return s;
}

BinaryDgpSpec BinaryDgpSpec::dgp2() {
    BinaryDgpSpec s;
    s.kind = BinaryDgpKind::DGP2;
    s.lag_order = 2;
    s.coefficients = {0.1, -0.15, 0.25, 0.15, 0.2};
    s.covariate_spec = CovariateSpec{};
    return s;
}

BinaryDgpSpec BinaryDgpSpec::custom_affine(const std::vector<double>& coeffs) {
    if (coeffs.size() < 2)
        throw std::invalid_argument("custom affine link needs an intercept and >= 1 lag");
    BinaryDgpSpec s;
    s.kind = BinaryDgpKind::CustomAffine;
    s.lag_order = coeffs.size() - 1;
    s.coefficients = coeffs;
    return s;
}

double BinaryDgpSpec::link(const double* y, const double* x) const {
    switch (kind) {
        case BinaryDgpKind::DGP1:
            return coefficients[0] + coefficients[1] * y[0];
        case BinaryDgpKind::DGP2:
            return coefficients[0] + coefficients[1] * std::max(y[0], 0.0) +
                   coefficients[2] * std::min(y[0], 0.0) + coefficients[3] * y[1] +
                   coefficients[4] / (1.0 + x[0] * x[0]);
        case BinaryDgpKind::CustomAffine: {
            double f = coefficients[0];
            for (std::size_t k = 0; k < lag_order; ++k) f += coefficients[k + 1] * y[k];
            return f;
        }
    }
    return 0.0;
}

double BinaryDgpSpec::sum_abs_lag_coefficients() const {
    if (kind == BinaryDgpKind::DGP2) {
        // lag-1 enters through its positive and negative parts; the Lipschitz
        // coefficient in y1 is the larger slope
        return std::max(std::fabs(coefficients[1]), std::fabs(coefficients[2])) +
               std::fabs(coefficients[3]);
    }
    double s = 0.0;
    for (std::size_t k = 1; k < coefficients.size(); ++k) s += std::fabs(coefficients[k]);
    return s;
}

void BinaryDgpSpec::validate() const {
    if (lag_order == 0) throw std::invalid_argument("lag order must be >= 1");
    const std::size_t expected = kind == BinaryDgpKind::DGP1   ? 2
                                 : kind == BinaryDgpKind::DGP2 ? 5
                                                               : lag_order + 1;
    if (coefficients.size() != expected)
        throw std::invalid_argument("coefficient vector has wrong length for this model");
    if (covariate_spec) covariate_spec->validate();
    if (!(sum_abs_lag_coefficients() < 1.0))
        throw std::invalid_argument("lag coefficients violate the contraction condition");

    // evaluate the link on every sign pattern crossed with a covariate grid
    std::vector<double> y(lag_order, -1.0);
    const std::size_t patterns = std::size_t{1} << lag_order;
    std::vector<double> xgrid{0.0};
    if (covariate_spec) {
        const double sigma = covariate_spec->innovation_std /
                             std::sqrt(1.0 - covariate_spec->ar_coefficient *
                                                 covariate_spec->ar_coefficient);
        for (int i = -40; i <= 40; ++i) xgrid.push_back(0.2 * sigma * i);
    }
    for (std::size_t mask = 0; mask < patterns; ++mask) {
        for (std::size_t k = 0; k < lag_order; ++k)
            y[k] = (mask >> k) & 1 ? 1.0 : -1.0;
        for (double x : xgrid) {
            const double f = link(y.data(), &x);
            if (!(f >= -1.0 && f <= 1.0))
                throw std::invalid_argument("link escapes [-1, 1] on the reachable state grid");
        }
    }
}

void Trajectory::export_csv(const std::string& path) const {
    CsvWriter w(path);
    std::vector<std::string> header{"t", "y"};
    if (has_covariates()) header.push_back("x1");
    w.row(header);
    for (std::size_t t = 0; t < labels.size(); ++t) {
        std::vector<std::string> row{std::to_string(t + 1), format_double(labels[t])};
        if (has_covariates()) row.push_back(format_double(covariates[t]));
        w.row(row);
    }
}

Trajectory simulate_binary(const BinaryDgpSpec& spec, std::size_t n,
                           std::uint64_t seed, std::size_t burn_in) {
    if (n == 0) throw std::invalid_argument("n must be >= 1");
    spec.validate();

    Rng rng(seed);
    const std::size_t p = spec.lag_order;
    std::vector<double> y(p, -1.0);  // most recent first; washed out by burn-in
    double x = 0.0;
    const bool has_x = spec.covariate_spec.has_value();

    Trajectory traj;
    traj.seed = seed;
    traj.labels.reserve(n);
    if (has_x) traj.covariates.reserve(n);

    for (std::size_t t = 0; t < burn_in + n; ++t) {
        const double f = spec.link(y.data(), &x);
        const double pt = (1.0 + f) * 0.5;
        if (!(pt >= 0.0 && pt <= 1.0))
            throw std::logic_error("p_t left [0, 1] during generation");
        const double label = rng.uniform01() < pt ? 1.0 : -1.0;
        double x_next = x;
        if (has_x)
            x_next = spec.covariate_spec->ar_coefficient * x +
                     spec.covariate_spec->innovation_std * rng.normal();
        for (std::size_t k = p; k-- > 1;) y[k] = y[k - 1];
        y[0] = label;
        x = x_next;
        if (t >= burn_in) {
            traj.labels.push_back(label);
            if (has_x) traj.covariates.push_back(x_next);
        }
    }
    return traj;
}

double bayes_predict(const BinaryDgpSpec& spec,
                     const std::vector<double>& lagged_labels,
                     const std::vector<double>& lagged_covariates) {
    if (lagged_labels.size() != spec.lag_order)
        throw std::invalid_argument("state has wrong number of lagged labels");
    const bool needs_x = spec.kind == BinaryDgpKind::DGP2;
    if (needs_x && lagged_covariates.empty())
        throw std::invalid_argument("state is missing the lagged covariate");
    const double x = lagged_covariates.empty() ? 0.0 : lagged_covariates[0];
    const double f = spec.link(lagged_labels.data(), &x);
    return f >= 0.0 ? 1.0 : -1.0;
}

BinaryChainOracle exact_risk_oracle(const BinaryDgpSpec& spec) {
    if (spec.lag_order != 1 || spec.covariate_spec.has_value())
        throw std::invalid_argument("exact oracle needs a one-lag model without covariates");
    spec.validate();

    const double x = 0.0;
    const double ym = -1.0, yp = 1.0;
    const double p_plus_given_minus = (1.0 + spec.link(&ym, &x)) * 0.5;
    const double p_plus_given_plus = (1.0 + spec.link(&yp, &x)) * 0.5;

    // stationary law of the two-state chain: pi_+ (1 - p(+|+)) = pi_- p(+|-)
    const double denom = 1.0 - p_plus_given_plus + p_plus_given_minus;
    if (denom <= 0.0) throw std::invalid_argument("degenerate chain");
    const double pi_plus = p_plus_given_minus / denom;

    const double pred_minus = bayes_predict(spec, {ym});
    const double pred_plus = bayes_predict(spec, {yp});
    const double err_minus =
        pred_minus > 0 ? 1.0 - p_plus_given_minus : p_plus_given_minus;
    const double err_plus = pred_plus > 0 ? 1.0 - p_plus_given_plus : p_plus_given_plus;

    BinaryChainOracle o;
    o.trans_plus_given_minus = p_plus_given_minus;
    o.trans_plus_given_plus = p_plus_given_plus;
    o.stationary_prob_plus = pi_plus;
    o.zero_one_risk = (1.0 - pi_plus) * err_minus + pi_plus * err_plus;
    // a +-1 predictor on +-1 labels has hinge loss 0 when right, 2 when wrong
    o.hinge_risk = 2.0 * o.zero_one_risk;
    return o;
}

double AcxSpec::contraction_sum() const {
    const double xi_r = innovation_std;  // ||xi||_2 for the unit-variance base draw
    double s = 0.0;
    const std::size_t pf = f_coefficients.empty() ? 0 : f_coefficients.size() - 1;
    const std::size_t pm = m_coefficients.empty() ? 0 : m_coefficients.size() - 1;
    for (std::size_t k = 1; k <= std::max(pf, pm); ++k) {
        const double af = k <= pf ? std::fabs(f_coefficients[k]) : 0.0;
        double term = af;
        if (k <= pm) {
            const double am = std::fabs(m_coefficients[k]);
            // ARX1 carries lag terms in M itself, ARCH1X in H = M^2
            term += model_kind == AcxKind::ARX1 ? xi_r * am : xi_r * xi_r * am;
        }
        s += term;
    }
    return s;
}

void AcxSpec::validate() const {
    if (!(innovation_std > 0.0)) throw std::invalid_argument("innovation std must be positive");
    if (model_kind == AcxKind::ARCH1X) {
        if (m_coefficients.empty() || m_coefficients[0] <= 0.0)
            throw std::invalid_argument("ARCH needs a positive baseline variance");
        for (std::size_t k = 1; k < m_coefficients.size(); ++k)
            if (m_coefficients[k] < 0.0)
                throw std::invalid_argument("ARCH lag coefficients must be nonnegative");
        for (std::size_t k = 1; k < f_coefficients.size(); ++k)
            if (f_coefficients[k] != 0.0)
                throw std::invalid_argument("ARCH1X requires f to be lag-free");
    } else {
        if (m_coefficients.size() != 1)
            throw std::invalid_argument("ARX1 uses a constant volatility m0");
    }
    if (!(contraction_sum() < 1.0))
        throw std::invalid_argument("contraction sum must be < 1");
}

Trajectory simulate_acx(const AcxSpec& spec, std::size_t n, std::uint64_t seed,
                        std::size_t burn_in) {
    if (n == 0) throw std::invalid_argument("n must be >= 1");
    spec.validate();

    Rng rng(seed);
    const std::size_t pf = spec.f_coefficients.empty() ? 0 : spec.f_coefficients.size() - 1;
    const std::size_t pm = spec.m_coefficients.empty() ? 0 : spec.m_coefficients.size() - 1;
    const std::size_t p = std::max<std::size_t>(1, std::max(pf, pm));
    std::vector<double> y(p, 0.0);  // most recent first

    static const double kSqrt3 = std::sqrt(3.0);
    Trajectory traj;
    traj.seed = seed;
    traj.labels.reserve(n);
    for (std::size_t t = 0; t < burn_in + n; ++t) {
        double f = spec.f_coefficients.empty() ? 0.0 : spec.f_coefficients[0];
        for (std::size_t k = 1; k <= pf; ++k) f += spec.f_coefficients[k] * y[k - 1];
        double m;
        if (spec.model_kind == AcxKind::ARX1) {
            m = spec.m_coefficients[0];
        } else {
            double h = spec.m_coefficients[0];
            for (std::size_t k = 1; k <= pm; ++k)
                h += spec.m_coefficients[k] * y[k - 1] * y[k - 1];
            m = std::sqrt(h);
        }
        const double xi = spec.innovation_std * rng.uniform(-kSqrt3, kSqrt3);
        const double value = m * xi + f;
        for (std::size_t k = p; k-- > 1;) y[k] = y[k - 1];
        y[0] = value;
        if (t >= burn_in) traj.labels.push_back(value);
    }
    return traj;
}

Dataset make_supervised(const Trajectory& traj, std::size_t lag_order) {
    const std::size_t T = traj.size();
    if (lag_order == 0) throw std::invalid_argument("lag order must be >= 1");
    if (T <= lag_order) throw std::invalid_argument("trajectory too short for this lag order");
    const std::size_t cov_dim = traj.has_covariates() ? 1 : 0;
    Dataset ds;
    ds.dim = lag_order * (1 + cov_dim);
    ds.inputs.reserve((T - lag_order) * ds.dim);
    ds.labels.reserve(T - lag_order);
    for (std::size_t t = lag_order; t < T; ++t) {
        for (std::size_t k = 1; k <= lag_order; ++k) {
            ds.inputs.push_back(traj.labels[t - k]);
            if (cov_dim) ds.inputs.push_back(traj.covariates[t - k]);
        }
        ds.labels.push_back(traj.labels[t]);
    }
    return ds;
}

Dataset make_supervised_for(const BinaryDgpSpec& spec, const Trajectory& traj) {
    if (spec.kind != BinaryDgpKind::DGP2) {
        // labels-only lags, even when a covariate chain is present
        const std::size_t T = traj.size();
        const std::size_t p = spec.lag_order;
        if (T <= p) throw std::invalid_argument("trajectory too short for this lag order");
        Dataset ds;
        ds.dim = p;
        ds.labels.reserve(T - p);
        ds.inputs.reserve((T - p) * p);
        for (std::size_t t = p; t < T; ++t) {
            for (std::size_t k = 1; k <= p; ++k) ds.inputs.push_back(traj.labels[t - k]);
            ds.labels.push_back(traj.labels[t]);
        }
        return ds;
    }
    // DGP2 input is (y_{t-1}, y_{t-2}, x_{t-1})
    const std::size_t T = traj.size();
    if (T <= 2) throw std::invalid_argument("trajectory too short for DGP2 inputs");
    if (!traj.has_covariates()) throw std::invalid_argument("DGP2 inputs need covariates");
    Dataset ds;
    ds.dim = 3;
    ds.labels.reserve(T - 2);
    ds.inputs.reserve((T - 2) * 3);
    for (std::size_t t = 2; t < T; ++t) {
        ds.inputs.push_back(traj.labels[t - 1]);
        ds.inputs.push_back(traj.labels[t - 2]);
        ds.inputs.push_back(traj.covariates[t - 1]);
        ds.labels.push_back(traj.labels[t]);
    }
    return ds;
}

}  // namespace wdl
