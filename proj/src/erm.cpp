#include "wdl/erm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "wdl/csv.hpp"
#include "wdl/parallel.hpp"
#include "wdl/rng.hpp"

namespace wdl {

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0)) throw std::invalid_argument("learning rate must be >= 0");
    if (batch_size == 0) throw std::invalid_argument("batch size must be >= 1");
    if (patience_epochs == 0) throw std::invalid_argument("patience must be >= 1");
    if (max_epochs == 0) throw std::invalid_argument("max epochs must be >= 1");
    if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0 && adam_beta2 > 0.0 && adam_beta2 < 1.0))
        throw std::invalid_argument("Adam betas must lie in (0, 1)");
}

std::size_t EvalReport::sample_size() const {
    return confusion[0][0] + confusion[0][1] + confusion[1][0] + confusion[1][1];
}

std::string EvalReport::pretty() const {
    std::ostringstream os;
    os << "hinge risk    " << hinge_risk << "\n"
       << "0-1 risk      " << zero_one_risk << "\n"
       << "accuracy      " << accuracy << "\n"
       << "confusion (actual x predicted over {-1,+1})\n"
       << "          pred -1  pred +1\n"
       << "  act -1  " << confusion[0][0] << "  " << confusion[0][1] << "\n"
       << "  act +1  " << confusion[1][0] << "  " << confusion[1][1] << "\n";
    return os.str();
}

void EvalReport::export_csv(const std::string& path) const {
    CsvWriter w(path);
    w.row({"name", "value"});
    w.row({"hinge_risk", format_double(hinge_risk)});
    w.row({"zero_one_risk", format_double(zero_one_risk)});
    w.row({"accuracy", format_double(accuracy)});
    w.row({"confusion_mm", std::to_string(confusion[0][0])});
    w.row({"confusion_mp", std::to_string(confusion[0][1])});
    w.row({"confusion_pm", std::to_string(confusion[1][0])});
    w.row({"confusion_pp", std::to_string(confusion[1][1])});
}

namespace {

void require_nonempty(const Dataset& sample) {
    if (sample.size() == 0) throw std::invalid_argument("empty sample");
}

void require_shapes(const Architecture& arch, const NetworkParams& params,
                    const Dataset& sample) {
    if (sample.dim != arch.input_dim())
        throw std::invalid_argument("sample dimension does not match architecture");
    if (!params.shape_matches(arch))
        throw std::invalid_argument("params do not match architecture");
}

}  // namespace

double empirical_surrogate_risk(const Architecture& arch, const NetworkParams& params,
                                const Dataset& sample, int jobs) {
    require_nonempty(sample);
    require_shapes(arch, params, sample);
    const std::size_t n = sample.size();
    if (resolve_jobs(jobs) == 1) {
        return empirical_surrogate_risk_serial(arch, params, sample);
    }
    const double total = blocked_sum(n, jobs, [&](std::size_t i) {
        thread_local ForwardScratch scratch;
        const double h = forward(arch, params, sample.input(i), scratch);
        return hinge(sample.labels[i] * h);
    });
    return total / static_cast<double>(n);
}

double empirical_surrogate_risk_serial(const Architecture& arch,
                                       const NetworkParams& params,
                                       const Dataset& sample) {
    require_nonempty(sample);
    require_shapes(arch, params, sample);
    ForwardScratch scratch;
    const std::size_t n = sample.size();
    const double total = blocked_sum_serial(n, [&](std::size_t i) {
        const double h = forward(arch, params, sample.input(i), scratch);
        return hinge(sample.labels[i] * h);
    });
    return total / static_cast<double>(n);
}

EvalReport empirical_01_risk(const Architecture& arch, const NetworkParams& params,
                             const Dataset& sample, int jobs) {
    require_nonempty(sample);
    require_shapes(arch, params, sample);
    const std::size_t n = sample.size();

    EvalReport rep;
    const int threads = resolve_jobs(jobs);
    std::vector<std::array<std::array<std::size_t, 2>, 2>> partial;
    std::vector<double> hinge_partial;
    const std::size_t nblocks = (n + kSumBlock - 1) / kSumBlock;
    partial.assign(nblocks, {{{0, 0}, {0, 0}}});
    hinge_partial.assign(nblocks, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1 && nblocks > 1)
#endif
    for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
        ForwardScratch scratch;
        const std::size_t lo = static_cast<std::size_t>(b) * kSumBlock;
        const std::size_t hi = std::min(lo + kSumBlock, n);
        double hsum = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            const double h = forward(arch, params, sample.input(i), scratch);
            const double y = sample.labels[i];
            hsum += hinge(y * h);
            const std::size_t a = y > 0.0 ? 1 : 0;
            const std::size_t p = h >= 0.0 ? 1 : 0;  // sign(0) = +1
            ++partial[static_cast<std::size_t>(b)][a][p];
        }
        hinge_partial[static_cast<std::size_t>(b)] = hsum;
    }
    double hinge_total = 0.0;
    for (std::size_t b = 0; b < nblocks; ++b) {
        hinge_total += hinge_partial[b];
        for (int a = 0; a < 2; ++a)
            for (int p = 0; p < 2; ++p) rep.confusion[a][p] += partial[b][a][p];
    }
    rep.hinge_risk = hinge_total / static_cast<double>(n);
    const std::size_t correct = rep.confusion[0][0] + rep.confusion[1][1];
    rep.accuracy = static_cast<double>(correct) / static_cast<double>(n);
    rep.zero_one_risk = 1.0 - rep.accuracy;
    return rep;
}

NetworkParams backprop_gradient(const Architecture& arch, const NetworkParams& params,
                                const Dataset& sample,
                                const std::vector<std::size_t>& batch_indices,
                                Loss loss) {
    if (batch_indices.empty()) throw std::invalid_argument("empty minibatch");
    require_shapes(arch, params, sample);

    const std::size_t nlayers = params.layer_count();
    NetworkParams grad = params;
    for (auto& W : grad.weights) std::fill(W.data.begin(), W.data.end(), 0.0);
    for (auto& b : grad.biases) std::fill(b.begin(), b.end(), 0.0);

    ForwardScratch scratch;
    std::vector<std::vector<double>> delta(nlayers);  // d loss / d pre-activation

    for (std::size_t idx : batch_indices) {
        const double* x = sample.input(idx);
        const double y = sample.labels[idx];
        const double out = forward(arch, params, x, scratch);
        const double z_out = scratch.pre[nlayers - 1][0];

        double dloss_dout;
        if (loss == Loss::Hinge) {
            dloss_dout = hinge_subgradient(y * out) * y;
        } else {
            dloss_dout = square_loss_derivative(out, y);
        }
        double dout_dz = 1.0;
        if (arch.output_activation == OutputActivation::Tanh) {
            const double th = std::tanh(z_out);
            dout_dz = 1.0 - th * th;
        }
        delta[nlayers - 1].assign(1, dloss_dout * dout_dz);

        for (std::size_t j = nlayers - 1; j-- > 0;) {
            const Matrix& Wnext = params.weights[j + 1];
            const auto& dnext = delta[j + 1];
            auto& dj = delta[j];
            dj.assign(arch.widths[j + 1], 0.0);
            for (std::size_t r = 0; r < Wnext.rows; ++r) {
                const double dr = dnext[r];
                if (dr == 0.0) continue;
                const double* wrow = &Wnext.data[r * Wnext.cols];
                for (std::size_t c = 0; c < Wnext.cols; ++c) dj[c] += dr * wrow[c];
            }
            const auto& pre = scratch.pre[j];
            for (std::size_t c = 0; c < dj.size(); ++c) {
                double dact;
                switch (arch.hidden_activation) {
                    case Activation::ReLU: dact = pre[c] > 0.0 ? 1.0 : 0.0; break;
                    case Activation::Sigmoid: {
                        const double s = 1.0 / (1.0 + std::exp(-pre[c]));
                        dact = s * (1.0 - s);
                        break;
                    }
                    case Activation::Tanh: {
                        const double th = std::tanh(pre[c]);
                        dact = 1.0 - th * th;
                        break;
                    }
                    default: dact = 1.0;
                }
                dj[c] *= dact;
            }
        }

        for (std::size_t j = 0; j < nlayers; ++j) {
            const double* in = j == 0 ? x : scratch.post[j - 1].data();
            Matrix& Gw = grad.weights[j];
            auto& Gb = grad.biases[j];
            const auto& dj = delta[j];
            for (std::size_t r = 0; r < Gw.rows; ++r) {
                const double dr = dj[r];
                if (dr == 0.0) continue;
                double* grow = &Gw.data[r * Gw.cols];
                for (std::size_t c = 0; c < Gw.cols; ++c) grow[c] += dr * in[c];
                Gb[r] += dr;
            }
        }
    }

    const double inv = 1.0 / static_cast<double>(batch_indices.size());
    for (auto& W : grad.weights)
        for (double& v : W.data) v *= inv;
    for (auto& b : grad.biases)
        for (double& v : b) v *= inv;
    return grad;
}

void export_training_log_csv(const std::vector<EpochRecord>& log, const std::string& path) {
    CsvWriter w(path);
    w.row({"epoch", "surrogate_risk", "accuracy"});
    for (const auto& r : log)
        w.row({std::to_string(r.epoch), format_double(r.surrogate_risk),
               format_double(r.accuracy)});
}

TrainResult train_erm(const Dataset& sample, const Architecture& arch,
                      const TrainConfig& config) {
    require_nonempty(sample);
    config.validate();
    arch.validate();
    if (sample.dim != arch.input_dim())
        throw std::invalid_argument("sample dimension does not match architecture");

    NetworkParams params = init_params(arch, config.seed);
    Rng shuffle_rng(derive_seed(config.seed, {0x5u}));

    // Adam state, one slot per parameter in a fixed traversal order
    const std::size_t nparams = params.parameter_count();
    std::vector<double> m(nparams, 0.0), v(nparams, 0.0);
    std::size_t step = 0;

    const std::size_t n = sample.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainResult result;
    const auto record = [&](std::size_t epoch) {
        EpochRecord rec;
        rec.epoch = epoch;
        const EvalReport rep = empirical_01_risk(arch, params, sample);
        rec.surrogate_risk = rep.hinge_risk;
        rec.accuracy = rep.accuracy;
        if (!std::isfinite(rec.surrogate_risk))
            throw std::runtime_error("training diverged: non-finite surrogate risk");
        result.log.push_back(rec);
        return rec;
    };

    // Best epoch by accuracy, ties broken by lower surrogate risk so the
    // margins trained during the patience window are kept. The stopping rule
    // itself watches accuracy only.
    EpochRecord best = record(0);
    result.params = params;
    result.best_epoch = 0;
    std::size_t last_accuracy_gain = 0;

    std::vector<std::size_t> batch;
    batch.reserve(config.batch_size);
    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        // Fisher-Yates reshuffle, seeded by the run seed
        for (std::size_t i = n; i-- > 1;) {
            const std::size_t j =
                static_cast<std::size_t>(shuffle_rng.uniform01() * static_cast<double>(i + 1));
            std::swap(order[i], order[j]);
        }
        for (std::size_t start = 0; start < n; start += config.batch_size) {
            const std::size_t stop = std::min(start + config.batch_size, n);
            batch.assign(order.begin() + start, order.begin() + stop);
            const NetworkParams grad =
                backprop_gradient(arch, params, sample, batch, config.loss);
            ++step;
            const double bc1 = 1.0 - std::pow(config.adam_beta1, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(config.adam_beta2, static_cast<double>(step));
            std::size_t k = 0;
            for (std::size_t j = 0; j < params.layer_count(); ++j) {
                auto update = [&](double& theta, double g) {
                    m[k] = config.adam_beta1 * m[k] + (1.0 - config.adam_beta1) * g;
                    v[k] = config.adam_beta2 * v[k] + (1.0 - config.adam_beta2) * g * g;
                    const double mhat = m[k] / bc1;
                    const double vhat = v[k] / bc2;
                    theta -= config.learning_rate * mhat /
                             (std::sqrt(vhat) + config.adam_epsilon);
                    ++k;
                };
                auto& W = params.weights[j];
                const auto& Gw = grad.weights[j];
                for (std::size_t i = 0; i < W.data.size(); ++i) update(W.data[i], Gw.data[i]);
                auto& b = params.biases[j];
                const auto& Gb = grad.biases[j];
                for (std::size_t i = 0; i < b.size(); ++i) update(b[i], Gb[i]);
            }
        }
        const EpochRecord rec = record(epoch);
        if (rec.accuracy > best.accuracy) {
            last_accuracy_gain = epoch;
            best = rec;
            result.params = params;
            result.best_epoch = epoch;
        } else if (rec.accuracy == best.accuracy && rec.surrogate_risk < best.surrogate_risk) {
            best = rec;
            result.params = params;
            result.best_epoch = epoch;
        }
        if (epoch - last_accuracy_gain >= config.patience_epochs) {
            result.stopped_early = true;
            break;
        }
    }
    return result;
}

}  // namespace wdl
