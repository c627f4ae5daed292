#include "wdl/neuralnet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "wdl/csv.hpp"
#include "wdl/rng.hpp"

namespace wdl {

double activation_lipschitz(Activation a) {
    switch (a) {
        case Activation::ReLU: return 1.0;
        case Activation::Tanh: return 1.0;
        case Activation::Sigmoid: return 0.25;
    }
    return 1.0;
}

namespace {

double apply_hidden(Activation a, double z) {
    switch (a) {
        case Activation::ReLU: return z > 0.0 ? z : 0.0;
        case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
        case Activation::Tanh: return std::tanh(z);
    }
    return z;
}

}  // namespace

std::size_t Architecture::max_hidden_width() const {
    std::size_t w = 0;
    for (std::size_t j = 1; j + 1 < widths.size(); ++j) w = std::max(w, widths[j]);
    return w;
}

void Architecture::validate() const {
    if (widths.size() < 2) throw std::invalid_argument("architecture needs input and output widths");
    if (widths.back() != 1) throw std::invalid_argument("output dimension must be 1");
    for (std::size_t w : widths)
        if (w == 0) throw std::invalid_argument("zero width layer");
}

Architecture Architecture::mlp(std::size_t input_dim,
                               const std::vector<std::size_t>& hidden,
                               Activation act, OutputActivation out) {
    Architecture a;
    a.widths.push_back(input_dim);
    for (std::size_t h : hidden) a.widths.push_back(h);
    a.widths.push_back(1);
    a.hidden_activation = act;
    a.output_activation = out;
    a.validate();
    return a;
}

std::size_t NetworkParams::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t j = 0; j < weights.size(); ++j)
        n += weights[j].data.size() + biases[j].size();
    return n;
}

bool NetworkParams::shape_matches(const Architecture& arch) const {
    if (weights.size() != arch.widths.size() - 1) return false;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (weights[j].rows != arch.widths[j + 1]) return false;
        if (weights[j].cols != arch.widths[j]) return false;
        if (biases[j].size() != arch.widths[j + 1]) return false;
    }
    return true;
}

double forward(const Architecture& arch, const NetworkParams& params,
               const double* x, ForwardScratch& scratch) {
    const std::size_t nlayers = params.layer_count();
    scratch.pre.resize(nlayers);
    scratch.post.resize(nlayers);
    const double* in = x;
    for (std::size_t j = 0; j < nlayers; ++j) {
        const Matrix& W = params.weights[j];
        auto& pre = scratch.pre[j];
        pre.assign(W.rows, 0.0);
        for (std::size_t r = 0; r < W.rows; ++r) {
            double z = params.biases[j][r];
            const double* wrow = &W.data[r * W.cols];
            for (std::size_t c = 0; c < W.cols; ++c) z += wrow[c] * in[c];
            pre[r] = z;
        }
        if (j + 1 < nlayers) {
            auto& post = scratch.post[j];
            post.resize(W.rows);
            for (std::size_t r = 0; r < W.rows; ++r)
                post[r] = apply_hidden(arch.hidden_activation, pre[r]);
            in = post.data();
        }
    }
    const double z = scratch.pre[nlayers - 1][0];
    return arch.output_activation == OutputActivation::Tanh ? std::tanh(z) : z;
}

double forward(const Architecture& arch, const NetworkParams& params,
               const std::vector<double>& x) {
    if (x.size() != arch.input_dim()) throw std::invalid_argument("input dimension mismatch");
    if (!params.shape_matches(arch)) throw std::invalid_argument("params do not match architecture");
    ForwardScratch scratch;
    return forward(arch, params, x.data(), scratch);
}

std::vector<double> flatten_theta(const NetworkParams& params) {
    std::vector<double> theta;
    theta.reserve(params.parameter_count());
    for (std::size_t j = 0; j < params.weights.size(); ++j) {
        const Matrix& W = params.weights[j];
        // column-major vec(W): stack columns
        for (std::size_t c = 0; c < W.cols; ++c)
            for (std::size_t r = 0; r < W.rows; ++r) theta.push_back(W(r, c));
        for (double b : params.biases[j]) theta.push_back(b);
    }
    return theta;
}

NetworkParams unflatten_theta(const NetworkParams& shape_like,
                              const std::vector<double>& theta) {
    if (theta.size() != shape_like.parameter_count())
        throw std::invalid_argument("theta length does not match parameter count");
    NetworkParams out = shape_like;
    std::size_t k = 0;
    for (std::size_t j = 0; j < out.weights.size(); ++j) {
        Matrix& W = out.weights[j];
        for (std::size_t c = 0; c < W.cols; ++c)
            for (std::size_t r = 0; r < W.rows; ++r) W(r, c) = theta[k++];
        for (double& b : out.biases[j]) b = theta[k++];
    }
    return out;
}

std::size_t sparsity(const NetworkParams& params, double threshold) {
    if (threshold < 0.0) throw std::invalid_argument("threshold must be >= 0");
    std::size_t count = 0;
    for (std::size_t j = 0; j < params.weights.size(); ++j) {
        for (double w : params.weights[j].data)
            if (std::fabs(w) > threshold) ++count;
        for (double b : params.biases[j])
            if (std::fabs(b) > threshold) ++count;
    }
    return count;
}

MembershipReport check_membership(const Architecture& arch,
                                  const NetworkParams& params,
                                  const ComplexityBudget& budget,
                                  const std::vector<std::vector<double>>& probe_inputs,
                                  double sparsity_threshold) {
    if (probe_inputs.empty())
        throw std::invalid_argument("probe_inputs must be nonempty for the sup-norm check");
    MembershipReport rep;
    rep.depth_ok = static_cast<double>(arch.depth()) <= budget.depth_bound;
    rep.width_ok = static_cast<double>(arch.max_hidden_width()) <= budget.width_bound;

    double sup = 0.0;
    for (const std::vector<double>& th = flatten_theta(params); double v : th)
        sup = std::max(sup, std::fabs(v));
    rep.theta_sup = sup;
    rep.theta_norm_ok = sup <= budget.theta_sup_bound;

    ForwardScratch scratch;
    double emp = 0.0;
    for (const auto& x : probe_inputs)
        emp = std::max(emp, std::fabs(forward(arch, params, x.data(), scratch)));
    rep.empirical_sup = emp;
    rep.sup_norm_certified =
        arch.output_activation == OutputActivation::Tanh && budget.output_sup_bound >= 1.0;
    rep.sup_norm_ok = rep.sup_norm_certified || emp <= budget.output_sup_bound;

    rep.sparsity_ok =
        static_cast<double>(sparsity(params, sparsity_threshold)) <= budget.sparsity_level;
    return rep;
}

double lipschitz_bound(const Architecture& arch, const ComplexityBudget& budget) {
    const double csig = activation_lipschitz(arch.hidden_activation);
    const double L = static_cast<double>(arch.depth());
    return std::pow(csig, L) * std::pow(budget.theta_sup_bound, L + 1.0);
}

double lipschitz_certificate(const Architecture& arch, const ComplexityBudget& budget) {
    const double L = static_cast<double>(arch.depth());
    const double N = std::max(1.0, static_cast<double>(arch.max_hidden_width()));
    return lipschitz_bound(arch, budget) * std::pow(N, L);
}

NetworkParams init_params(const Architecture& arch, std::uint64_t seed) {
    arch.validate();
    Rng rng(seed);
    NetworkParams p;
    const std::size_t nlayers = arch.widths.size() - 1;
    p.weights.resize(nlayers);
    p.biases.resize(nlayers);
    for (std::size_t j = 0; j < nlayers; ++j) {
        const std::size_t fan_in = arch.widths[j];
        const std::size_t fan_out = arch.widths[j + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        p.weights[j] = Matrix(fan_out, fan_in);
        for (double& w : p.weights[j].data) w = rng.uniform(-bound, bound);
        p.biases[j].assign(fan_out, 0.0);
    }
    return p;
}

void save_params_csv(const NetworkParams& params, const std::string& path) {
    CsvWriter w(path);
    w.row({"layer", "kind", "row", "col", "value"});
    for (std::size_t j = 0; j < params.weights.size(); ++j) {
        const Matrix& W = params.weights[j];
        for (std::size_t c = 0; c < W.cols; ++c)
            for (std::size_t r = 0; r < W.rows; ++r)
                w.row({std::to_string(j + 1), "W", std::to_string(r), std::to_string(c),
                       format_double(W(r, c))});
        for (std::size_t r = 0; r < params.biases[j].size(); ++r)
            w.row({std::to_string(j + 1), "b", std::to_string(r), "0",
                   format_double(params.biases[j][r])});
    }
}

NetworkParams load_params_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || split_csv_line(lines[0])[0] != "layer")
        throw std::runtime_error("bad params file header: " + path);
    struct Entry {
        std::size_t layer, row, col;
        bool is_weight;
        double value;
    };
    std::vector<Entry> entries;
    std::size_t nlayers = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto cells = split_csv_line(lines[i]);
        if (cells.size() != 5) throw std::runtime_error("bad params row " + std::to_string(i + 1));
        Entry e;
        e.layer = std::stoul(cells[0]);
        e.is_weight = cells[1] == "W";
        e.row = std::stoul(cells[2]);
        e.col = std::stoul(cells[3]);
        e.value = std::strtod(cells[4].c_str(), nullptr);
        nlayers = std::max(nlayers, e.layer);
        entries.push_back(e);
    }
    NetworkParams p;
    p.weights.resize(nlayers);
    p.biases.resize(nlayers);
    for (const Entry& e : entries) {
        auto& W = p.weights[e.layer - 1];
        auto& b = p.biases[e.layer - 1];
        if (e.is_weight) {
            W.rows = std::max(W.rows, e.row + 1);
            W.cols = std::max(W.cols, e.col + 1);
        } else {
            if (b.size() < e.row + 1) b.resize(e.row + 1, 0.0);
        }
    }
    for (auto& W : p.weights) W.data.assign(W.rows * W.cols, 0.0);
    for (const Entry& e : entries) {
        if (e.is_weight)
            p.weights[e.layer - 1](e.row, e.col) = e.value;
        else
            p.biases[e.layer - 1][e.row] = e.value;
    }
    return p;
}

}  // namespace wdl
