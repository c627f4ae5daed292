#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wdl {

enum class Activation { ReLU, Sigmoid, Tanh };
enum class OutputActivation { Identity, Tanh };

double activation_lipschitz(Activation a);  // ReLU 1, Tanh 1, Sigmoid 1/4

// Feedforward architecture: L hidden layers, widths (p0, ..., p_{L+1}) with
// p0 the input dimension and p_{L+1} == 1.
struct Architecture {
    std::vector<std::size_t> widths;
    Activation hidden_activation = Activation::ReLU;
    OutputActivation output_activation = OutputActivation::Identity;

    std::size_t depth() const { return widths.size() - 2; }
    std::size_t input_dim() const { return widths.front(); }
    std::size_t max_hidden_width() const;
    void validate() const;  // throws std::invalid_argument

    static Architecture mlp(std::size_t input_dim,
                            const std::vector<std::size_t>& hidden,
                            Activation act, OutputActivation out);
};

// Dense matrix, row-major storage. operator()(r, c) addresses entries; the
// flattened parameter vector uses column-major order (see flatten_theta).
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Weight matrices W_j (p_j x p_{j-1}) and bias vectors b_j for the affine
// maps y -> W_j y + b_j, j = 1..L+1.
struct NetworkParams {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;

    std::size_t layer_count() const { return weights.size(); }
    std::size_t parameter_count() const;
    bool shape_matches(const Architecture& arch) const;
};

struct ComplexityBudget {
    double depth_bound = 0;     // L
    double width_bound = 0;     // N
    double theta_sup_bound = 0; // B
    double output_sup_bound = 0;// F
    double sparsity_level = 0;  // S
};

// Reusable per-layer buffers so repeated forward/backward passes do not
// allocate.
struct ForwardScratch {
    std::vector<std::vector<double>> pre;   // pre-activation per affine layer
    std::vector<std::vector<double>> post;  // post-activation per hidden layer
};

double forward(const Architecture& arch, const NetworkParams& params,
               const double* x, ForwardScratch& scratch);
double forward(const Architecture& arch, const NetworkParams& params,
               const std::vector<double>& x);

std::vector<double> flatten_theta(const NetworkParams& params);
NetworkParams unflatten_theta(const NetworkParams& shape_like,
                              const std::vector<double>& theta);

// Count of |theta_i| > threshold; threshold 0 gives the exact l0 count.
std::size_t sparsity(const NetworkParams& params, double threshold);

struct MembershipReport {
    bool depth_ok = false;
    bool width_ok = false;
    bool theta_norm_ok = false;
    bool sup_norm_ok = false;
    bool sup_norm_certified = false;  // true only when tanh output and F >= 1
    bool sparsity_ok = false;
    double theta_sup = 0.0;
    double empirical_sup = 0.0;
};

MembershipReport check_membership(const Architecture& arch,
                                  const NetworkParams& params,
                                  const ComplexityBudget& budget,
                                  const std::vector<std::vector<double>>& probe_inputs,
                                  double sparsity_threshold = 1e-6);

// C_sigma^L * B^{L+1}: the network Lipschitz factor with the parameter
// sup-norm bound applied per layer.
double lipschitz_bound(const Architecture& arch, const ComplexityBudget& budget);

// Strict certificate under the l1 input norm: entrywise |W| <= B gives
// |h(x) - h(x')| <= C_sigma^L B^{L+1} N^L ||x - x'||_1, the max width N
// folded in once per hidden layer.
double lipschitz_certificate(const Architecture& arch, const ComplexityBudget& budget);

// Uniform weights on +-sqrt(6 / (fan_in + fan_out)), zero biases.
NetworkParams init_params(const Architecture& arch, std::uint64_t seed);

void save_params_csv(const NetworkParams& params, const std::string& path);
NetworkParams load_params_csv(const std::string& path);

}  // namespace wdl
