#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "flowcit/matrix.hpp"

namespace flowcit::nn {

/// Per-input-column standardization parameters. Column 0 carries the raw time
/// input and keeps the identity transform; the remaining columns are the
/// state and condition coordinates.
struct NormStats {
    std::vector<double> mean;
    std::vector<double> stddev; // strictly positive (floored at 1e-8)
};

constexpr double kStddevFloor = 1e-8;

/// ReLU network with two hidden layers and a linear output, trained by least
/// squares to represent an estimated velocity field v(t, state, condition).
/// Parameters are plain matrices; instances are immutable after training and
/// safe to share across threads.
class VelocityNet {
public:
    VelocityNet() = default;

    // Weights ~ Normal(0, 2/fan_in), biases zero; deterministic per seed.
    // layer_dims must be [d_in, p1, p2, d_out] with all entries >= 1.
    static VelocityNet init(const std::vector<int>& layer_dims, std::uint64_t seed);

    // Batched forward pass on already-normalized inputs (rows x d_in).
    Matrix forward(const Matrix& inputs) const;

    // Assembles [t | state | cond], standardizes by norm_stats, and runs the
    // network. Output stays in original (unnormalized) target units.
    Matrix velocity(double t, const Matrix& state, const Matrix& cond) const;

    int input_dim() const { return layer_dims.front(); }
    int output_dim() const { return layer_dims.back(); }
    int num_layers() const { return static_cast<int>(weights.size()); }

    std::vector<int> layer_dims;  // [d_in, p1, p2, d_out]
    std::vector<Matrix> weights;  // weights[l]: dims[l] x dims[l+1]
    std::vector<Matrix> biases;   // biases[l]: 1 x dims[l+1]
    NormStats norm_stats;         // identity until set by training

    bool operator==(const VelocityNet&) const = default;
};

struct Gradients {
    std::vector<Matrix> weights;
    std::vector<Matrix> biases;
};

/// Mean squared error over the batch, loss = (1/rows) * sum_i |net(in_i) - tgt_i|^2,
/// together with its exact analytic gradients for every parameter.
std::pair<double, Gradients> loss_and_gradients(const VelocityNet& net, const Matrix& inputs,
                                                const Matrix& targets);

/// Adaptive-moment optimizer state (bias-corrected first/second moments).
class AdamOptimizer {
public:
    AdamOptimizer(const VelocityNet& net, double learning_rate, double beta1 = 0.9,
                  double beta2 = 0.999, double epsilon = 1e-8);

    void step(VelocityNet& net, const Gradients& grads);

    void set_learning_rate(double lr) { lr_ = lr; }
    long step_count() const { return step_count_; }

private:
    double lr_, beta1_, beta2_, eps_;
    long step_count_ = 0;
    std::vector<Matrix> m_w_, v_w_, m_b_, v_b_;
};

} // namespace flowcit::nn
