#include "flowcit/mlp.hpp"

#include <cmath>
#include <string>

#include "flowcit/errors.hpp"
#include "flowcit/rng.hpp"

namespace flowcit::nn {

VelocityNet VelocityNet::init(const std::vector<int>& layer_dims, std::uint64_t seed) {
    if (layer_dims.size() != 4) {
        throw ConfigError("network needs exactly 4 layer dimensions [d_in, p1, p2, d_out], got " +
                          std::to_string(layer_dims.size()));
    }
    for (int d : layer_dims) {
        if (d < 1) throw ConfigError("network layer dimensions must all be >= 1");
    }

    VelocityNet net;
    net.layer_dims = layer_dims;
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
        const int fan_in = layer_dims[l];
        const int fan_out = layer_dims[l + 1];
        Matrix w(fan_in, fan_out);
        const double scale = std::sqrt(2.0 / fan_in);
        double* d = w.data();
        for (std::size_t i = 0; i < w.size(); ++i) d[i] = scale * rng.normal();
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(1, fan_out);
    }
    net.norm_stats.mean.assign(layer_dims.front(), 0.0);
    net.norm_stats.stddev.assign(layer_dims.front(), 1.0);
    return net;
}

namespace {

// out = act * W + 1*b
Matrix affine(const Matrix& act, const Matrix& w, const Matrix& b) {
    Matrix out = matmul(act, w);
    for (int i = 0; i < out.rows(); ++i) {
        double* r = out.row(i);
        const double* bp = b.row(0);
        for (int j = 0; j < out.cols(); ++j) r[j] += bp[j];
    }
    return out;
}

void relu_inplace(Matrix& m) {
    double* d = m.data();
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (d[i] < 0.0) d[i] = 0.0;
    }
}

} // namespace

Matrix VelocityNet::forward(const Matrix& inputs) const {
    if (inputs.cols() != input_dim()) {
        throw ConfigError("forward: input has " + std::to_string(inputs.cols()) +
                          " columns, network expects " + std::to_string(input_dim()));
    }
    Matrix act = inputs;
    for (int l = 0; l < num_layers(); ++l) {
        act = affine(act, weights[l], biases[l]);
        if (l + 1 < num_layers()) relu_inplace(act);
    }
    return act;
}

Matrix VelocityNet::velocity(double t, const Matrix& state, const Matrix& cond) const {
    const int d_state = state.cols();
    const int d_cond = cond.cols();
    if (1 + d_state + d_cond != input_dim()) {
        throw ConfigError("velocity: state/cond widths do not match network input");
    }
    if (state.rows() != cond.rows()) {
        throw ConfigError("velocity: state and cond row counts disagree");
    }
    const auto& mu = norm_stats.mean;
    const auto& sd = norm_stats.stddev;
    Matrix in(state.rows(), input_dim());
    for (int i = 0; i < state.rows(); ++i) {
        double* r = in.row(i);
        r[0] = t;
        const double* s = state.row(i);
        for (int j = 0; j < d_state; ++j) r[1 + j] = (s[j] - mu[1 + j]) / sd[1 + j];
        const double* z = cond.row(i);
        for (int j = 0; j < d_cond; ++j) {
            r[1 + d_state + j] = (z[j] - mu[1 + d_state + j]) / sd[1 + d_state + j];
        }
    }
    return forward(in);
}

std::pair<double, Gradients> loss_and_gradients(const VelocityNet& net, const Matrix& inputs,
                                                const Matrix& targets) {
    if (inputs.rows() == 0) {
        throw ConfigError("loss_and_gradients: empty batch");
    }
    if (inputs.rows() != targets.rows()) {
        throw ConfigError("loss_and_gradients: input/target row counts disagree");
    }
    if (targets.cols() != net.output_dim()) {
        throw ConfigError("loss_and_gradients: target width does not match network output");
    }

    const int L = net.num_layers();
    const int n = inputs.rows();

    // Forward pass, keeping every activation. ReLU masks are recovered from
    // the activations themselves (act > 0  <=>  pre-activation > 0).
    std::vector<Matrix> act(L + 1);
    act[0] = inputs;
    for (int l = 0; l < L; ++l) {
        act[l + 1] = affine(act[l], net.weights[l], net.biases[l]);
        if (l + 1 < L) relu_inplace(act[l + 1]);
    }

    Matrix diff = act[L] - targets;
    const double loss = squared_frobenius(diff) / n;

    Gradients grads;
    grads.weights.resize(L);
    grads.biases.resize(L);

    Matrix delta = (2.0 / n) * diff;
    for (int l = L - 1; l >= 0; --l) {
        grads.weights[l] = matmul_at_b(act[l], delta);
        Matrix db(1, delta.cols());
        for (int i = 0; i < delta.rows(); ++i) {
            const double* r = delta.row(i);
            double* s = db.row(0);
            for (int j = 0; j < delta.cols(); ++j) s[j] += r[j];
        }
        grads.biases[l] = std::move(db);
        if (l > 0) {
            delta = matmul_a_bt(delta, net.weights[l]);
            const Matrix& hidden = act[l];
            double* dd = delta.data();
            const double* hd = hidden.data();
            for (std::size_t i = 0; i < delta.size(); ++i) {
                if (hd[i] <= 0.0) dd[i] = 0.0;
            }
        }
    }
    return {loss, std::move(grads)};
}

AdamOptimizer::AdamOptimizer(const VelocityNet& net, double learning_rate, double beta1,
                             double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
    for (const Matrix& w : net.weights) {
        m_w_.emplace_back(w.rows(), w.cols());
        v_w_.emplace_back(w.rows(), w.cols());
    }
    for (const Matrix& b : net.biases) {
        m_b_.emplace_back(b.rows(), b.cols());
        v_b_.emplace_back(b.rows(), b.cols());
    }
}

namespace {

void adam_update(Matrix& param, const Matrix& grad, Matrix& m, Matrix& v, double lr, double b1,
                 double b2, double eps, double b1_corr, double b2_corr) {
    if (param.rows() != grad.rows() || param.cols() != grad.cols()) {
        throw ConfigError("optimizer step: gradient shape does not match parameter");
    }
    double* p = param.data();
    const double* g = grad.data();
    double* md = m.data();
    double* vd = v.data();
    for (std::size_t i = 0; i < param.size(); ++i) {
        md[i] = b1 * md[i] + (1.0 - b1) * g[i];
        vd[i] = b2 * vd[i] + (1.0 - b2) * g[i] * g[i];
        const double m_hat = md[i] / b1_corr;
        const double v_hat = vd[i] / b2_corr;
        p[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
}

} // namespace

void AdamOptimizer::step(VelocityNet& net, const Gradients& grads) {
    if (grads.weights.size() != net.weights.size() || grads.biases.size() != net.biases.size()) {
        throw ConfigError("optimizer step: gradient layer count does not match network");
    }
    ++step_count_;
    const double b1_corr = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
    const double b2_corr = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        adam_update(net.weights[l], grads.weights[l], m_w_[l], v_w_[l], lr_, beta1_, beta2_, eps_,
                    b1_corr, b2_corr);
        adam_update(net.biases[l], grads.biases[l], m_b_[l], v_b_[l], lr_, beta1_, beta2_, eps_,
                    b1_corr, b2_corr);
    }
}

} // namespace flowcit::nn
