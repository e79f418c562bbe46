#include "flowcit/flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flowcit/errors.hpp"
#include "flowcit/rng.hpp"

namespace flowcit::flow {

void FlowConfig::validate() const {
    if (hidden_width < 2 || hidden_width % 2 != 0) {
        throw ConfigError("hidden width must be even and >= 2, got " +
                          std::to_string(hidden_width));
    }
    if (ode_steps < 1) throw ConfigError("ode steps must be >= 1");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("batch size must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
}

std::pair<Matrix, std::vector<double>> sample_training_tuples(const Matrix& side_data,
                                                              const Matrix& cond_data,
                                                              std::uint64_t seed) {
    if (side_data.rows() == 0) throw ConfigError("sample_training_tuples: empty data");
    if (side_data.rows() != cond_data.rows()) {
        throw ConfigError("sample_training_tuples: side/cond row counts disagree");
    }
    Rng rng(seed);
    Matrix noise = rng.normal_matrix(side_data.rows(), side_data.cols());
    std::vector<double> times = rng.uniform_vector(side_data.rows());
    return {std::move(noise), std::move(times)};
}

namespace {

enum : std::uint64_t { kInitStream = 1, kNoiseStream = 2, kShuffleStream = 3 };

// inputs(i) = [t_i | standardized interpolant | standardized cond]
void build_training_batch(const Matrix& side, const Matrix& cond, const Matrix& noise,
                          const std::vector<double>& times, const nn::NormStats& stats,
                          Matrix& inputs, Matrix& targets) {
    const int n = side.rows();
    const int d_side = side.cols();
    const int d_cond = cond.cols();
    inputs = Matrix(n, 1 + d_side + d_cond);
    targets = Matrix(n, d_side);
    for (int i = 0; i < n; ++i) {
        const double t = times[i];
        double* in = inputs.row(i);
        double* tg = targets.row(i);
        const double* s = side.row(i);
        const double* x0 = noise.row(i);
        const double* z = cond.row(i);
        in[0] = t;
        for (int j = 0; j < d_side; ++j) {
            const double xt = (1.0 - t) * x0[j] + t * s[j];
            in[1 + j] = (xt - stats.mean[1 + j]) / stats.stddev[1 + j];
            tg[j] = s[j] - x0[j];
        }
        for (int j = 0; j < d_cond; ++j) {
            in[1 + d_side + j] = (z[j] - stats.mean[1 + d_side + j]) / stats.stddev[1 + d_side + j];
        }
    }
}

} // namespace

nn::VelocityNet fit_velocity(const Matrix& side_data, const Matrix& cond_data,
                             const FlowConfig& cfg, TrainDiagnostics* diag) {
    cfg.validate();
    if (side_data.rows() == 0) throw DataError("fit_velocity: empty training data");
    if (side_data.rows() != cond_data.rows()) {
        throw DataError("fit_velocity: side/cond row counts disagree");
    }
    if (!side_data.all_finite() || !cond_data.all_finite()) {
        throw DataError("fit_velocity: training data contains non-finite entries");
    }

    const int n = side_data.rows();
    const int d_side = side_data.cols();
    const int d_cond = cond_data.cols();
    const int d_in = 1 + d_side + d_cond;

    nn::VelocityNet net = nn::VelocityNet::init({d_in, cfg.hidden_width, cfg.hidden_width / 2, d_side},
                                                derive_seed(cfg.seed, {kInitStream}));

    // Standardization statistics come from the raw training fold; the time
    // column keeps the identity transform.
    net.norm_stats.mean.assign(d_in, 0.0);
    net.norm_stats.stddev.assign(d_in, 1.0);
    const auto side_mu = col_means(side_data);
    const auto side_sd = col_stddevs(side_data);
    const auto cond_mu = col_means(cond_data);
    const auto cond_sd = col_stddevs(cond_data);
    for (int j = 0; j < d_side; ++j) {
        net.norm_stats.mean[1 + j] = side_mu[j];
        net.norm_stats.stddev[1 + j] = std::max(side_sd[j], nn::kStddevFloor);
    }
    for (int j = 0; j < d_cond; ++j) {
        net.norm_stats.mean[1 + d_side + j] = cond_mu[j];
        net.norm_stats.stddev[1 + d_side + j] = std::max(cond_sd[j], nn::kStddevFloor);
    }

    nn::AdamOptimizer opt(net, cfg.learning_rate);
    Matrix noise;
    std::vector<double> times;
    Matrix inputs, targets;

    const long batches_per_epoch = (n + cfg.batch_size - 1) / cfg.batch_size;
    const long total_steps = static_cast<long>(cfg.epochs) * batches_per_epoch;
    long step = 0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (epoch == 0 || cfg.resample_noise) {
            const std::uint64_t draw = cfg.resample_noise ? static_cast<std::uint64_t>(epoch) : 0u;
            auto drawn = sample_training_tuples(side_data, cond_data,
                                                derive_seed(cfg.seed, {kNoiseStream, draw}));
            noise = std::move(drawn.first);
            times = std::move(drawn.second);
            build_training_batch(side_data, cond_data, noise, times, net.norm_stats, inputs, targets);
        }

        Rng shuffle_rng(derive_seed(cfg.seed, {kShuffleStream, static_cast<std::uint64_t>(epoch)}));
        const std::vector<int> order = shuffle_rng.permutation(n);

        for (int start = 0; start < n; start += cfg.batch_size) {
            const int len = std::min(cfg.batch_size, n - start);
            const std::span<const int> rows(order.data() + start, static_cast<std::size_t>(len));
            const Matrix bin = take_rows(inputs, rows);
            const Matrix btg = take_rows(targets, rows);
            auto [loss, grads] = nn::loss_and_gradients(net, bin, btg);
            (void)loss;
            opt.step(net, grads);
        }
    }

    if (diag) {
        auto [final_loss, grads] = nn::loss_and_gradients(net, inputs, targets);
        (void)grads;
        diag->final_loss = final_loss;
        diag->baseline_loss = squared_frobenius(targets) / n;
    }
    return net;
}

Matrix integrate(const VelocityField& field, Matrix state, const Matrix& cond, double t_from,
                 double t_to, int steps) {
    if (steps < 1) throw ConfigError("integrate: step count must be >= 1");
    if (state.rows() != cond.rows()) {
        throw ConfigError("integrate: state and cond row counts disagree");
    }
    if (state.rows() == 0) return state;

    const double h = (t_to - t_from) / steps;
    for (int s = 0; s < steps; ++s) {
        const double t = t_from + s * h;
        const Matrix k1 = field.eval(t, state, cond);
        const Matrix k2 = field.eval(t + 0.5 * h, state + (0.5 * h) * k1, cond);
        const Matrix k3 = field.eval(t + 0.5 * h, state + (0.5 * h) * k2, cond);
        const Matrix k4 = field.eval(t + h, state + h * k3, cond);
        state += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!state.all_finite()) {
            throw NumericError("integration produced a non-finite state at step " +
                               std::to_string(s) + " of " + std::to_string(steps));
        }
    }
    return state;
}

namespace {

std::vector<double> integrate_point(const VelocityField& field, std::span<const double> point,
                                    std::span<const double> cond_point, double t_from, double t_to,
                                    int steps) {
    Matrix state = Matrix::from_data(1, static_cast<int>(point.size()),
                                     std::vector<double>(point.begin(), point.end()));
    Matrix cond = Matrix::from_data(1, static_cast<int>(cond_point.size()),
                                    std::vector<double>(cond_point.begin(), cond_point.end()));
    const Matrix out = integrate(field, std::move(state), cond, t_from, t_to, steps);
    return std::vector<double>(out.row(0), out.row(0) + out.cols());
}

} // namespace

std::vector<double> integrate_reverse(const VelocityField& field, std::span<const double> side_point,
                                      std::span<const double> cond_point, int steps) {
    return integrate_point(field, side_point, cond_point, 1.0, 0.0, steps);
}

std::vector<double> integrate_forward(const VelocityField& field, std::span<const double> noise_point,
                                      std::span<const double> cond_point, int steps) {
    return integrate_point(field, noise_point, cond_point, 0.0, 1.0, steps);
}

TransportOutput transport_dataset(const VelocityField& field_x, const VelocityField& field_y,
                                  const DataTriplet& test_fold, int steps) {
    TransportOutput out;
    out.xi_hat = integrate(field_x, test_fold.x, test_fold.z, 1.0, 0.0, steps);
    out.eta_hat = integrate(field_y, test_fold.y, test_fold.z, 1.0, 0.0, steps);
    return out;
}

} // namespace flowcit::flow
