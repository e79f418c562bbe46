#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "flowcit/data.hpp"
#include "flowcit/matrix.hpp"
#include "flowcit/mlp.hpp"

namespace flowcit::flow {

struct FlowConfig {
    int hidden_width = 32; // p1; second hidden layer gets p1/2
    int ode_steps = 100;
    int epochs = 600;
    int batch_size = 128;
    double learning_rate = 1e-3;
    // Cosine decay of the learning rate to zero over the training run; when
    // false the rate stays constant.
    bool cosine_decay = true;
    // Redraw the reference noise and interpolation times every epoch. When
    // false, a single draw is reused for all epochs.
    bool resample_noise = true;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Estimated latent samples produced by reverse transport of a test fold.
struct TransportOutput {
    Matrix xi_hat;  // n2 x d_x
    Matrix eta_hat; // n2 x d_y
};

/// A velocity field v(t, state, condition) that the ODE integrator can
/// evaluate on a batch of rows. Implemented by trained networks and by the
/// closed-form reference fields used in tests.
class VelocityField {
public:
    virtual ~VelocityField() = default;
    virtual Matrix eval(double t, const Matrix& state, const Matrix& cond) const = 0;
};

class NetVelocityField final : public VelocityField {
public:
    explicit NetVelocityField(const nn::VelocityNet& net) : net_(&net) {}
    Matrix eval(double t, const Matrix& state, const Matrix& cond) const override {
        return net_->velocity(t, state, cond);
    }

private:
    const nn::VelocityNet* net_;
};

/// Reference-noise and time draws for flow-matching training: noise is
/// standard Gaussian with the shape of side_data, times are Uniform[0,1],
/// one per row.
std::pair<Matrix, std::vector<double>> sample_training_tuples(const Matrix& side_data,
                                                              const Matrix& cond_data,
                                                              std::uint64_t seed);

struct TrainDiagnostics {
    double final_loss = 0.0;    // full-sample loss after the last epoch
    double baseline_loss = 0.0; // loss of the zero predictor on the same sample
};

/// Trains a velocity net by regressing (side - noise) on (t, interpolant, cond)
/// with interpolant = (1-t)*noise + t*side. The (state, cond) input columns
/// are standardized with training-fold statistics kept in the returned net;
/// targets stay in original units.
nn::VelocityNet fit_velocity(const Matrix& side_data, const Matrix& cond_data,
                             const FlowConfig& cfg, TrainDiagnostics* diag = nullptr);

/// Classical fixed-step 4th-order integration of d(state)/dt = v(t, state, cond)
/// over [t_from, t_to] for every row at once. Throws NumericError naming the
/// step index if the state leaves the finite range.
Matrix integrate(const VelocityField& field, Matrix state, const Matrix& cond, double t_from,
                 double t_to, int steps);

// Single-point transports: t=1 -> t=0 maps a data point to its latent,
// t=0 -> t=1 maps reference noise to a sample.
std::vector<double> integrate_reverse(const VelocityField& field, std::span<const double> side_point,
                                      std::span<const double> cond_point, int steps);
std::vector<double> integrate_forward(const VelocityField& field, std::span<const double> noise_point,
                                      std::span<const double> cond_point, int steps);

/// Row-wise reverse transport of a whole test fold through both fields.
TransportOutput transport_dataset(const VelocityField& field_x, const VelocityField& field_y,
                                  const DataTriplet& test_fold, int steps);

} // namespace flowcit::flow
