#pragma once

#include "flowcit/flow.hpp"
#include "flowcit/matrix.hpp"

namespace flowcit::oracle {

/// Closed-form velocity field of the scalar Gaussian pair Z ~ N(0,1),
/// X | Z ~ N(Z, 1) under linear interpolation to standard normal noise:
///   v(t, x, z) = z + (2t - 1) * (x - t*z) / ((1-t)^2 + t^2).
double gaussian_velocity(double t, double x, double z);

/// The reverse transport this field induces from t=1 down to t=0.
double gaussian_transport(double x, double z);

/// The same closed form with conditional mean z^T b per coordinate, matching
/// data generated as X = Z*B + eps with standard Gaussian errors. Coordinates
/// are conditionally independent, so the field factorizes.
class GaussianLinearField final : public flow::VelocityField {
public:
    explicit GaussianLinearField(Matrix b) : b_(std::move(b)) {}
    Matrix eval(double t, const Matrix& state, const Matrix& cond) const override;

    /// Exact latent: state - cond * B.
    Matrix transport(const Matrix& state, const Matrix& cond) const;

private:
    Matrix b_; // d_z x d_side
};

/// Literal triple-loop evaluation of S1 + S2 - 2*S3 on Euclidean distances.
/// Deliberately naive; the reference the fast implementation is checked
/// against.
double brute_dcov2(const Matrix& u, const Matrix& v);

/// Same loops with the arc-cosine kernel and per-variable median bandwidth.
double brute_ipcov2(const Matrix& u, const Matrix& v);

} // namespace flowcit::oracle
