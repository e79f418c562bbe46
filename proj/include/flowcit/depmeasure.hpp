#pragma once

#include <span>
#include <vector>

#include "flowcit/matrix.hpp"

namespace flowcit::dep {

enum class MeasureKind {
    distance_correlation,
    improved_projection_correlation,
};

/// Doubly centered distance (or kernel) matrix:
/// A[i][j] = D[i][j] - rowmean_i - colmean_j + grandmean.
struct CenteredDistances {
    Matrix a;
    int n() const { return a.rows(); }
};

/// Euclidean distances between rows; symmetric with zero diagonal.
Matrix pairwise_dist(const Matrix& m);

CenteredDistances double_center(const Matrix& d);

/// Squared sample distance covariance, the biased V-statistic
/// S1 + S2 - 2*S3 = (1/n^2) * sum_ij A_ij B_ij.
double dcov2(const Matrix& u, const Matrix& v);

/// dcov^2(U,V) / (dcov(U,U) * dcov(V,V)); 0 when either factor vanishes
/// (a constant sample is independent of everything).
double dcorr2(const Matrix& u, const Matrix& v);

/// Arc-cosine similarity: acos of (s2 + u.w) / sqrt((s2 + u.u)(s2 + w.w)),
/// argument clamped to [-1, 1]. Equals 0 at u == w.
double arccos_kernel(std::span<const double> u, std::span<const double> w, double sigma2);

/// Median of the squared row norms, the kernel bandwidth for a sample.
double median_squared_norm(const Matrix& m);

/// Pairwise arc-cosine kernel matrix with sigma2 = median_squared_norm(m).
Matrix arccos_kernel_matrix(const Matrix& m);

/// Improved projection covariance/correlation: the dcov pipeline with the
/// Euclidean distance replaced by the arc-cosine kernel, bandwidth computed
/// per variable on the sample itself.
double ipcov2(const Matrix& u, const Matrix& v);
double ipcorr2(const Matrix& u, const Matrix& v);

/// Precomputed half of a permutation test: the centered matrix of one
/// variable plus its self-covariance mean(A o A) (invariant under row
/// permutations of the underlying sample).
struct CenteredKernel {
    Matrix a;
    double self_cov2 = 0.0;
};

CenteredKernel centered_kernel(const Matrix& m, MeasureKind kind);

/// (1/n^2) sum_ij A_ij B_ij.
double centered_product_mean(const Matrix& a, const Matrix& b);

/// Same with the rows/columns of B permuted: (1/n^2) sum_ij A_ij B_{pi(i),pi(j)}.
double centered_product_mean_permuted(const Matrix& a, const Matrix& b,
                                      std::span<const int> pi);

/// Correlation-style statistic from precomputed kernels (clamped to >= 0).
double statistic_from_kernels(const CenteredKernel& u, const CenteredKernel& v);

} // namespace flowcit::dep
