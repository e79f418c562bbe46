#include "flowcit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "flowcit/errors.hpp"

namespace flowcit::oracle {

double gaussian_velocity(double t, double x, double z) {
    const double denom = (1.0 - t) * (1.0 - t) + t * t; // >= 1/2 on [0,1]
    return z + (2.0 * t - 1.0) * (x - t * z) / denom;
}

double gaussian_transport(double x, double z) { return x - z; }

Matrix GaussianLinearField::eval(double t, const Matrix& state, const Matrix& cond) const {
    if (cond.cols() != b_.rows() || state.cols() != b_.cols()) {
        throw ConfigError("gaussian field: dimensions do not match coefficient matrix");
    }
    const Matrix mean = matmul(cond, b_); // conditional mean per row
    const double denom = (1.0 - t) * (1.0 - t) + t * t;
    const double c = 2.0 * t - 1.0;
    Matrix v(state.rows(), state.cols());
    for (int i = 0; i < state.rows(); ++i) {
        const double* x = state.row(i);
        const double* mu = mean.row(i);
        double* out = v.row(i);
        for (int j = 0; j < state.cols(); ++j) {
            out[j] = mu[j] + c * (x[j] - t * mu[j]) / denom;
        }
    }
    return v;
}

Matrix GaussianLinearField::transport(const Matrix& state, const Matrix& cond) const {
    return state - matmul(cond, b_);
}

namespace {

double row_dist(const Matrix& m, int i, int j) {
    double s = 0.0;
    const double* a = m.row(i);
    const double* b = m.row(j);
    for (int k = 0; k < m.cols(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return std::sqrt(s);
}

double row_arccos(const Matrix& m, int i, int j, double sigma2,
                  const std::vector<double>& sq_norms) {
    double uw = 0.0;
    const double* a = m.row(i);
    const double* b = m.row(j);
    for (int k = 0; k < m.cols(); ++k) uw += a[k] * b[k];
    const double den = std::sqrt((sigma2 + sq_norms[i]) * (sigma2 + sq_norms[j]));
    if (den <= 0.0) return 0.0;
    return std::acos(std::clamp((sigma2 + uw) / den, -1.0, 1.0));
}

template <class EntryU, class EntryV>
double brute_s_statistic(int n, EntryU au, EntryV av) {
    const double n2 = static_cast<double>(n) * n;
    const double n3 = n2 * n;

    double s1 = 0.0;
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) s1 += au(k, l) * av(k, l);
    }
    s1 /= n2;

    double mean_u = 0.0;
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) mean_u += au(k, l);
    }
    double mean_v = 0.0;
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) mean_v += av(k, l);
    }
    const double s2 = (mean_u / n2) * (mean_v / n2);

    double s3 = 0.0;
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
            for (int m = 0; m < n; ++m) s3 += au(k, l) * av(k, m);
        }
    }
    s3 /= n3;

    return s1 + s2 - 2.0 * s3;
}

} // namespace

double brute_dcov2(const Matrix& u, const Matrix& v) {
    if (u.rows() != v.rows() || u.rows() < 2) {
        throw ConfigError("brute_dcov2: needs matching row counts >= 2");
    }
    const int n = u.rows();
    return brute_s_statistic(
        n, [&](int i, int j) { return row_dist(u, i, j); },
        [&](int i, int j) { return row_dist(v, i, j); });
}

double brute_ipcov2(const Matrix& u, const Matrix& v) {
    if (u.rows() != v.rows() || u.rows() < 2) {
        throw ConfigError("brute_ipcov2: needs matching row counts >= 2");
    }
    const int n = u.rows();

    auto sq_norms = [](const Matrix& m) {
        std::vector<double> sq(m.rows(), 0.0);
        for (int i = 0; i < m.rows(); ++i) {
            const double* r = m.row(i);
            for (int k = 0; k < m.cols(); ++k) sq[i] += r[k] * r[k];
        }
        return sq;
    };
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };

    const std::vector<double> sq_u = sq_norms(u);
    const std::vector<double> sq_v = sq_norms(v);
    const double sigma2_u = median(sq_u);
    const double sigma2_v = median(sq_v);

    return brute_s_statistic(
        n, [&](int i, int j) { return row_arccos(u, i, j, sigma2_u, sq_u); },
        [&](int i, int j) { return row_arccos(v, i, j, sigma2_v, sq_v); });
}

} // namespace flowcit::oracle
