#include "flowcit/depmeasure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flowcit/errors.hpp"

namespace flowcit::dep {

Matrix pairwise_dist(const Matrix& m) {
    const int n = m.rows();
    const int d = m.cols();
    Matrix dist(n, n);
    for (int i = 0; i < n; ++i) {
        const double* ri = m.row(i);
        for (int j = i + 1; j < n; ++j) {
            const double* rj = m.row(j);
            double s = 0.0;
            for (int k = 0; k < d; ++k) {
                const double diff = ri[k] - rj[k];
                s += diff * diff;
            }
            const double v = std::sqrt(s);
            dist(i, j) = v;
            dist(j, i) = v;
        }
    }
    return dist;
}

CenteredDistances double_center(const Matrix& d) {
    const int n = d.rows();
    std::vector<double> row_mean(n, 0.0), col_mean(n, 0.0);
    double grand = 0.0;
    for (int i = 0; i < n; ++i) {
        const double* r = d.row(i);
        for (int j = 0; j < n; ++j) {
            row_mean[i] += r[j];
            col_mean[j] += r[j];
            grand += r[j];
        }
    }
    for (int i = 0; i < n; ++i) {
        row_mean[i] /= n;
        col_mean[i] /= n;
    }
    grand /= static_cast<double>(n) * n;

    Matrix a(n, n);
    for (int i = 0; i < n; ++i) {
        const double* r = d.row(i);
        double* out = a.row(i);
        for (int j = 0; j < n; ++j) {
            out[j] = r[j] - row_mean[i] - col_mean[j] + grand;
        }
    }
    return CenteredDistances{std::move(a)};
}

double centered_product_mean(const Matrix& a, const Matrix& b) {
    const int n = a.rows();
    double s = 0.0;
    const double* ad = a.data();
    const double* bd = b.data();
    for (std::size_t i = 0; i < a.size(); ++i) s += ad[i] * bd[i];
    return s / (static_cast<double>(n) * n);
}

double centered_product_mean_permuted(const Matrix& a, const Matrix& b, std::span<const int> pi) {
    const int n = a.rows();
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double* ai = a.row(i);
        const double* bi = b.row(pi[i]);
        for (int j = 0; j < n; ++j) s += ai[j] * bi[pi[j]];
    }
    return s / (static_cast<double>(n) * n);
}

namespace {

void check_pair(const Matrix& u, const Matrix& v, const char* op) {
    if (u.rows() != v.rows()) {
        throw ConfigError(std::string(op) + ": row counts disagree");
    }
    if (u.rows() < 2) {
        throw ConfigError(std::string(op) + ": needs at least 2 samples, got " +
                          std::to_string(u.rows()));
    }
}

double ratio_statistic(double num, double self_u, double self_v) {
    const double den = std::sqrt(std::max(self_u, 0.0)) * std::sqrt(std::max(self_v, 0.0));
    if (den <= 0.0) return 0.0;
    return std::max(num, 0.0) / den;
}

} // namespace

double dcov2(const Matrix& u, const Matrix& v) {
    check_pair(u, v, "dcov2");
    const Matrix a = double_center(pairwise_dist(u)).a;
    const Matrix b = double_center(pairwise_dist(v)).a;
    return centered_product_mean(a, b);
}

double dcorr2(const Matrix& u, const Matrix& v) {
    check_pair(u, v, "dcorr2");
    const Matrix a = double_center(pairwise_dist(u)).a;
    const Matrix b = double_center(pairwise_dist(v)).a;
    return ratio_statistic(centered_product_mean(a, b), centered_product_mean(a, a),
                           centered_product_mean(b, b));
}

double arccos_kernel(std::span<const double> u, std::span<const double> w, double sigma2) {
    if (u.size() != w.size()) throw ConfigError("arccos_kernel: dimensions disagree");
    if (sigma2 < 0.0) throw ConfigError("arccos_kernel: sigma2 must be nonnegative");
    double uw = 0.0, uu = 0.0, ww = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        uw += u[k] * w[k];
        uu += u[k] * u[k];
        ww += w[k] * w[k];
    }
    const double den = std::sqrt((sigma2 + uu) * (sigma2 + ww));
    if (den <= 0.0) {
        throw NumericError("arccos_kernel: degenerate (zero vectors with sigma2 = 0)");
    }
    const double arg = std::clamp((sigma2 + uw) / den, -1.0, 1.0);
    return std::acos(arg);
}

double median_squared_norm(const Matrix& m) {
    std::vector<double> norms(m.rows());
    for (int i = 0; i < m.rows(); ++i) {
        const double* r = m.row(i);
        double s = 0.0;
        for (int j = 0; j < m.cols(); ++j) s += r[j] * r[j];
        norms[i] = s;
    }
    std::sort(norms.begin(), norms.end());
    const std::size_t n = norms.size();
    if (n % 2 == 1) return norms[n / 2];
    return 0.5 * (norms[n / 2 - 1] + norms[n / 2]);
}

Matrix arccos_kernel_matrix(const Matrix& m) {
    const int n = m.rows();
    const int d = m.cols();
    const double sigma2 = median_squared_norm(m);

    std::vector<double> sq(n);
    for (int i = 0; i < n; ++i) {
        const double* r = m.row(i);
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += r[k] * r[k];
        sq[i] = s;
    }

    Matrix a(n, n);
    for (int i = 0; i < n; ++i) {
        const double* ri = m.row(i);
        for (int j = i + 1; j < n; ++j) {
            const double* rj = m.row(j);
            double uw = 0.0;
            for (int k = 0; k < d; ++k) uw += ri[k] * rj[k];
            const double den = std::sqrt((sigma2 + sq[i]) * (sigma2 + sq[j]));
            // den == 0 only when both rows are zero vectors with sigma2 = 0;
            // the kernel of two identical points is 0.
            const double v = den > 0.0 ? std::acos(std::clamp((sigma2 + uw) / den, -1.0, 1.0)) : 0.0;
            a(i, j) = v;
            a(j, i) = v;
        }
    }
    return a;
}

double ipcov2(const Matrix& u, const Matrix& v) {
    check_pair(u, v, "ipcov2");
    const Matrix a = double_center(arccos_kernel_matrix(u)).a;
    const Matrix b = double_center(arccos_kernel_matrix(v)).a;
    return centered_product_mean(a, b);
}

double ipcorr2(const Matrix& u, const Matrix& v) {
    check_pair(u, v, "ipcorr2");
    const Matrix a = double_center(arccos_kernel_matrix(u)).a;
    const Matrix b = double_center(arccos_kernel_matrix(v)).a;
    return ratio_statistic(centered_product_mean(a, b), centered_product_mean(a, a),
                           centered_product_mean(b, b));
}

CenteredKernel centered_kernel(const Matrix& m, MeasureKind kind) {
    const Matrix raw = kind == MeasureKind::distance_correlation ? pairwise_dist(m)
                                                                 : arccos_kernel_matrix(m);
    CenteredKernel out;
    out.a = double_center(raw).a;
    out.self_cov2 = centered_product_mean(out.a, out.a);
    return out;
}

double statistic_from_kernels(const CenteredKernel& u, const CenteredKernel& v) {
    return ratio_statistic(centered_product_mean(u.a, v.a), u.self_cov2, v.self_cov2);
}

} // namespace flowcit::dep
