#include "flowcit/matrix.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "flowcit/errors.hpp"

namespace flowcit {

Matrix::Matrix(int rows, int cols)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {
    if (rows < 0 || cols < 0) {
        throw ConfigError("matrix dimensions must be nonnegative");
    }
}

Matrix Matrix::from_data(int rows, int cols, std::vector<double> data) {
    if (rows < 0 || cols < 0) {
        throw ConfigError("matrix dimensions must be nonnegative");
    }
    if (data.size() != static_cast<std::size_t>(rows) * cols) {
        throw ConfigError("matrix data length " + std::to_string(data.size()) +
                          " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    Matrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.data_ = std::move(data);
    if (!m.all_finite()) {
        throw DataError("matrix contains non-finite entries");
    }
    return m;
}

bool Matrix::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

namespace {

void check_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ConfigError(std::string(op) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                          std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                          std::to_string(b.cols()) + ")");
    }
}

} // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ConfigError("matmul: inner dimensions disagree (" + std::to_string(a.cols()) +
                          " vs " + std::to_string(b.rows()) + ")");
    }
    Matrix c(a.rows(), b.cols());
    const int n = a.rows(), k = a.cols(), m = b.cols();
    for (int i = 0; i < n; ++i) {
        double* ci = c.row(i);
        const double* ai = a.row(i);
        for (int p = 0; p < k; ++p) {
            const double aip = ai[p];
            const double* bp = b.row(p);
            for (int j = 0; j < m; ++j) ci[j] += aip * bp[j];
        }
    }
    return c;
}

Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw ConfigError("matmul_at_b: row counts disagree");
    }
    Matrix c(a.cols(), b.cols());
    const int n = a.rows(), k = a.cols(), m = b.cols();
    for (int p = 0; p < n; ++p) {
        const double* ap = a.row(p);
        const double* bp = b.row(p);
        for (int i = 0; i < k; ++i) {
            const double aip = ap[i];
            double* ci = c.row(i);
            for (int j = 0; j < m; ++j) ci[j] += aip * bp[j];
        }
    }
    return c;
}

Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw ConfigError("matmul_a_bt: column counts disagree");
    }
    Matrix c(a.rows(), b.rows());
    const int n = a.rows(), k = a.cols(), m = b.rows();
    for (int i = 0; i < n; ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (int j = 0; j < m; ++j) {
            const double* bj = b.row(j);
            double s = 0.0;
            for (int p = 0; p < k; ++p) s += ai[p] * bj[p];
            ci[j] = s;
        }
    }
    return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    check_same_shape(a, b, "matrix add");
    Matrix c = a;
    double* cd = c.data();
    const double* bd = b.data();
    for (std::size_t i = 0; i < c.size(); ++i) cd[i] += bd[i];
    return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    check_same_shape(a, b, "matrix subtract");
    Matrix c = a;
    double* cd = c.data();
    const double* bd = b.data();
    for (std::size_t i = 0; i < c.size(); ++i) cd[i] -= bd[i];
    return c;
}

Matrix operator*(double s, const Matrix& a) {
    Matrix c = a;
    double* cd = c.data();
    for (std::size_t i = 0; i < c.size(); ++i) cd[i] *= s;
    return c;
}

Matrix& operator+=(Matrix& a, const Matrix& b) {
    check_same_shape(a, b, "matrix add");
    double* ad = a.data();
    const double* bd = b.data();
    for (std::size_t i = 0; i < a.size(); ++i) ad[i] += bd[i];
    return a;
}

Matrix hcat(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw ConfigError("hcat: row counts disagree (" + std::to_string(a.rows()) + " vs " +
                          std::to_string(b.rows()) + ")");
    }
    Matrix c(a.rows(), a.cols() + b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        std::memcpy(c.row(i), a.row(i), sizeof(double) * a.cols());
        std::memcpy(c.row(i) + a.cols(), b.row(i), sizeof(double) * b.cols());
    }
    return c;
}

Matrix take_rows(const Matrix& m, std::span<const int> idx) {
    Matrix out(static_cast<int>(idx.size()), m.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const int r = idx[i];
        if (r < 0 || r >= m.rows()) {
            throw ConfigError("take_rows: index " + std::to_string(r) + " out of range");
        }
        std::memcpy(out.row(static_cast<int>(i)), m.row(r), sizeof(double) * m.cols());
    }
    return out;
}

std::vector<double> col_means(const Matrix& m) {
    std::vector<double> mu(m.cols(), 0.0);
    if (m.rows() == 0) return mu;
    for (int i = 0; i < m.rows(); ++i) {
        const double* r = m.row(i);
        for (int j = 0; j < m.cols(); ++j) mu[j] += r[j];
    }
    for (double& v : mu) v /= m.rows();
    return mu;
}

std::vector<double> col_stddevs(const Matrix& m) {
    std::vector<double> sd(m.cols(), 0.0);
    if (m.rows() == 0) return sd;
    const std::vector<double> mu = col_means(m);
    for (int i = 0; i < m.rows(); ++i) {
        const double* r = m.row(i);
        for (int j = 0; j < m.cols(); ++j) {
            const double d = r[j] - mu[j];
            sd[j] += d * d;
        }
    }
    for (double& v : sd) v = std::sqrt(v / m.rows());
    return sd;
}

double squared_frobenius(const Matrix& m) {
    double s = 0.0;
    const double* d = m.data();
    for (std::size_t i = 0; i < m.size(); ++i) s += d[i] * d[i];
    return s;
}

} // namespace flowcit
