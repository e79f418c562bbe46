#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace flowcit {

/// Dense row-major matrix of doubles. The single numeric container used
/// throughout the library; all data matrices must hold finite values.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols); // zero-filled

    // Validates size and rejects NaN/Inf entries.
    static Matrix from_data(int rows, int cols, std::vector<double> data);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }
    std::size_t size() const { return data_.size(); }

    double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

    double* row(int r) { return data_.data() + static_cast<std::size_t>(r) * cols_; }
    const double* row(int r) const { return data_.data() + static_cast<std::size_t>(r) * cols_; }
    std::span<const double> row_span(int r) const { return {row(r), static_cast<std::size_t>(cols_)}; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool all_finite() const;

    bool operator==(const Matrix& other) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

// C = A * B
Matrix matmul(const Matrix& a, const Matrix& b);
// C = A^T * B
Matrix matmul_at_b(const Matrix& a, const Matrix& b);
// C = A * B^T
Matrix matmul_a_bt(const Matrix& a, const Matrix& b);

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Matrix& operator+=(Matrix& a, const Matrix& b);

// [A | B] column concatenation; row counts must agree.
Matrix hcat(const Matrix& a, const Matrix& b);

// Rows of `m` selected by `idx`, in order.
Matrix take_rows(const Matrix& m, std::span<const int> idx);

std::vector<double> col_means(const Matrix& m);
// Population standard deviation per column (divides by n).
std::vector<double> col_stddevs(const Matrix& m);

double squared_frobenius(const Matrix& m);

} // namespace flowcit
