#pragma once

#include <string>

#include "flowcit/errors.hpp"
#include "flowcit/matrix.hpp"

namespace flowcit {

/// An n-row sample of (X, Y, Z) observations. Rows are samples, columns are
/// coordinates; the three matrices always share their row count.
struct DataTriplet {
    Matrix x;
    Matrix y;
    Matrix z;

    int n() const { return x.rows(); }
    int dx() const { return x.cols(); }
    int dy() const { return y.cols(); }
    int dz() const { return z.cols(); }

    static DataTriplet validated(Matrix x, Matrix y, Matrix z) {
        if (x.rows() != y.rows() || x.rows() != z.rows()) {
            throw DataError("data triplet row counts disagree: x=" + std::to_string(x.rows()) +
                            " y=" + std::to_string(y.rows()) + " z=" + std::to_string(z.rows()));
        }
        if (!x.all_finite() || !y.all_finite() || !z.all_finite()) {
            throw DataError("data triplet contains non-finite entries");
        }
        return DataTriplet{std::move(x), std::move(y), std::move(z)};
    }
};

} // namespace flowcit
