#include "flowcit/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <string_view>

#include "flowcit/errors.hpp"

namespace flowcit::io {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

bool parse_cell(std::string_view cell, double& out) {
    cell = trim(cell);
    if (cell.empty()) return false;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

std::vector<std::string_view> split_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            cells.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return cells;
}

} // namespace

Matrix load_csv_matrix(const std::string& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);

    std::vector<double> values;
    int cols = -1;
    int rows = 0;
    int line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (has_header && line_no == 1) continue;

        const auto cells = split_line(line);
        if (cols == -1) {
            cols = static_cast<int>(cells.size());
        } else if (static_cast<int>(cells.size()) != cols) {
            throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(cols) + " columns, found " +
                            std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            double v;
            if (!parse_cell(cells[c], v)) {
                throw DataError(path + ":" + std::to_string(line_no) + ": column " +
                                std::to_string(c + 1) + ": cannot parse '" +
                                std::string(trim(cells[c])) + "' as a finite number");
            }
            values.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) throw DataError("file has no data rows: " + path);
    return Matrix::from_data(rows, cols, std::move(values));
}

DataTriplet load_csv_triplet(const std::string& path_x, const std::string& path_y,
                             const std::string& path_z, bool has_header) {
    Matrix x = load_csv_matrix(path_x, has_header);
    Matrix y = load_csv_matrix(path_y, has_header);
    Matrix z = load_csv_matrix(path_z, has_header);
    if (x.rows() != y.rows() || x.rows() != z.rows()) {
        throw DataError("row counts disagree: " + path_x + " has " + std::to_string(x.rows()) +
                        ", " + path_y + " has " + std::to_string(y.rows()) + ", " + path_z +
                        " has " + std::to_string(z.rows()));
    }
    return DataTriplet::validated(std::move(x), std::move(y), std::move(z));
}

std::vector<double> load_pvalues_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);

    std::vector<double> ps;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_line(line);
        double v;
        if (!parse_cell(cells.back(), v)) continue; // header / summary rows
        if (v < 0.0 || v > 1.0) {
            throw DataError(path + ":" + std::to_string(line_no) + ": p-value " +
                            std::to_string(v) + " outside [0, 1]");
        }
        ps.push_back(v);
    }
    if (ps.empty()) throw DataError("no p-values found in " + path);
    return ps;
}

} // namespace flowcit::io
