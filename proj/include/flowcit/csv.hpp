#pragma once

#include <string>
#include <vector>

#include "flowcit/data.hpp"
#include "flowcit/matrix.hpp"

namespace flowcit::io {

/// Numeric comma-separated file -> matrix. Rows are samples, columns are
/// coordinates; an optional single header row is skipped when flagged.
/// Errors name the file, line, and column of the offending cell.
Matrix load_csv_matrix(const std::string& path, bool has_header);

/// Three aligned CSV files -> DataTriplet; row counts must agree.
DataTriplet load_csv_triplet(const std::string& path_x, const std::string& path_y,
                             const std::string& path_z, bool has_header);

/// P-values from a single-column file or from the per-replication CSV the
/// simulate command writes (the p-value is the last column; non-numeric rows
/// such as headers and the summary row are skipped).
std::vector<double> load_pvalues_csv(const std::string& path);

} // namespace flowcit::io
