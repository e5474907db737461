#pragma once

#include "scr/matrix.hpp"

#include <string>
#include <utility>
#include <vector>

namespace scr {

/// Numeric CSV with a header row naming the columns; `#` lines are skipped.
struct Panel {
  std::vector<std::string> names;
  Matrix data;
};

/// Throws DataError for a missing file, a header-only file ("no data rows"),
/// ragged rows, or a non-numeric cell, naming its (row, column) with data
/// rows and columns counted from 1.
Panel load_panel(const std::string& path);

/// `subject,label` CSV with a header; labels in file order.
std::vector<std::string> load_labels(const std::string& path);

/// `i j` per line, 0-based, `#` comments.
std::vector<std::pair<Index, Index>> load_edges(const std::string& path);

/// A one-row or one-column numeric CSV read as a vector.
Vector load_vector(const std::string& path);

/// 17 significant digits, round-trip exact.
std::string format_double(double value);

void write_matrix_csv(const std::string& path, const Matrix& m, const std::vector<std::string>& names,
                      const std::vector<std::string>& header_lines = {});

}  // namespace scr
