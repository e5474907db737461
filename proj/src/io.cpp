#include "scr/io.hpp"

#include "scr/error.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace scr {

namespace {

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path));
  return in;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  std::string out = s.substr(first, last - first + 1);
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool blank(const std::string& line) {
  const std::string t = trim(line);
  return t.empty() || t.front() == '#';
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

Panel load_panel(const std::string& path) {
  auto in = open(path);
  std::string line;
  Panel panel;
  while (std::getline(in, line)) {
    if (!blank(line)) {
      panel.names = split(line);
      break;
    }
  }
  if (panel.names.empty()) throw DataError(fmt::format("'{}' is empty", path));
  const std::size_t width = panel.names.size();

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    const auto fields = split(line);
    const std::size_t row = rows.size() + 1;
    if (fields.size() != width) {
      throw DataError(fmt::format("'{}': row {} has {} fields, expected {}", path, row, fields.size(), width));
    }
    std::vector<double> values(width);
    for (std::size_t c = 0; c < width; ++c) {
      if (!parse_double(fields[c], values[c])) {
        throw DataError(fmt::format("'{}': non-numeric value '{}' at ({},{})", path, fields[c], row, c + 1));
      }
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw DataError(fmt::format("'{}': no data rows", path));

  panel.data.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < width; ++c) panel.data(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  return panel;
}

std::vector<std::string> load_labels(const std::string& path) {
  auto in = open(path);
  std::string line;
  bool header = true;
  std::vector<std::string> labels;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    if (header) {
      header = false;
      continue;
    }
    ++row;
    const auto fields = split(line);
    if (fields.size() != 2 || fields[1].empty()) {
      throw DataError(fmt::format("'{}': row {} is not a `subject,label` pair", path, row));
    }
    labels.push_back(fields[1]);
  }
  if (labels.empty()) throw DataError(fmt::format("'{}': no data rows", path));
  return labels;
}

std::vector<std::pair<Index, Index>> load_edges(const std::string& path) {
  auto in = open(path);
  std::string line;
  std::vector<std::pair<Index, Index>> edges;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (blank(line)) continue;
    std::istringstream ss(line);
    long long i = 0, j = 0;
    std::string rest;
    if (!(ss >> i >> j) || (ss >> rest)) throw DataError(fmt::format("'{}': malformed edge at line {}", path, lineno));
    edges.emplace_back(static_cast<Index>(i), static_cast<Index>(j));
  }
  return edges;
}

Vector load_vector(const std::string& path) {
  const Panel panel = load_panel(path);
  if (panel.data.rows() == 1) return panel.data.row(0).transpose();
  if (panel.data.cols() == 1) return panel.data.col(0);
  throw DataError(fmt::format("'{}' must have a single row or a single column", path));
}

std::string format_double(double value) { return fmt::format("{:.17g}", value); }

void write_matrix_csv(const std::string& path, const Matrix& m, const std::vector<std::string>& names,
                      const std::vector<std::string>& header_lines) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path));
  for (const auto& h : header_lines) fmt::print(out, "# {}\n", h);
  fmt::print(out, "{}\n", fmt::join(names, ","));
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) fmt::print(out, "{}{}", c ? "," : "", format_double(m(r, c)));
    fmt::print(out, "\n");
  }
}

}  // namespace scr
