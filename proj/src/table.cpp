#include "xshop/table.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>

#include "xshop/errors.hpp"

namespace xshop {

std::uint64_t Grid::total() const {
  std::uint64_t n = 0;
  for (std::uint64_t c : cells_) n += c;
  return n;
}

std::vector<std::uint64_t> Grid::row_sums() const {
  std::vector<std::uint64_t> sums(rows_, 0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) sums[i] += at(i, j);
  return sums;
}

std::vector<std::uint64_t> Grid::col_sums() const {
  std::vector<std::uint64_t> sums(cols_, 0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) sums[j] += at(i, j);
  return sums;
}

void ContingencyTable::recompute_margins() {
  row_margins = cells.row_sums();
  col_margins = cells.col_sums();
  grand_total = cells.total();
}

ContingencyTable make_table(std::vector<std::string> row_labels,
                            std::vector<std::string> col_labels, Grid cells) {
  if (row_labels.size() != cells.rows() || col_labels.size() != cells.cols())
    throw DimensionMismatch("labels do not match cell dimensions");
  ContingencyTable t;
  t.row_labels = std::move(row_labels);
  t.col_labels = std::move(col_labels);
  t.cells = std::move(cells);
  t.recompute_margins();
  return t;
}

namespace {

const char* kTotalLabel = "Total";

void check_label(const std::string& label) {
  if (label.find('\t') != std::string::npos || label.find('\n') != std::string::npos)
    throw MalformedTableFile("label contains delimiter: " + label);
  if (label == kTotalLabel)
    throw MalformedTableFile("label collides with margin marker: " + label);
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find('\t', start);
    out.push_back(
        line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::uint64_t parse_cell(const std::string& s) {
  if (s.empty()) throw MalformedTableFile("empty cell");
  for (char c : s)
    if (c < '0' || c > '9')
      throw MalformedTableFile("cell is not a non-negative integer: " + s);
  errno = 0;
  char* end = nullptr;
  std::uint64_t v = std::strtoull(s.c_str(), &end, 10);
  if (errno != 0 || end != s.c_str() + s.size())
    throw MalformedTableFile("cell out of range: " + s);
  return v;
}

}  // namespace

void write_table(std::ostream& out, const ContingencyTable& table) {
  for (const std::string& l : table.row_labels) check_label(l);
  for (const std::string& l : table.col_labels) check_label(l);
  for (const std::string& l : table.col_labels) out << '\t' << l;
  out << '\t' << kTotalLabel << '\n';
  for (std::size_t i = 0; i < table.cells.rows(); ++i) {
    out << table.row_labels[i];
    for (std::size_t j = 0; j < table.cells.cols(); ++j) out << '\t' << table.cells.at(i, j);
    out << '\t' << table.row_margins[i] << '\n';
  }
  out << kTotalLabel;
  for (std::size_t j = 0; j < table.cells.cols(); ++j) out << '\t' << table.col_margins[j];
  out << '\t' << table.grand_total << '\n';
}

ContingencyTable read_table(std::istream& in) {
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(split_tabs(line));
  }
  if (rows.size() < 2) throw MalformedTableFile("table needs a header and a margin row");

  const std::vector<std::string>& header = rows.front();
  if (header.size() < 2 || header.back() != kTotalLabel)
    throw MalformedTableFile("header must end with the margin column");
  const std::size_t n_cols = header.size() - 2;

  const std::vector<std::string>& margin_row = rows.back();
  if (margin_row.empty() || margin_row.front() != kTotalLabel)
    throw MalformedTableFile("last row must be the margin row");

  const std::size_t n_rows = rows.size() - 2;
  ContingencyTable t;
  t.col_labels.assign(header.begin() + 1, header.end() - 1);
  t.cells = Grid(n_rows, n_cols);
  std::vector<std::uint64_t> stated_row_margins(n_rows);

  for (std::size_t i = 0; i < n_rows; ++i) {
    const std::vector<std::string>& r = rows[i + 1];
    if (r.size() != n_cols + 2)
      throw MalformedTableFile("ragged row: " + (r.empty() ? "" : r.front()));
    if (r.front() == kTotalLabel)
      throw MalformedTableFile("margin row before the end of the table");
    t.row_labels.push_back(r.front());
    for (std::size_t j = 0; j < n_cols; ++j) t.cells.at(i, j) = parse_cell(r[j + 1]);
    stated_row_margins[i] = parse_cell(r.back());
  }

  if (margin_row.size() != n_cols + 2)
    throw MalformedTableFile("ragged margin row");
  std::vector<std::uint64_t> stated_col_margins(n_cols);
  for (std::size_t j = 0; j < n_cols; ++j)
    stated_col_margins[j] = parse_cell(margin_row[j + 1]);
  const std::uint64_t stated_total = parse_cell(margin_row.back());

  t.recompute_margins();
  if (t.row_margins != stated_row_margins || t.col_margins != stated_col_margins ||
      t.grand_total != stated_total)
    throw MalformedTableFile("stated margins do not match cell sums");
  return t;
}

void write_table_file(const std::string& path, const ContingencyTable& table) {
  std::ofstream out(path);
  if (!out) throw UnreadableFile("cannot write " + path);
  write_table(out, table);
}

ContingencyTable read_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UnreadableFile("cannot read " + path);
  return read_table(in);
}

}  // namespace xshop
