#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace xshop {

// Dense row-major matrix of non-negative counts.
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), cells_(rows * cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint64_t& at(std::size_t i, std::size_t j) { return cells_[i * cols_ + j]; }
  std::uint64_t at(std::size_t i, std::size_t j) const { return cells_[i * cols_ + j]; }

  std::uint64_t total() const;
  std::vector<std::uint64_t> row_sums() const;
  std::vector<std::uint64_t> col_sums() const;

  bool operator==(const Grid&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint64_t> cells_;
};

// Labeled contingency table with materialized margins.
struct ContingencyTable {
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  Grid cells;
  std::vector<std::uint64_t> row_margins;
  std::vector<std::uint64_t> col_margins;
  std::uint64_t grand_total = 0;

  void recompute_margins();

  bool operator==(const ContingencyTable&) const = default;
};

ContingencyTable make_table(std::vector<std::string> row_labels,
                            std::vector<std::string> col_labels, Grid cells);

// Tab-separated, human-diffable: header row of column labels, one line per
// row starting with its label, a trailing "Total" margin column and row,
// grand total bottom-right.
void write_table(std::ostream& out, const ContingencyTable& table);

// Inverse of write_table; re-derives margins and rejects any mismatch.
ContingencyTable read_table(std::istream& in);

void write_table_file(const std::string& path, const ContingencyTable& table);
ContingencyTable read_table_file(const std::string& path);

}  // namespace xshop
