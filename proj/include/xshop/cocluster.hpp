#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "xshop/table.hpp"

namespace xshop {

struct Partition {
  std::vector<int> assignment;  // object -> cluster, every index in [0, k)
  int k = 0;

  // renumber clusters by first appearance so runs compare structurally
  void canonicalize();
  std::vector<std::vector<std::size_t>> members() const;

  bool operator==(const Partition&) const = default;
};

struct BlockModel {
  Partition row_partition;
  Partition col_partition;
  Grid collapsed;  // k x l block sums, recomputable from the source table
  double chi2 = 0.0;
  std::size_t iterations = 0;     // double sweeps of the winning restart
  std::size_t restarts_used = 0;
  std::vector<double> chi2_trace;  // chi2 after each half sweep, ascending

  bool operator==(const BlockModel&) const = default;
};

enum class EmptyClusterPolicy { ReseedFarthest, AllowEmpty };

struct FitConfig {
  int k = 2;
  int l = 2;
  int restarts = 20;
  int max_iters = 200;  // per restart; convergence normally comes much earlier
  std::uint64_t seed = 1;
  EmptyClusterPolicy empty_cluster_policy = EmptyClusterPolicy::ReseedFarthest;
};

// Pearson chi-squared of a table: N * sum (p_kl - p_k p_l)^2 / (p_k p_l),
// skipping cells whose row or column margin is zero.
double chi2_of(const Grid& table);
double chi2_of(const ContingencyTable& table);

// Block sums under a partition pair; grand total is preserved.
Grid collapse(const Grid& table, const Partition& rows, const Partition& cols);
Grid collapse(const ContingencyTable& table, const Partition& rows,
              const Partition& cols);

// Alternating maximization of the collapsed-table chi-squared with seeded
// random restarts. The result is 1-swap locally optimal: no single row or
// column reassignment increases chi2 (beyond the 1e-9 relative tolerance).
BlockModel fit(const ContingencyTable& table, const FitConfig& config);

// Exhaustive search over all set partitions of rows into <= k and columns
// into <= l nonempty classes. Guards the search space at 10^7 pairs.
BlockModel brute_force(const ContingencyTable& table, int k, int l);

// number of set partitions of n objects into at most k nonempty classes
double partition_count(std::size_t n, int k);

struct BlockReport {
  ContingencyTable confusion;  // Period_k rows, Product_l columns, with margins
  std::vector<std::vector<double>> row_share;  // m_kl / m_k.
  std::vector<std::vector<double>> col_share;  // m_kl / m_.l
  std::vector<double> col_total_share;         // m_.l / N
  std::vector<std::vector<std::string>> row_members;  // source labels per class
  std::vector<std::vector<std::string>> col_members;
  double chi2 = 0.0;
};

BlockReport block_report(const BlockModel& model, const ContingencyTable& table);
void render_report(std::ostream& out, const BlockReport& report);

// Model file: scalar header lines, then label->cluster sections, then the
// collapsed table in the standard table format.
void write_model(std::ostream& out, const BlockModel& model,
                 const ContingencyTable& table);

struct ModelFile {
  BlockModel model;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
};

ModelFile read_model(std::istream& in);

namespace reference {

// Same alternating scheme run strictly serially; the OpenMP version must
// reproduce it bit for bit.
BlockModel fit_serial(const ContingencyTable& table, const FitConfig& config);

}  // namespace reference

}  // namespace xshop
