#include "xshop/cocluster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>

#include "xshop/errors.hpp"
#include "xshop/rng.hpp"

namespace xshop {

void Partition::canonicalize() {
  std::vector<int> remap(k, -1);
  int next = 0;
  for (int a : assignment)
    if (remap[a] < 0) remap[a] = next++;
  for (int c = 0; c < k; ++c)
    if (remap[c] < 0) remap[c] = next++;
  for (int& a : assignment) a = remap[a];
}

std::vector<std::vector<std::size_t>> Partition::members() const {
  std::vector<std::vector<std::size_t>> out(k);
  for (std::size_t i = 0; i < assignment.size(); ++i)
    out[assignment[i]].push_back(i);
  return out;
}

double chi2_of(const Grid& table) {
  const std::uint64_t total = table.total();
  if (total == 0) throw EmptyTable("chi2 of an all-zero table");
  const std::vector<std::uint64_t> rm = table.row_sums();
  const std::vector<std::uint64_t> cm = table.col_sums();
  const double n = static_cast<double>(total);
  double chi2 = 0.0;
  for (std::size_t i = 0; i < table.rows(); ++i) {
    if (rm[i] == 0) continue;
    for (std::size_t j = 0; j < table.cols(); ++j) {
      if (cm[j] == 0) continue;
      const double expected = static_cast<double>(rm[i]) * static_cast<double>(cm[j]) / n;
      const double d = static_cast<double>(table.at(i, j)) - expected;
      chi2 += d * d / expected;
    }
  }
  return chi2;
}

double chi2_of(const ContingencyTable& table) { return chi2_of(table.cells); }

Grid collapse(const Grid& table, const Partition& rows, const Partition& cols) {
  if (rows.assignment.size() != table.rows() ||
      cols.assignment.size() != table.cols())
    throw DimensionMismatch("partition lengths do not match table dimensions");
  for (int a : rows.assignment)
    if (a < 0 || a >= rows.k) throw DimensionMismatch("row cluster index out of range");
  for (int a : cols.assignment)
    if (a < 0 || a >= cols.k) throw DimensionMismatch("col cluster index out of range");
  Grid out(rows.k, cols.k);
  for (std::size_t i = 0; i < table.rows(); ++i)
    for (std::size_t j = 0; j < table.cols(); ++j)
      out.at(rows.assignment[i], cols.assignment[j]) += table.at(i, j);
  return out;
}

Grid collapse(const ContingencyTable& table, const Partition& rows,
              const Partition& cols) {
  return collapse(table.cells, rows, cols);
}

namespace {

constexpr double kRelTol = 1e-9;

bool strictly_better(double candidate, double current) {
  return candidate > current + kRelTol * std::max(1.0, std::abs(current));
}

// One restart of the alternating sweeps. Works on phi = sum m_kl^2/(m_k m_l),
// a monotone transform of chi2 (chi2 = N*(phi - 1)); all block sums stay in
// exact integer arithmetic, only the objective is floating point.
class Engine {
 public:
  Engine(const Grid& n, int k, int l)
      : n_(n), k_(k), l_(l), row_margin_(n.row_sums()), col_margin_(n.col_sums()) {}

  void run(std::vector<int>& z, std::vector<int>& w, const FitConfig& config,
           std::size_t& iterations, std::vector<double>& trace) {
    z_ = &z;
    w_ = &w;
    if (config.empty_cluster_policy == EmptyClusterPolicy::ReseedFarthest) {
      reseed_empty(*z_, *w_, k_, true);
      reseed_empty(*w_, *z_, l_, false);
    }
    double last = current_chi2();
    trace.push_back(last);
    iterations = 0;
    for (int it = 0; it < config.max_iters; ++it) {
      std::size_t moves = sweep(*z_, *w_, k_, l_, true);
      last = record_ascent(trace, last);
      moves += sweep(*w_, *z_, l_, k_, false);
      last = record_ascent(trace, last);
      ++iterations;
      if (moves == 0) break;
    }
  }

  Grid collapsed() const {
    Partition rp{*z_, k_}, cp{*w_, l_};
    return collapse(n_, rp, cp);
  }

 private:
  double current_chi2() const { return chi2_of(collapsed()); }

  double record_ascent(std::vector<double>& trace, double last) const {
    const double now = current_chi2();
    if (now < last - kRelTol * std::max(1.0, last))
      throw std::logic_error("chi2 decreased during a sweep");
    trace.push_back(now);
    return now;
  }

  // cell of the source table oriented so that `obj` indexes the swept side
  std::uint64_t cell(bool row_side, std::size_t obj, std::size_t other) const {
    return row_side ? n_.at(obj, other) : n_.at(other, obj);
  }

  // Relocation sweep over one side. `assign` is the swept partition (K
  // clusters), `fixed` the other side's (L clusters). Aggregates are rebuilt
  // fresh here, so each sweep starts from exact integers.
  std::size_t sweep(std::vector<int>& assign, const std::vector<int>& fixed, int K,
                    int L, bool row_side) {
    const std::size_t n_obj = assign.size();
    const std::size_t n_other = fixed.size();
    const std::vector<std::uint64_t>& obj_margin = row_side ? row_margin_ : col_margin_;
    const std::vector<std::uint64_t>& other_margin = row_side ? col_margin_ : row_margin_;

    // profile of each object over the fixed side's clusters
    std::vector<std::uint64_t> profile(n_obj * L, 0);
    for (std::size_t o = 0; o < n_obj; ++o)
      for (std::size_t j = 0; j < n_other; ++j)
        profile[o * L + fixed[j]] += cell(row_side, o, j);

    std::vector<std::uint64_t> m(static_cast<std::size_t>(K) * L, 0);
    std::vector<std::uint64_t> mk(K, 0), ml(L, 0);
    for (std::size_t o = 0; o < n_obj; ++o) {
      mk[assign[o]] += obj_margin[o];
      for (int l = 0; l < L; ++l) m[assign[o] * L + l] += profile[o * L + l];
    }
    for (std::size_t j = 0; j < n_other; ++j) ml[fixed[j]] += other_margin[j];

    // s[k] = sum_l m_kl^2 / m_.l ; phi = sum_k s[k]/m_k.
    std::vector<double> s(K, 0.0);
    auto cluster_sum = [&](int c) {
      double acc = 0.0;
      for (int l = 0; l < L; ++l)
        if (ml[l] > 0) {
          const double v = static_cast<double>(m[c * L + l]);
          acc += v * v / static_cast<double>(ml[l]);
        }
      return acc;
    };
    for (int c = 0; c < K; ++c) s[c] = cluster_sum(c);
    auto phi_of = [&] {
      double acc = 0.0;
      for (int c = 0; c < K; ++c)
        if (mk[c] > 0) acc += s[c] / static_cast<double>(mk[c]);
      return acc;
    };
    double phi = phi_of();

    std::size_t moves = 0;
    for (std::size_t o = 0; o < n_obj; ++o) {
      const int a = assign[o];
      // contribution of cluster a with object o removed
      double removed = 0.0;
      for (int l = 0; l < L; ++l)
        if (ml[l] > 0) {
          const double v = static_cast<double>(m[a * L + l] - profile[o * L + l]);
          removed += v * v / static_cast<double>(ml[l]);
        }
      const std::uint64_t mka = mk[a] - obj_margin[o];
      const double base = phi - (mk[a] > 0 ? s[a] / static_cast<double>(mk[a]) : 0.0) +
                          (mka > 0 ? removed / static_cast<double>(mka) : 0.0);

      int best = -1;
      double best_phi = phi;
      for (int b = 0; b < K; ++b) {
        if (b == a) continue;
        double added = 0.0;
        for (int l = 0; l < L; ++l)
          if (ml[l] > 0) {
            const double v = static_cast<double>(m[b * L + l] + profile[o * L + l]);
            added += v * v / static_cast<double>(ml[l]);
          }
        const std::uint64_t mkb = mk[b] + obj_margin[o];
        const double cand = base -
                            (mk[b] > 0 ? s[b] / static_cast<double>(mk[b]) : 0.0) +
                            (mkb > 0 ? added / static_cast<double>(mkb) : 0.0);
        if (strictly_better(cand, best_phi)) {
          best_phi = cand;
          best = b;
        }
      }
      if (best < 0) continue;
      for (int l = 0; l < L; ++l) {
        m[a * L + l] -= profile[o * L + l];
        m[best * L + l] += profile[o * L + l];
      }
      mk[a] -= obj_margin[o];
      mk[best] += obj_margin[o];
      assign[o] = best;
      s[a] = cluster_sum(a);
      s[best] = cluster_sum(best);
      phi = phi_of();
      ++moves;
    }
    return moves;
  }

  // Fills every empty cluster on one side by splitting the most populous
  // cluster at the member whose relocation keeps chi2 highest. Splitting is
  // a refinement, so this never lowers the objective.
  void reseed_empty(std::vector<int>& assign, const std::vector<int>& fixed, int K,
                    bool row_side) {
    const int L = row_side ? l_ : k_;
    while (true) {
      std::vector<std::size_t> count(K, 0);
      for (int a : assign) ++count[a];
      int empty = -1;
      for (int c = 0; c < K; ++c)
        if (count[c] == 0) {
          empty = c;
          break;
        }
      if (empty < 0) return;
      int donor = 0;
      for (int c = 1; c < K; ++c)
        if (count[c] > count[donor]) donor = c;
      if (count[donor] < 2) return;  // cannot split further

      const std::size_t n_obj = assign.size();
      const std::size_t n_other = fixed.size();
      const std::vector<std::uint64_t>& obj_margin =
          row_side ? row_margin_ : col_margin_;
      const std::vector<std::uint64_t>& other_margin =
          row_side ? col_margin_ : row_margin_;
      std::vector<std::uint64_t> profile(n_obj * L, 0);
      for (std::size_t o = 0; o < n_obj; ++o)
        for (std::size_t j = 0; j < n_other; ++j)
          profile[o * L + fixed[j]] += cell(row_side, o, j);
      std::vector<std::uint64_t> m(static_cast<std::size_t>(K) * L, 0);
      std::vector<std::uint64_t> mk(K, 0), ml(L, 0);
      for (std::size_t o = 0; o < n_obj; ++o) {
        mk[assign[o]] += obj_margin[o];
        for (int l = 0; l < L; ++l) m[assign[o] * L + l] += profile[o * L + l];
      }
      for (std::size_t j = 0; j < n_other; ++j) ml[fixed[j]] += other_margin[j];

      double donor_sum = 0.0;
      for (int l = 0; l < L; ++l)
        if (ml[l] > 0) {
          const double v = static_cast<double>(m[donor * L + l]);
          donor_sum += v * v / static_cast<double>(ml[l]);
        }

      std::size_t best_obj = 0;
      double best_delta = -std::numeric_limits<double>::infinity();
      for (std::size_t o = 0; o < n_obj; ++o) {
        if (assign[o] != donor) continue;
        double removed = 0.0, added = 0.0;
        for (int l = 0; l < L; ++l)
          if (ml[l] > 0) {
            const double r = static_cast<double>(m[donor * L + l] - profile[o * L + l]);
            const double e = static_cast<double>(profile[o * L + l]);
            removed += r * r / static_cast<double>(ml[l]);
            added += e * e / static_cast<double>(ml[l]);
          }
        const std::uint64_t mka = mk[donor] - obj_margin[o];
        const double delta =
            (mka > 0 ? removed / static_cast<double>(mka) : 0.0) +
            (obj_margin[o] > 0 ? added / static_cast<double>(obj_margin[o]) : 0.0) -
            (mk[donor] > 0 ? donor_sum / static_cast<double>(mk[donor]) : 0.0);
        if (delta > best_delta) {
          best_delta = delta;
          best_obj = o;
        }
      }
      assign[best_obj] = empty;
    }
  }

  const Grid& n_;
  int k_, l_;
  std::vector<std::uint64_t> row_margin_, col_margin_;
  std::vector<int>* z_ = nullptr;
  std::vector<int>* w_ = nullptr;
};

void validate_fit_inputs(const ContingencyTable& table, int k, int l) {
  const std::size_t rows = table.cells.rows(), cols = table.cells.cols();
  if (k < 1 || l < 1 || static_cast<std::size_t>(k) > rows ||
      static_cast<std::size_t>(l) > cols)
    throw InfeasiblePartition("need 1 <= k <= rows and 1 <= l <= cols");
  std::size_t live_rows = 0, live_cols = 0;
  for (std::uint64_t v : table.cells.row_sums()) live_rows += v > 0;
  for (std::uint64_t v : table.cells.col_sums()) live_cols += v > 0;
  if (live_rows < static_cast<std::size_t>(k) || live_cols < static_cast<std::size_t>(l))
    throw InfeasiblePartition("table needs at least k rows and l columns with "
                              "nonzero margins");
}

BlockModel run_restart(const ContingencyTable& table, const FitConfig& config,
                       int restart) {
  Rng rng(substream_seed(config.seed, "cocluster", static_cast<std::uint64_t>(restart)));
  std::vector<int> z(table.cells.rows()), w(table.cells.cols());
  for (int& a : z) a = static_cast<int>(rng.below(config.k));
  for (int& a : w) a = static_cast<int>(rng.below(config.l));

  BlockModel model;
  Engine engine(table.cells, config.k, config.l);
  engine.run(z, w, config, model.iterations, model.chi2_trace);

  model.row_partition = Partition{std::move(z), config.k};
  model.col_partition = Partition{std::move(w), config.l};
  model.row_partition.canonicalize();
  model.col_partition.canonicalize();
  model.collapsed = collapse(table.cells, model.row_partition, model.col_partition);
  model.chi2 = chi2_of(model.collapsed);
  return model;
}

BlockModel fit_impl(const ContingencyTable& table, const FitConfig& config,
                    bool parallel) {
  validate_fit_inputs(table, config.k, config.l);
  if (config.restarts < 1 || config.max_iters < 1)
    throw InfeasiblePartition("restarts and max_iters must be positive");

  std::vector<BlockModel> results(config.restarts);
  std::vector<std::exception_ptr> errors(config.restarts);
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < config.restarts; ++r) {
      try {
        results[r] = run_restart(table, config, r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
    for (const std::exception_ptr& e : errors)
      if (e) std::rethrow_exception(e);
  } else {
    for (int r = 0; r < config.restarts; ++r) results[r] = run_restart(table, config, r);
  }

  // best chi2 wins; strict comparison keeps the lowest restart index on ties
  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r)
    if (results[r].chi2 > results[best].chi2) best = r;
  BlockModel winner = std::move(results[best]);
  winner.restarts_used = static_cast<std::size_t>(config.restarts);
  return winner;
}

}  // namespace

BlockModel fit(const ContingencyTable& table, const FitConfig& config) {
  return fit_impl(table, config, true);
}

namespace reference {

BlockModel fit_serial(const ContingencyTable& table, const FitConfig& config) {
  return fit_impl(table, config, false);
}

}  // namespace reference

double partition_count(std::size_t n, int k) {
  if (n == 0) return 1.0;
  const int cap = std::min<std::size_t>(n, static_cast<std::size_t>(k));
  // Stirling numbers of the second kind, summed over 1..k classes
  std::vector<double> prev(cap + 1, 0.0), cur(cap + 1, 0.0);
  prev[0] = 1.0;
  for (std::size_t i = 1; i <= n; ++i) {
    for (int j = 1; j <= cap; ++j)
      cur[j] = j * prev[j] + prev[j - 1];
    cur[0] = 0.0;
    std::swap(prev, cur);
  }
  double total = 0.0;
  for (int j = 1; j <= cap; ++j) total += prev[j];
  return total;
}

namespace {

// restricted growth strings: canonical set partitions into <= kmax classes
void for_each_partition(std::size_t n, int kmax,
                        const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> a(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int cur_max) {
    if (pos == n) {
      fn(a);
      return;
    }
    const int hi = std::min(cur_max + 1, kmax - 1);
    for (int v = 0; v <= hi; ++v) {
      a[pos] = v;
      rec(pos + 1, std::max(cur_max, v));
    }
  };
  if (n == 0)
    fn(a);
  else
    rec(1, 0);
}

}  // namespace

BlockModel brute_force(const ContingencyTable& table, int k, int l) {
  validate_fit_inputs(table, k, l);
  const std::size_t rows = table.cells.rows(), cols = table.cells.cols();
  const double space = partition_count(rows, k) * partition_count(cols, l);
  if (space > 1e7)
    throw SearchSpaceTooLarge("about " + std::to_string(space) +
                              " partition pairs; limit is 1e7");

  double best_chi2 = -1.0;
  std::vector<int> best_z, best_w;
  std::vector<std::uint64_t> inter(static_cast<std::size_t>(k) * cols);
  std::vector<std::uint64_t> m(static_cast<std::size_t>(k) * l);

  for_each_partition(rows, k, [&](const std::vector<int>& z) {
    std::fill(inter.begin(), inter.end(), 0);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        inter[z[i] * cols + j] += table.cells.at(i, j);

    for_each_partition(cols, l, [&](const std::vector<int>& w) {
      std::fill(m.begin(), m.end(), 0);
      for (std::size_t j = 0; j < cols; ++j)
        for (int kk = 0; kk < k; ++kk)
          m[kk * static_cast<std::size_t>(l) + w[j]] += inter[kk * cols + j];
      Grid g(k, l);
      for (int kk = 0; kk < k; ++kk)
        for (int ll = 0; ll < l; ++ll)
          g.at(kk, ll) = m[kk * static_cast<std::size_t>(l) + ll];
      const double chi2 = chi2_of(g);
      if (chi2 > best_chi2) {
        best_chi2 = chi2;
        best_z = z;
        best_w = w;
      }
    });
  });

  BlockModel model;
  model.row_partition = Partition{std::move(best_z), k};
  model.col_partition = Partition{std::move(best_w), l};
  model.collapsed = collapse(table.cells, model.row_partition, model.col_partition);
  model.chi2 = chi2_of(model.collapsed);
  return model;
}

namespace {

std::vector<std::string> class_labels(const char* stem, int n) {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back(std::string(stem) + "_" + std::to_string(i));
  return out;
}

}  // namespace

BlockReport block_report(const BlockModel& model, const ContingencyTable& table) {
  const Grid recomputed = collapse(table, model.row_partition, model.col_partition);
  if (!(recomputed == model.collapsed))
    throw DimensionMismatch("model collapsed matrix does not match the table");

  const int K = model.row_partition.k, L = model.col_partition.k;
  BlockReport report;
  report.chi2 = model.chi2;
  report.confusion =
      make_table(class_labels("Period", K), class_labels("Product", L), recomputed);

  report.row_share.assign(K, std::vector<double>(L, 0.0));
  report.col_share.assign(K, std::vector<double>(L, 0.0));
  report.col_total_share.assign(L, 0.0);
  const double n = static_cast<double>(report.confusion.grand_total);
  for (int kk = 0; kk < K; ++kk)
    for (int ll = 0; ll < L; ++ll) {
      const double cellv = static_cast<double>(recomputed.at(kk, ll));
      if (report.confusion.row_margins[kk] > 0)
        report.row_share[kk][ll] =
            cellv / static_cast<double>(report.confusion.row_margins[kk]);
      if (report.confusion.col_margins[ll] > 0)
        report.col_share[kk][ll] =
            cellv / static_cast<double>(report.confusion.col_margins[ll]);
    }
  for (int ll = 0; ll < L; ++ll)
    if (n > 0)
      report.col_total_share[ll] =
          static_cast<double>(report.confusion.col_margins[ll]) / n;

  auto collect = [](const Partition& p, const std::vector<std::string>& labels) {
    std::vector<std::vector<std::string>> out(p.k);
    for (std::size_t i = 0; i < p.assignment.size(); ++i)
      out[p.assignment[i]].push_back(labels[i]);
    return out;
  };
  report.row_members = collect(model.row_partition, table.row_labels);
  report.col_members = collect(model.col_partition, table.col_labels);
  return report;
}

namespace {

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", fraction * 100.0);
  return buf;
}

void render_share_matrix(std::ostream& out, const BlockReport& report,
                         const std::vector<std::vector<double>>& shares) {
  for (const std::string& l : report.confusion.col_labels) out << '\t' << l;
  out << '\n';
  for (std::size_t kk = 0; kk < shares.size(); ++kk) {
    out << report.confusion.row_labels[kk];
    for (double v : shares[kk]) out << '\t' << percent(v);
    out << '\n';
  }
}

}  // namespace

void render_report(std::ostream& out, const BlockReport& report) {
  const auto& c = report.confusion;
  char chi2buf[64];
  std::snprintf(chi2buf, sizeof(chi2buf), "%.6f", report.chi2);
  out << "Confusion table (" << c.cells.rows() << " x " << c.cells.cols()
      << "), N=" << c.grand_total << ", chi2=" << chi2buf << "\n";
  write_table(out, c);
  out << "\nRow shares m_kl / m_k. (%)\n";
  render_share_matrix(out, report, report.row_share);
  out << "\nColumn shares m_kl / m_.l (%)\n";
  render_share_matrix(out, report, report.col_share);
  out << "\nColumn class share of all requests (%)\n";
  for (std::size_t ll = 0; ll < report.col_total_share.size(); ++ll)
    out << c.col_labels[ll] << '\t' << percent(report.col_total_share[ll]) << '\n';
  out << "\nRow class members\n";
  for (std::size_t kk = 0; kk < report.row_members.size(); ++kk) {
    out << c.row_labels[kk] << ':';
    for (const std::string& l : report.row_members[kk]) out << ' ' << l;
    out << '\n';
  }
  out << "\nColumn class members\n";
  for (std::size_t ll = 0; ll < report.col_members.size(); ++ll) {
    out << c.col_labels[ll] << ':';
    for (const std::string& l : report.col_members[ll]) out << ' ' << l;
    out << '\n';
  }
}

void write_model(std::ostream& out, const BlockModel& model,
                 const ContingencyTable& table) {
  char chi2buf[64];
  std::snprintf(chi2buf, sizeof(chi2buf), "%.17g", model.chi2);
  out << "chi2\t" << chi2buf << '\n';
  out << "k\t" << model.row_partition.k << '\n';
  out << "l\t" << model.col_partition.k << '\n';
  out << "iterations\t" << model.iterations << '\n';
  out << "restarts\t" << model.restarts_used << '\n';
  out << "[rows]\n";
  for (std::size_t i = 0; i < table.row_labels.size(); ++i)
    out << table.row_labels[i] << '\t' << model.row_partition.assignment[i] << '\n';
  out << "[cols]\n";
  for (std::size_t j = 0; j < table.col_labels.size(); ++j)
    out << table.col_labels[j] << '\t' << model.col_partition.assignment[j] << '\n';
  out << "[collapsed]\n";
  write_table(out, make_table(class_labels("Period", model.row_partition.k),
                              class_labels("Product", model.col_partition.k),
                              model.collapsed));
}

ModelFile read_model(std::istream& in) {
  ModelFile mf;
  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };

  auto scalar = [&](const char* key) -> std::string {
    if (!next_line()) throw MalformedTableFile("model file truncated");
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || line.substr(0, tab) != key)
      throw MalformedTableFile("model file: expected '" + std::string(key) + "'");
    return line.substr(tab + 1);
  };
  auto to_u64 = [](const std::string& s) -> std::uint64_t {
    if (s.empty()) throw MalformedTableFile("empty number in model file");
    for (char c : s)
      if (c < '0' || c > '9') throw MalformedTableFile("bad number: " + s);
    return std::strtoull(s.c_str(), nullptr, 10);
  };

  mf.model.chi2 = std::strtod(scalar("chi2").c_str(), nullptr);
  mf.model.row_partition.k = static_cast<int>(to_u64(scalar("k")));
  mf.model.col_partition.k = static_cast<int>(to_u64(scalar("l")));
  mf.model.iterations = to_u64(scalar("iterations"));
  mf.model.restarts_used = to_u64(scalar("restarts"));

  if (!next_line() || line != "[rows]")
    throw MalformedTableFile("model file: expected [rows]");
  while (next_line() && line != "[cols]") {
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) throw MalformedTableFile("bad row assignment line");
    mf.row_labels.push_back(line.substr(0, tab));
    mf.model.row_partition.assignment.push_back(
        static_cast<int>(to_u64(line.substr(tab + 1))));
  }
  if (line != "[cols]") throw MalformedTableFile("model file: expected [cols]");
  while (next_line() && line != "[collapsed]") {
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) throw MalformedTableFile("bad col assignment line");
    mf.col_labels.push_back(line.substr(0, tab));
    mf.model.col_partition.assignment.push_back(
        static_cast<int>(to_u64(line.substr(tab + 1))));
  }
  if (line != "[collapsed]") throw MalformedTableFile("model file: expected [collapsed]");
  const ContingencyTable collapsed = read_table(in);
  mf.model.collapsed = collapsed.cells;

  for (int a : mf.model.row_partition.assignment)
    if (a < 0 || a >= mf.model.row_partition.k)
      throw MalformedTableFile("row cluster index out of range");
  for (int a : mf.model.col_partition.assignment)
    if (a < 0 || a >= mf.model.col_partition.k)
      throw MalformedTableFile("col cluster index out of range");
  return mf;
}

}  // namespace xshop
