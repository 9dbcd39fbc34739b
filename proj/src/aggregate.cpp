#include "xshop/aggregate.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>

#include "xshop/errors.hpp"
#include "xshop/time.hpp"

namespace xshop {

std::string TimeSlice::label() const {
  return std::string(kWeekdayNames[weekday]) + "_" + std::to_string(hour);
}

TimeSlice TimeSlice::of_local_time(std::int64_t unix_seconds, int offset_min) {
  TimeSlice s;
  s.weekday = local_weekday(unix_seconds, offset_min);
  s.hour = unix_to_civil(unix_seconds, offset_min).hour;
  return s;
}

TimeSlice TimeSlice::of_index(int index) {
  return TimeSlice{index / 24, index % 24};
}

std::uint64_t VisitMatrix::total() const {
  std::uint64_t n = 0;
  for (const auto& row : counts)
    for (std::uint64_t c : row) n += c;
  return n;
}

ContingencyTable VisitMatrix::as_table() const {
  Grid g(7, 24);
  std::vector<std::string> rows, cols;
  for (int d = 0; d < 7; ++d) {
    rows.push_back(kWeekdayNames[d]);
    for (int h = 0; h < 24; ++h) g.at(d, h) = counts[d][h];
  }
  for (int h = 0; h < 24; ++h) cols.push_back(std::to_string(h));
  return make_table(std::move(rows), std::move(cols), std::move(g));
}

VisitMatrix visit_matrix(const std::vector<VisitGroup>& groups, VisitMatrixKind kind,
                         VisitAnchor anchor) {
  VisitMatrix m;
  m.kind = kind;
  m.anchor_rule = anchor;
  for (const VisitGroup& g : groups) {
    if (kind == VisitMatrixKind::MultiShopVisits && !g.multi_shop()) continue;
    if (anchor == VisitAnchor::FirstRequest) {
      const NormalizedRequest& r = g.requests.front();
      const TimeSlice s = TimeSlice::of_local_time(r.timestamp, r.utc_offset_minutes);
      ++m.counts[s.weekday][s.hour];
    } else {
      for (const NormalizedRequest& r : g.requests) {
        const TimeSlice s = TimeSlice::of_local_time(r.timestamp, r.utc_offset_minutes);
        ++m.counts[s.weekday][s.hour];
      }
    }
  }
  return m;
}

VisitMatrix visit_matrix(const std::vector<VisitSummary>& visits, VisitMatrixKind kind) {
  VisitMatrix m;
  m.kind = kind;
  for (const VisitSummary& v : visits) {
    if (kind == VisitMatrixKind::MultiShopVisits && v.shops.size() < 2) continue;
    const TimeSlice s =
        TimeSlice::of_local_time(v.first_timestamp, v.utc_offset_minutes);
    ++m.counts[s.weekday][s.hour];
  }
  return m;
}

namespace {

const std::map<std::int64_t, std::string>* catalog_table_for(const std::string& variable,
                                                             const VariableMap& vars,
                                                             const Catalog& catalog) {
  if (variable == vars.category) return &catalog.kategorie;
  if (variable == vars.product) return &catalog.list;
  if (variable == vars.brand) return &catalog.znacka;
  if (variable == vars.theme) return &catalog.tema;
  return nullptr;
}

bool numeric_value(const std::string& s, std::int64_t& out) {
  if (s.empty() || s.size() > 18) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  out = std::strtoll(s.c_str(), nullptr, 10);
  return true;
}

// numeric values first in numeric order, then the rest lexicographically
void sort_values(std::vector<std::string>& values) {
  std::sort(values.begin(), values.end(),
            [](const std::string& a, const std::string& b) {
              std::int64_t na = 0, nb = 0;
              const bool ia = numeric_value(a, na), ib = numeric_value(b, nb);
              if (ia != ib) return ia;
              if (ia && ib) return na != nb ? na < nb : a < b;
              return a < b;
            });
  values.erase(std::unique(values.begin(), values.end()), values.end());
}

std::vector<std::string> all_slice_labels() {
  std::vector<std::string> labels;
  labels.reserve(kTimeSlices);
  for (int i = 0; i < kTimeSlices; ++i) labels.push_back(TimeSlice::of_index(i).label());
  return labels;
}

struct Extraction {
  // slice index and variable value per matching request; slice < 0 when skipped
  std::vector<int> slice;
  std::vector<std::string> value;
};

void extract_one(const NormalizedRequest& r, const CrosstabFilter& filter,
                 const VariableMap& vars, int& slice_out, std::string& value_out,
                 bool& missing_variable) {
  slice_out = -1;
  missing_variable = false;
  if (r.shop_id != filter.shop_id) return;
  const std::string& url = r.url;
  std::size_t path_start = url.find('/', 7);  // skip "http://host"
  const std::string path_and_query =
      path_start == std::string::npos ? "/" : url.substr(path_start);
  const PageInfo info = classify(path_and_query, vars);
  if (info.page_type != filter.page_type) return;
  auto it = info.variables.find(filter.variable);
  if (it == info.variables.end()) {
    missing_variable = true;
    return;
  }
  value_out = it->second;
  slice_out = TimeSlice::of_local_time(r.timestamp, r.utc_offset_minutes).index();
}

ContingencyTable tabulate(const Extraction& ex, const CrosstabFilter& filter,
                          const Catalog& catalog, const VariableMap& vars,
                          std::size_t matched) {
  if (matched == 0) throw EmptySelection("no requests match the crosstab filter");

  const auto* table = catalog_table_for(filter.variable, vars, catalog);
  std::vector<std::string> values;
  values.reserve(matched);
  for (std::size_t i = 0; i < ex.slice.size(); ++i)
    if (ex.slice[i] >= 0) values.push_back(ex.value[i]);
  if (filter.all_catalog_columns && table)
    for (const auto& [id, name] : *table) values.push_back(std::to_string(id));
  sort_values(values);

  std::map<std::string, std::size_t> col_of;
  for (std::size_t j = 0; j < values.size(); ++j) col_of[values[j]] = j;

  Grid g(kTimeSlices, values.size());
  for (std::size_t i = 0; i < ex.slice.size(); ++i)
    if (ex.slice[i] >= 0) ++g.at(ex.slice[i], col_of[ex.value[i]]);

  std::vector<std::string> col_labels;
  col_labels.reserve(values.size());
  for (const std::string& v : values) {
    std::int64_t id = 0;
    if (table && numeric_value(v, id)) {
      auto it = table->find(id);
      if (it != table->end()) {
        col_labels.push_back(it->second + " (" + v + ")");
        continue;
      }
    }
    col_labels.push_back(v);
  }
  return make_table(all_slice_labels(), std::move(col_labels), std::move(g));
}

}  // namespace

ContingencyTable build_crosstab(const std::vector<NormalizedRequest>& stream,
                                const CrosstabFilter& filter, const Catalog& catalog,
                                CrosstabStats& stats, const VariableMap& vars) {
  Extraction ex;
  ex.slice.assign(stream.size(), -1);
  ex.value.assign(stream.size(), std::string());
  std::size_t matched = 0, skipped = 0;
  // classification is pure; the tally below is a commutative fold
#pragma omp parallel for schedule(static) reduction(+ : matched, skipped)
  for (std::size_t i = 0; i < stream.size(); ++i) {
    bool missing = false;
    extract_one(stream[i], filter, vars, ex.slice[i], ex.value[i], missing);
    if (ex.slice[i] >= 0) ++matched;
    if (missing) ++skipped;
  }
  stats.matched += matched;
  stats.skipped_missing_variable += skipped;
  return tabulate(ex, filter, catalog, vars, matched);
}

namespace reference {

ContingencyTable build_crosstab_serial(const std::vector<NormalizedRequest>& stream,
                                       const CrosstabFilter& filter,
                                       const Catalog& catalog, CrosstabStats& stats,
                                       const VariableMap& vars) {
  Extraction ex;
  ex.slice.assign(stream.size(), -1);
  ex.value.assign(stream.size(), std::string());
  std::size_t matched = 0;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    bool missing = false;
    extract_one(stream[i], filter, vars, ex.slice[i], ex.value[i], missing);
    if (ex.slice[i] >= 0) ++matched;
    if (missing) ++stats.skipped_missing_variable;
  }
  stats.matched += matched;
  return tabulate(ex, filter, catalog, vars, matched);
}

}  // namespace reference

}  // namespace xshop
