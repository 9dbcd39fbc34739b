#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <sstream>

#include "oracles.hpp"
#include "xshop/aggregate.hpp"
#include "xshop/errors.hpp"
#include "xshop/synth.hpp"
#include "xshop/time.hpp"

using namespace xshop;

namespace {

const char* kTable5Path = "tests/fixtures/table5.tsv";

NormalizedRequest product_request(std::int64_t ts, int shop, const std::string& page) {
  NormalizedRequest r;
  r.timestamp = ts;
  r.utc_offset_minutes = 60;
  r.ip = "1.1.1.1";
  r.session_id = "s";
  r.url = "http://www.shop4.cz" + page;
  r.shop_id = shop;
  return r;
}

}  // namespace

TEST_CASE("time slices map local datetimes to the 168 periods") {
  CHECK(TimeSlice{0, 0}.label() == "Monday_0");
  CHECK(TimeSlice{6, 23}.label() == "Sunday_23");
  CHECK(TimeSlice{6, 23}.index() == 167);
  CHECK(TimeSlice::of_index(33) == TimeSlice{1, 9});
  // 1074585663 is Tuesday 09:01 local at +01:00
  CHECK(TimeSlice::of_local_time(1074585663, 60) == TimeSlice{1, 9});
  // the same instant in UTC is still 08:xx, one slice earlier
  CHECK(TimeSlice::of_local_time(1074585663, 0) == TimeSlice{1, 8});
}

TEST_CASE("the committed confusion-table fixture reproduces the paper margins") {
  const ContingencyTable t = read_table_file(kTable5Path);
  CHECK(t.row_margins == std::vector<std::uint64_t>{15951, 67253, 151173, 132028,
                                                    59664, 19479, 45335});
  CHECK(t.col_margins ==
        std::vector<std::uint64_t>{96319, 176839, 114012, 18798, 84915});
  CHECK(t.grand_total == 490883);
  CHECK(t.row_labels.front() == "Period_1");
  CHECK(t.col_labels.back() == "Product 5");
}

TEST_CASE("table files round trip") {
  SUBCASE("the fixture") {
    const ContingencyTable t = read_table_file(kTable5Path);
    std::stringstream buffer;
    write_table(buffer, t);
    CHECK(read_table(buffer) == t);
  }
  SUBCASE("a degenerate 1x1 zero table") {
    const ContingencyTable t = make_table({"r"}, {"c"}, Grid(1, 1));
    std::stringstream buffer;
    write_table(buffer, t);
    CHECK(read_table(buffer) == t);
  }
  SUBCASE("random tables") {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t rows = 1 + rng.below(20), cols = 1 + rng.below(30);
      std::vector<std::string> rl, cl;
      for (std::size_t i = 0; i < rows; ++i) rl.push_back("row " + std::to_string(i));
      for (std::size_t j = 0; j < cols; ++j) cl.push_back("col " + std::to_string(j));
      const ContingencyTable t =
          make_table(rl, cl, oracle::random_grid(rng, rows, cols, 1000, 0.3));
      std::stringstream buffer;
      write_table(buffer, t);
      CHECK(read_table(buffer) == t);
      // margin consistency
      std::uint64_t row_sum = 0, col_sum = 0;
      for (auto v : t.row_margins) row_sum += v;
      for (auto v : t.col_margins) col_sum += v;
      CHECK(row_sum == t.grand_total);
      CHECK(col_sum == t.grand_total);
    }
  }
}

TEST_CASE("read_table rejects damaged files") {
  auto reject = [](const std::string& text) {
    std::stringstream in(text);
    CHECK_THROWS_AS(read_table(in), MalformedTableFile);
  };
  reject("");                                     // no header
  reject("\ta\tTotal\nr\t1\t1\n");                // missing margin row
  reject("\ta\tTotal\nr\t1\nTotal\t1\t1\n");      // ragged row
  reject("\ta\tTotal\nr\t-1\t-1\nTotal\t-1\t-1\n");  // negative cells
  reject("\ta\tTotal\nr\t1\t2\nTotal\t1\t1\n");   // stated row margin wrong
  reject("\ta\tTotal\nr\t1\t1\nTotal\t2\t1\n");   // stated col margin wrong
  reject("\ta\tTotal\nr\t1\t1\nTotal\t1\t2\n");   // stated total wrong
  reject("\ta\tb\nr\t1\t1\n");                    // header lacks margin column
}

TEST_CASE("visit matrices anchor visits to their first request") {
  // one visit starting Tuesday 14:05 local
  const CivilDateTime c{2004, 1, 20, 14, 5, 0};
  VisitGroup g;
  g.requests.push_back(product_request(civil_to_unix(c, 60), 14, "/"));
  g.requests.push_back(product_request(civil_to_unix(c, 60) + 7200, 14, "/akce/"));
  g.shops = {14};

  const VisitMatrix m = visit_matrix(std::vector<VisitGroup>{g},
                                     VisitMatrixKind::AllVisits);
  CHECK(m.counts[1][14] == 1);
  CHECK(m.total() == 1);

  const VisitMatrix every = visit_matrix(std::vector<VisitGroup>{g},
                                         VisitMatrixKind::AllVisits,
                                         VisitAnchor::EveryRequest);
  CHECK(every.total() == 2);
  CHECK(every.counts[1][16] == 1);

  // single-shop groups vanish from the multi-shop matrix
  const VisitMatrix multi = visit_matrix(std::vector<VisitGroup>{g},
                                         VisitMatrixKind::MultiShopVisits);
  CHECK(multi.total() == 0);

  CHECK(visit_matrix(std::vector<VisitGroup>{}, VisitMatrixKind::AllVisits).total() ==
        0);
}

TEST_CASE("uniform visit starts spread uniformly over the slices") {
  // direct multinomial check: first requests drawn uniformly over a week
  Rng rng(3);
  const int n = 16800;
  std::vector<VisitGroup> groups;
  const std::int64_t monday = civil_to_unix(CivilDateTime{2004, 1, 26, 0, 0, 0}, 60);
  for (int i = 0; i < n; ++i) {
    VisitGroup g;
    g.requests.push_back(
        product_request(monday + static_cast<std::int64_t>(rng.below(7 * 86400)), 14,
                        "/"));
    groups.push_back(std::move(g));
  }
  const VisitMatrix m = visit_matrix(groups, VisitMatrixKind::AllVisits);
  const double mean = static_cast<double>(n) / 168.0;
  const double sigma = std::sqrt(mean * (1.0 - 1.0 / 168.0));
  for (int d = 0; d < 7; ++d)
    for (int h = 0; h < 24; ++h)
      CHECK(std::abs(static_cast<double>(m.counts[d][h]) - mean) <= 3.0 * sigma);
  CHECK(m.total() == static_cast<std::uint64_t>(n));
}

TEST_CASE("visit matrix totals dominate their multi-shop restriction") {
  const SynthSpec spec{.n_users = 200, .multi_shop_fraction = 0.4};
  const SynthResult synth = synthesize(spec, 9);
  IngestConfig config;
  std::vector<NormalizedRequest> stream;
  for (const RawRequest& r : synth.requests) stream.push_back(normalize(r, config));
  const SessionizeResult grouped = group_sessions(stream, SessionizerConfig{});
  const VisitMatrix all = visit_matrix(grouped.groups, VisitMatrixKind::AllVisits);
  const VisitMatrix multi =
      visit_matrix(grouped.groups, VisitMatrixKind::MultiShopVisits);
  CHECK(all.total() == grouped.groups.size());
  CHECK(multi.total() <= all.total());
  // as_table carries the same counts with weekday/hour labels
  const ContingencyTable t = all.as_table();
  CHECK(t.grand_total == all.total());
  CHECK(t.row_labels[0] == "Monday");
  CHECK(t.col_labels[23] == "23");
}

TEST_CASE("build_crosstab tabulates one request into one cell") {
  // Monday 00:30 local, product 7
  const std::int64_t ts = civil_to_unix(CivilDateTime{2004, 1, 26, 0, 30, 0}, 60);
  std::vector<NormalizedRequest> stream = {product_request(ts, 14, "/ls/?p=7")};
  CrosstabFilter filter;
  filter.shop_id = 14;
  CrosstabStats stats;
  const ContingencyTable t = build_crosstab(stream, filter, Catalog{}, stats);
  CHECK(t.cells.rows() == 168);
  CHECK(t.cells.cols() == 1);
  CHECK(t.col_labels[0] == "7");
  CHECK(t.cells.at(0, 0) == 1);
  CHECK(t.grand_total == 1);
  CHECK(t.row_labels[0] == "Monday_0");
  CHECK(stats.matched == 1);
}

TEST_CASE("build_crosstab resolves column labels through the catalog") {
  const std::int64_t ts = civil_to_unix(CivilDateTime{2004, 1, 26, 10, 0, 0}, 60);
  std::vector<NormalizedRequest> stream = {
      product_request(ts, 14, "/ls/?p=7"),
      product_request(ts + 5, 14, "/ls/?p=555"),  // not in the catalog
      product_request(ts + 9, 14, "/ls/"),        // missing variable: skipped
      product_request(ts + 11, 10, "/ls/?p=7"),   // other shop: ignored
      product_request(ts + 12, 14, "/ct/?c=2"),   // other page type: ignored
  };
  Catalog catalog;
  catalog.list[7] = "Built-in electric hobs";
  CrosstabFilter filter;
  filter.shop_id = 14;
  CrosstabStats stats;
  const ContingencyTable t = build_crosstab(stream, filter, catalog, stats);
  CHECK(t.col_labels ==
        std::vector<std::string>{"Built-in electric hobs (7)", "555"});
  CHECK(t.grand_total == 2);
  CHECK(stats.matched == 2);
  CHECK(stats.skipped_missing_variable == 1);

  SUBCASE("all_catalog_columns adds zero columns") {
    catalog.list[9] = "Free standing combi refrigerators";
    filter.all_catalog_columns = true;
    CrosstabStats stats2;
    const ContingencyTable wide = build_crosstab(stream, filter, catalog, stats2);
    CHECK(wide.col_labels == std::vector<std::string>{
                                 "Built-in electric hobs (7)",
                                 "Free standing combi refrigerators (9)", "555"});
    CHECK(wide.col_margins[1] == 0);
  }
}

TEST_CASE("build_crosstab rejects an empty selection") {
  std::vector<NormalizedRequest> stream = {
      product_request(1074585663, 10, "/ls/?p=7")};
  CrosstabFilter filter;
  filter.shop_id = 14;  // nothing on shop 14
  CrosstabStats stats;
  CHECK_THROWS_AS(build_crosstab(stream, filter, Catalog{}, stats), EmptySelection);
}

TEST_CASE("crosstab of a synthetic stream equals the generator tally exactly") {
  for (std::uint64_t seed : {4, 8}) {
    const SynthSpec spec{.n_users = 400};
    const SynthResult synth = synthesize(spec, seed);
    IngestConfig config;
    std::vector<NormalizedRequest> stream;
    for (const RawRequest& r : synth.requests) stream.push_back(normalize(r, config));
    CrosstabFilter filter;
    filter.shop_id = spec.tally_shop_id;
    CrosstabStats stats;
    const ContingencyTable t = build_crosstab(stream, filter, Catalog{}, stats);
    CHECK(t == synth.truth_tally);
  }
}

TEST_CASE("build_crosstab is additive and matches its serial reference") {
  const SynthSpec spec{.n_users = 300};
  const SynthResult synth = synthesize(spec, 21);
  IngestConfig config;
  std::vector<NormalizedRequest> stream;
  for (const RawRequest& r : synth.requests) stream.push_back(normalize(r, config));

  CrosstabFilter filter;
  filter.shop_id = spec.tally_shop_id;
  CrosstabStats stats;
  const ContingencyTable whole = build_crosstab(stream, filter, Catalog{}, stats);

  CrosstabStats ref_stats;
  const ContingencyTable serial =
      reference::build_crosstab_serial(stream, filter, Catalog{}, ref_stats);
  CHECK(whole == serial);
  CHECK(stats.matched == ref_stats.matched);

  // split the stream and sum cell-wise by label
  const std::size_t half = stream.size() / 2;
  std::vector<NormalizedRequest> a(stream.begin(), stream.begin() + half);
  std::vector<NormalizedRequest> b(stream.begin() + half, stream.end());
  CrosstabStats sa, sb;
  const ContingencyTable ta = build_crosstab(a, filter, Catalog{}, sa);
  const ContingencyTable tb = build_crosstab(b, filter, Catalog{}, sb);
  std::map<std::pair<std::string, std::string>, std::uint64_t> summed;
  for (const ContingencyTable* part : {&ta, &tb})
    for (std::size_t i = 0; i < part->cells.rows(); ++i)
      for (std::size_t j = 0; j < part->cells.cols(); ++j)
        if (part->cells.at(i, j) > 0)
          summed[{part->row_labels[i], part->col_labels[j]}] += part->cells.at(i, j);
  std::map<std::pair<std::string, std::string>, std::uint64_t> whole_map;
  for (std::size_t i = 0; i < whole.cells.rows(); ++i)
    for (std::size_t j = 0; j < whole.cells.cols(); ++j)
      if (whole.cells.at(i, j) > 0)
        whole_map[{whole.row_labels[i], whole.col_labels[j]}] += whole.cells.at(i, j);
  CHECK(summed == whole_map);
}
