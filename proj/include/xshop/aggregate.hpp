#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "xshop/ingest.hpp"
#include "xshop/page.hpp"
#include "xshop/sessionize.hpp"
#include "xshop/table.hpp"

namespace xshop {

// One of the 168 (weekday, hour) periods; weekday 0 = Monday.
struct TimeSlice {
  int weekday = 0;
  int hour = 0;

  int index() const { return weekday * 24 + hour; }
  std::string label() const;  // "Monday_0" .. "Sunday_23"

  static TimeSlice of_local_time(std::int64_t unix_seconds, int utc_offset_minutes);
  static TimeSlice of_index(int index);

  bool operator==(const TimeSlice&) const = default;
};

inline constexpr int kTimeSlices = 168;

enum class VisitMatrixKind { AllVisits, MultiShopVisits };
enum class VisitAnchor { FirstRequest, EveryRequest };

struct VisitMatrix {
  std::array<std::array<std::uint64_t, 24>, 7> counts{};
  VisitMatrixKind kind = VisitMatrixKind::AllVisits;
  VisitAnchor anchor_rule = VisitAnchor::FirstRequest;

  std::uint64_t total() const;
  ContingencyTable as_table() const;  // weekday rows, hour columns
};

VisitMatrix visit_matrix(const std::vector<VisitGroup>& groups, VisitMatrixKind kind,
                         VisitAnchor anchor = VisitAnchor::FirstRequest);

// same matrix from the visits-file summaries (first-request anchoring only)
VisitMatrix visit_matrix(const std::vector<VisitSummary>& visits, VisitMatrixKind kind);

struct CrosstabFilter {
  int shop_id = 0;
  PageType page_type = PageType::Ls;
  std::string variable = "p";  // query variable whose values become columns
  bool all_catalog_columns = false;  // include every catalog id as a column
};

struct CrosstabStats {
  std::size_t matched = 0;
  std::size_t skipped_missing_variable = 0;
};

// Rows are always the 168 time slices; columns the observed variable values
// (numeric sort when possible), labeled "Name (id)" when the catalog knows
// the id. Throws EmptySelection when nothing matches.
ContingencyTable build_crosstab(const std::vector<NormalizedRequest>& stream,
                                const CrosstabFilter& filter, const Catalog& catalog,
                                CrosstabStats& stats,
                                const VariableMap& vars = VariableMap{});

namespace reference {

// serial single-threaded fold, kept to validate the parallel version
ContingencyTable build_crosstab_serial(const std::vector<NormalizedRequest>& stream,
                                       const CrosstabFilter& filter,
                                       const Catalog& catalog, CrosstabStats& stats,
                                       const VariableMap& vars = VariableMap{});

}  // namespace reference

}  // namespace xshop
