#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xshop/ingest.hpp"
#include "xshop/table.hpp"

namespace xshop {

// Seeded generator of challenge-format logs with ground truth for every
// downstream stage: the true visit partition and the exact per-(slice,
// product) request tally of one shop.
struct SynthSpec {
  std::size_t n_users = 1000;
  int n_shops = 7;  // first n entries of the default shop table, then 18,19,...
  double multi_shop_fraction = 0.3;  // P(a visit spans >= 2 shops)
  bool window_respecting = true;     // cross-shop gaps stay inside the window
  std::int64_t window_seconds = 1800;
  int duration_days = 7;
  std::int64_t start_unix = 1074585600;  // 2004-01-20 09:00 +01:00
  int utc_offset_minutes = 60;
  int n_products = 20;  // product ids 1..n
  double weekend_factor = 1.0;  // scales Saturday/Sunday visit intensity
  int tally_shop_id = 14;       // the shop whose ls-page products are tallied

  void validate() const;  // throws InvalidSpec
};

struct SynthResult {
  std::vector<RawRequest> requests;  // time-ordered
  std::vector<std::vector<std::string>> truth_groups;  // canonical partition
  ContingencyTable truth_tally;  // 168 x observed products of the tally shop
};

SynthResult synthesize(const SynthSpec& spec, std::uint64_t seed);

// Hourly log files (Table-1 CSV layout) named log_YYYYMMDD_HH.csv by local
// time, plus truth_groups.tsv and truth_tally.tsv. Returns the file count.
std::size_t write_synth(const std::string& out_dir, const SynthResult& result,
                        const SynthSpec& spec);

// canonical form used for set-partition equality: sids sorted inside each
// group, groups sorted by their first sid
std::vector<std::vector<std::string>> canonical_partition(
    std::vector<std::vector<std::string>> groups);

}  // namespace xshop
