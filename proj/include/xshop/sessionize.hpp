#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "xshop/ingest.hpp"

namespace xshop {

// All SessionIDs of one user (same IP) stitched via referrer evidence into
// one cross-server visit.
struct VisitGroup {
  std::uint64_t group_id = 0;
  std::string ip;
  std::set<std::string> session_ids;
  std::vector<NormalizedRequest> requests;  // globally time-ordered
  std::set<int> shops;

  bool multi_shop() const { return shops.size() >= 2; }
};

struct SessionizerConfig {
  std::int64_t window_seconds = 1800;  // conventional 30 min timeout
  bool same_ip_required = true;        // kept explicit; merges are same-IP only
  // Only merge when the referrer points to a different shop than the request.
  // Off by default: the dataset's own example pair sits on one shop (a fresh
  // SessionID appearing mid-visit) and still belongs to one visit.
  bool cross_shop_only = false;
  std::int64_t reorder_tolerance_seconds = 0;
};

struct SessionizeResult {
  std::vector<VisitGroup> groups;
  std::size_t n_sessions = 0;  // distinct SessionIDs seen
  std::size_t n_requests = 0;
};

// Groups SessionIDs into cross-server visits. A request whose referrer points
// to a different shop and matches a URL this IP accessed less than `window`
// seconds ago is merged with the session that accessed it. Input must be
// time-ordered (fuse output); group ids follow order of first appearance.
SessionizeResult group_sessions(const std::vector<NormalizedRequest>& stream,
                                const SessionizerConfig& config);

// 1 - n_groups / n_sessions
double reduction_ratio(std::size_t n_sessions, std::size_t n_groups);

std::vector<VisitGroup> multi_shop_filter(const std::vector<VisitGroup>& groups);

// "http://www.shop2.cz" and "http://www.shop2.cz/" are the same page
std::string canonical_url(const std::string& url);

// visits file: group_id, ip, sids (";"-joined), first/last datetime, shops, requests
void write_visits(std::ostream& out, const std::vector<VisitGroup>& groups);

struct VisitSummary {
  std::uint64_t group_id = 0;
  std::string ip;
  std::vector<std::string> session_ids;
  std::int64_t first_timestamp = 0;
  int utc_offset_minutes = 0;
  std::int64_t last_timestamp = 0;
  std::set<int> shops;
  std::size_t request_count = 0;
};

std::vector<VisitSummary> read_visits(std::istream& in);

namespace reference {

// Single-pass serial implementation kept as the ground truth for the
// IP-partitioned parallel version above.
SessionizeResult group_sessions_serial(const std::vector<NormalizedRequest>& stream,
                                       const SessionizerConfig& config);

}  // namespace reference

}  // namespace xshop
