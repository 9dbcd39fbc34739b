#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace xshop {

// One log line in the raw challenge format:
// ShopID,Date,IP,SessionID,Page,Referrer
struct RawRequest {
  int shop_id = 0;
  std::int64_t timestamp = 0;  // Unix seconds
  std::string ip;
  std::string session_id;
  std::string page;  // server-relative, starts with "/"
  std::optional<std::string> referrer;

  bool operator==(const RawRequest&) const = default;
};

struct NormalizedRequest {
  std::int64_t timestamp = 0;  // Unix seconds; datetime derives from this + offset
  int utc_offset_minutes = 60;
  std::string ip;
  std::string session_id;
  std::string url;  // absolute: "http://" + host(shop_id) + page
  std::optional<std::string> referrer;
  int shop_id = 0;

  bool operator==(const NormalizedRequest&) const = default;
};

struct IngestConfig {
  int utc_offset_minutes = 60;  // Czech winter time; Unix 1074585663 is 09:01:03 local
  std::map<int, std::string> shop_table = default_shop_table();
  std::vector<std::string> cleaning_suffixes = {".jpg", ".jpeg", ".gif", ".png",
                                                ".css", ".js",   ".ico"};
  char input_delimiter = ',';
  bool strict = false;  // false: skip-and-count malformed lines

  // the seven shops of the challenge dataset (note: no id 13)
  static std::map<int, std::string> default_shop_table();
};

struct IngestStats {
  std::size_t files = 0;
  std::size_t lines = 0;
  std::size_t malformed = 0;
  std::size_t unknown_shop = 0;
  std::map<std::string, std::size_t> dropped_by_suffix;

  std::size_t dropped_total() const;
};

RawRequest parse_line(const std::string& line, const IngestConfig& config,
                      std::size_t line_no = 0);

// inverse of parse_line, for round-trip checks and fixtures
std::string format_line(const RawRequest& req, const IngestConfig& config);

// K-way merge of individually time-ordered files into one globally
// non-decreasing stream. Stable: ties keep file order, then line order.
std::vector<RawRequest> fuse(const std::vector<std::string>& paths,
                             const IngestConfig& config, IngestStats& stats);

NormalizedRequest normalize(const RawRequest& req, const IngestConfig& config);

// Drops requests whose URL path component ends with a configured suffix.
std::vector<NormalizedRequest> clean(std::vector<NormalizedRequest> stream,
                                     const IngestConfig& config, IngestStats& stats);

// Tab-separated normalized file, the contract for downstream stages:
// datetime \t ip \t session_id \t url \t referrer-or-"-" \t shop_id
void write_normalized(std::ostream& out, const std::vector<NormalizedRequest>& stream);
std::vector<NormalizedRequest> read_normalized(std::istream& in);

// path component of an absolute or server-relative URL (query stripped)
std::string url_path(const std::string& url);

// host of an absolute "http://host/..." URL, empty if not parseable
std::string url_host(const std::string& url);

}  // namespace xshop
