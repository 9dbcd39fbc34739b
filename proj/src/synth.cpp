#include "xshop/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "xshop/aggregate.hpp"
#include "xshop/errors.hpp"
#include "xshop/rng.hpp"
#include "xshop/time.hpp"

namespace xshop {

void SynthSpec::validate() const {
  if (n_users == 0) throw InvalidSpec("n_users must be positive");
  if (n_shops < 1) throw InvalidSpec("n_shops must be positive");
  if (multi_shop_fraction < 0.0 || multi_shop_fraction > 1.0)
    throw InvalidSpec("multi_shop_fraction must be in [0,1]");
  if (window_seconds <= 0) throw InvalidSpec("window_seconds must be positive");
  if (duration_days < 1) throw InvalidSpec("duration_days must be positive");
  if (start_unix < 0) throw InvalidSpec("start_unix must be non-negative");
  if (n_products < 1) throw InvalidSpec("n_products must be positive");
  if (weekend_factor < 0.0) throw InvalidSpec("weekend_factor must be non-negative");
  if (n_users > (1u << 24)) throw InvalidSpec("too many users for distinct IPs");
}

namespace {

std::vector<std::pair<int, std::string>> shop_list(int n_shops) {
  std::vector<std::pair<int, std::string>> shops;
  for (const auto& [id, host] : IngestConfig::default_shop_table()) {
    if (static_cast<int>(shops.size()) == n_shops) return shops;
    shops.emplace_back(id, host);
  }
  for (int id = 18; static_cast<int>(shops.size()) < n_shops; ++id)
    shops.emplace_back(id, "www.shop" + std::to_string(id - 10) + ".cz");
  return shops;
}

std::string hex_chunk(Rng& rng, int chars) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(chars);
  for (int i = 0; i < chars; ++i) out += digits[rng.below(16)];
  return out;
}

std::string user_ip(std::size_t u) {
  return "10." + std::to_string((u >> 16) & 255) + "." + std::to_string((u >> 8) & 255) +
         "." + std::to_string(u & 255);
}

// relative visit intensity per (weekday, hour): quiet nights, busier
// Tuesday/Wednesday, weekends scaled by the configured factor
double slice_weight(const TimeSlice& s, double weekend_factor) {
  const double hour_w = (s.hour >= 8 && s.hour <= 21) ? 2.0 : 0.5;
  double day_w = 1.0;
  if (s.weekday == 1 || s.weekday == 2) day_w = 1.3;
  if (s.weekday >= 5) day_w = weekend_factor;
  return hour_w * day_w;
}

}  // namespace

std::vector<std::vector<std::string>> canonical_partition(
    std::vector<std::vector<std::string>> groups) {
  for (auto& g : groups) std::sort(g.begin(), g.end());
  std::sort(groups.begin(), groups.end());
  return groups;
}

SynthResult synthesize(const SynthSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(substream_seed(seed, "synth"));
  const auto shops = shop_list(spec.n_shops);

  // hour-of-duration weights derived from the slice intensities
  const std::size_t n_hours = static_cast<std::size_t>(spec.duration_days) * 24;
  std::vector<double> hour_weights(n_hours);
  for (std::size_t h = 0; h < n_hours; ++h) {
    const std::int64_t ts = spec.start_unix + static_cast<std::int64_t>(h) * 3600;
    hour_weights[h] =
        slice_weight(TimeSlice::of_local_time(ts, spec.utc_offset_minutes),
                     spec.weekend_factor);
  }
  std::vector<double> product_weights(spec.n_products);
  for (int p = 0; p < spec.n_products; ++p) product_weights[p] = 1.0 / (p + 1);

  SynthResult result;
  std::map<std::pair<int, int>, std::uint64_t> tally;  // (slice, product id)

  for (std::size_t u = 0; u < spec.n_users; ++u) {
    const std::string ip = user_ip(u);
    std::int64_t now = spec.start_unix + static_cast<std::int64_t>(rng.weighted(hour_weights)) * 3600 +
                       static_cast<std::int64_t>(rng.below(3600));

    int shops_to_visit = 1;
    if (rng.chance(spec.multi_shop_fraction))
      shops_to_visit = 2 + static_cast<int>(rng.below(3));
    shops_to_visit = std::min(shops_to_visit, spec.n_shops);

    // distinct shops via a partial shuffle
    std::vector<std::size_t> order(shops.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (int i = 0; i < shops_to_visit; ++i)
      std::swap(order[i], order[i + rng.below(order.size() - i)]);

    std::vector<std::string> visit_sids;
    std::string prev_url;     // last URL requested, across shops
    bool prev_is_root = false;
    int session_counter = 0;

    for (int sv = 0; sv < shops_to_visit; ++sv) {
      const auto& [shop_id, host] = shops[order[sv]];
      char sid_prefix[16];
      std::snprintf(sid_prefix, sizeof(sid_prefix), "%08zx%02x", u,
                    session_counter++);
      const std::string sid = std::string(sid_prefix) + hex_chunk(rng, 22);
      visit_sids.push_back(sid);

      const int n_requests = 1 + static_cast<int>(rng.below(4));
      for (int r = 0; r < n_requests; ++r) {
        RawRequest req;
        req.shop_id = shop_id;
        req.ip = ip;
        req.session_id = sid;

        if (r == 0) {
          // entering the shop: root page; referrer only when moving between
          // shops (bare host form when the prior page was a root, matching
          // how the dataset abbreviates it)
          req.page = "/";
          if (sv > 0) {
            std::int64_t gap;
            if (spec.window_respecting) {
              // stay strictly inside the window so the link is recoverable
              const std::int64_t cap = std::min<std::int64_t>(180, spec.window_seconds - 1);
              gap = cap >= 1 ? 1 + static_cast<std::int64_t>(rng.below(cap)) : 0;
            } else {
              gap = spec.window_seconds + 60 + static_cast<std::int64_t>(rng.below(600));
            }
            now += gap;
            req.referrer = prev_is_root ? prev_url.substr(0, prev_url.size() - 1)
                                        : prev_url;
          }
          prev_is_root = true;
        } else {
          now += 1 + static_cast<std::int64_t>(rng.below(180));
          const std::uint64_t kind = rng.below(4);
          if (kind == 0) {
            req.page = "/ct/?c=" + std::to_string(1 + rng.below(40));
          } else if (kind <= 2) {
            const int product = 1 + static_cast<int>(rng.weighted(product_weights));
            req.page = "/ls/?p=" + std::to_string(product);
            if (shop_id == spec.tally_shop_id) {
              const int slice =
                  TimeSlice::of_local_time(now, spec.utc_offset_minutes).index();
              ++tally[{slice, product}];
            }
          } else {
            req.page = "/akce/";
          }
          req.referrer = prev_url;  // same-shop navigation, never merges
          prev_is_root = false;
        }
        req.timestamp = now;
        prev_url = "http://" + host + req.page;
        result.requests.push_back(std::move(req));
      }
    }
    result.truth_groups.push_back(std::move(visit_sids));
  }

  std::stable_sort(result.requests.begin(), result.requests.end(),
                   [](const RawRequest& a, const RawRequest& b) {
                     return a.timestamp < b.timestamp;
                   });
  result.truth_groups = canonical_partition(std::move(result.truth_groups));

  // exact tally of the tally shop, same layout as build_crosstab output
  std::vector<int> products;
  for (const auto& [key, count] : tally) products.push_back(key.second);
  std::sort(products.begin(), products.end());
  products.erase(std::unique(products.begin(), products.end()), products.end());
  std::map<int, std::size_t> col_of;
  std::vector<std::string> col_labels;
  for (std::size_t j = 0; j < products.size(); ++j) {
    col_of[products[j]] = j;
    col_labels.push_back(std::to_string(products[j]));
  }
  Grid g(kTimeSlices, products.size());
  for (const auto& [key, count] : tally) g.at(key.first, col_of[key.second]) += count;
  std::vector<std::string> row_labels;
  for (int i = 0; i < kTimeSlices; ++i)
    row_labels.push_back(TimeSlice::of_index(i).label());
  result.truth_tally = make_table(std::move(row_labels), std::move(col_labels),
                                  std::move(g));
  return result;
}

std::size_t write_synth(const std::string& out_dir, const SynthResult& result,
                        const SynthSpec& spec) {
  namespace fs = std::filesystem;
  const fs::path logs = fs::path(out_dir) / "logs";
  fs::create_directories(logs);

  IngestConfig for_format;  // only the delimiter matters here
  std::ofstream out;
  std::string open_name;
  std::size_t files = 0;
  for (const RawRequest& req : result.requests) {
    const CivilDateTime c = unix_to_civil(req.timestamp, spec.utc_offset_minutes);
    char name[40];
    std::snprintf(name, sizeof(name), "log_%04d%02d%02d_%02d.csv", c.year, c.month,
                  c.day, c.hour);
    if (name != open_name) {
      // requests are time-sorted, so each hourly file is opened exactly once
      out.close();
      out.open(logs / name, std::ios::trunc);
      if (!out) throw UnreadableFile("cannot write " + (logs / name).string());
      open_name = name;
      ++files;
    }
    out << format_line(req, for_format) << '\n';
  }
  out.close();

  std::ofstream groups_out(fs::path(out_dir) / "truth_groups.tsv");
  if (!groups_out) throw UnreadableFile("cannot write truth_groups.tsv");
  for (const auto& group : result.truth_groups) {
    for (std::size_t i = 0; i < group.size(); ++i)
      groups_out << (i ? ";" : "") << group[i];
    groups_out << '\n';
  }
  write_table_file((fs::path(out_dir) / "truth_tally.tsv").string(),
                   result.truth_tally);
  return files;
}

}  // namespace xshop
