#include "xshop/sessionize.hpp"

#include <deque>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "xshop/errors.hpp"
#include "xshop/time.hpp"
#include "xshop/union_find.hpp"

namespace xshop {

std::string canonical_url(const std::string& url) {
  // bare-host absolute URLs mean the root page
  for (const char* scheme : {"http://", "https://"}) {
    if (url.rfind(scheme, 0) == 0) {
      if (url.find('/', std::string(scheme).size()) == std::string::npos)
        return url + "/";
      return url;
    }
  }
  return url;
}

namespace {

// most recent session to access each URL from one IP, pruned to the window
class RecentAccessIndex {
 public:
  explicit RecentAccessIndex(std::int64_t window) : window_(window) {}

  const std::pair<std::size_t, std::int64_t>* lookup(const std::string& url) const {
    auto it = by_url_.find(url);
    return it == by_url_.end() ? nullptr : &it->second;
  }

  void insert(const std::string& url, std::size_t session, std::int64_t now) {
    by_url_[url] = {session, now};
    log_.emplace_back(now, url);
    while (!log_.empty() && log_.front().first <= now - window_) {
      auto it = by_url_.find(log_.front().second);
      if (it != by_url_.end() && it->second.second == log_.front().first)
        by_url_.erase(it);
      log_.pop_front();
    }
  }

 private:
  std::int64_t window_;
  std::unordered_map<std::string, std::pair<std::size_t, std::int64_t>> by_url_;
  std::deque<std::pair<std::int64_t, std::string>> log_;
};

struct InternedStream {
  std::vector<std::size_t> session_of;  // request -> interned session index
  std::size_t n_sessions = 0;
};

InternedStream intern_sessions(const std::vector<NormalizedRequest>& stream,
                               const SessionizerConfig& config) {
  InternedStream out;
  out.session_of.reserve(stream.size());
  std::unordered_map<std::string, std::size_t> ids;
  std::int64_t last_ts = stream.empty() ? 0 : stream.front().timestamp;
  for (const NormalizedRequest& r : stream) {
    if (r.timestamp + config.reorder_tolerance_seconds < last_ts)
      throw OutOfOrderInput("timestamp regression at " +
                            format_datetime(r.timestamp, r.utc_offset_minutes));
    if (r.timestamp > last_ts) last_ts = r.timestamp;
    auto [it, inserted] = ids.emplace(r.session_id, ids.size());
    out.session_of.push_back(it->second);
  }
  out.n_sessions = ids.size();
  return out;
}

// Referrer R merges request r's session with the session that accessed R
// from the same IP less than `window` seconds ago. The age comparison is
// strict so that window = 0 can never merge anything; self-matches (same
// session navigating) are union no-ops.
bool referrer_considered(const NormalizedRequest& r, const std::string& ref,
                         const SessionizerConfig& config) {
  const std::string ref_host = url_host(ref);
  if (ref_host.empty()) return false;
  if (config.cross_shop_only && ref_host == url_host(r.url)) return false;
  return true;
}

// Scans one IP's requests in stream order and records the referrer-evidence
// unions.
void match_ip_run(const std::vector<NormalizedRequest>& stream,
                  const std::vector<std::size_t>& indices,
                  const std::vector<std::size_t>& session_of,
                  const SessionizerConfig& config,
                  std::vector<std::pair<std::size_t, std::size_t>>& unions) {
  RecentAccessIndex index(config.window_seconds);
  for (std::size_t idx : indices) {
    const NormalizedRequest& r = stream[idx];
    if (r.referrer) {
      const std::string ref = canonical_url(*r.referrer);
      if (referrer_considered(r, ref, config)) {
        const auto* hit = index.lookup(ref);
        if (hit && r.timestamp - hit->second < config.window_seconds)
          unions.emplace_back(session_of[idx], hit->first);
      }
    }
    index.insert(canonical_url(r.url), session_of[idx], r.timestamp);
  }
}

SessionizeResult assemble_groups(const std::vector<NormalizedRequest>& stream,
                                 const InternedStream& interned, UnionFind& uf) {
  SessionizeResult result;
  result.n_sessions = interned.n_sessions;
  result.n_requests = stream.size();
  std::unordered_map<std::size_t, std::size_t> group_of_root;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const std::size_t root = uf.find(interned.session_of[i]);
    auto [it, inserted] = group_of_root.emplace(root, result.groups.size());
    if (inserted) {
      VisitGroup g;
      g.group_id = result.groups.size();
      g.ip = stream[i].ip;
      result.groups.push_back(std::move(g));
    }
    VisitGroup& g = result.groups[it->second];
    g.session_ids.insert(stream[i].session_id);
    g.shops.insert(stream[i].shop_id);
    g.requests.push_back(stream[i]);
  }
  return result;
}

}  // namespace

SessionizeResult group_sessions(const std::vector<NormalizedRequest>& stream,
                                const SessionizerConfig& config) {
  const InternedStream interned = intern_sessions(stream, config);

  // bucket per IP; all merge evidence is same-IP, so buckets are independent
  std::unordered_map<std::string, std::size_t> bucket_of;
  std::vector<std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    auto [it, inserted] = bucket_of.emplace(stream[i].ip, buckets.size());
    if (inserted) buckets.emplace_back();
    buckets[it->second].push_back(i);
  }

  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> unions(buckets.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t b = 0; b < buckets.size(); ++b)
    match_ip_run(stream, buckets[b], interned.session_of, config, unions[b]);

  UnionFind uf(interned.n_sessions);
  for (const auto& bucket_unions : unions)
    for (const auto& [a, b] : bucket_unions) uf.unite(a, b);
  return assemble_groups(stream, interned, uf);
}

namespace reference {

SessionizeResult group_sessions_serial(const std::vector<NormalizedRequest>& stream,
                                       const SessionizerConfig& config) {
  const InternedStream interned = intern_sessions(stream, config);
  UnionFind uf(interned.n_sessions);
  // one strictly sequential pass over the whole stream, indexed by (ip, url)
  std::unordered_map<std::string, RecentAccessIndex> index_of_ip;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const NormalizedRequest& r = stream[i];
    auto [it, inserted] =
        index_of_ip.emplace(r.ip, RecentAccessIndex(config.window_seconds));
    RecentAccessIndex& index = it->second;
    if (r.referrer) {
      const std::string ref = canonical_url(*r.referrer);
      if (referrer_considered(r, ref, config)) {
        const auto* hit = index.lookup(ref);
        if (hit && r.timestamp - hit->second < config.window_seconds)
          uf.unite(interned.session_of[i], hit->first);
      }
    }
    index.insert(canonical_url(r.url), interned.session_of[i], r.timestamp);
  }
  return assemble_groups(stream, interned, uf);
}

}  // namespace reference

double reduction_ratio(std::size_t n_sessions, std::size_t n_groups) {
  if (n_sessions == 0) throw ZeroSessions("no sessions to reduce");
  if (n_groups > n_sessions)
    throw Error("more groups than sessions: " + std::to_string(n_groups) + " > " +
                std::to_string(n_sessions));
  return 1.0 - static_cast<double>(n_groups) / static_cast<double>(n_sessions);
}

std::vector<VisitGroup> multi_shop_filter(const std::vector<VisitGroup>& groups) {
  std::vector<VisitGroup> out;
  for (const VisitGroup& g : groups)
    if (g.multi_shop()) out.push_back(g);
  return out;
}

namespace {

template <typename It, typename Fn>
std::string join(It begin, It end, char sep, Fn render) {
  std::string out;
  for (It it = begin; it != end; ++it) {
    if (!out.empty()) out += sep;
    out += render(*it);
  }
  return out;
}

}  // namespace

void write_visits(std::ostream& out, const std::vector<VisitGroup>& groups) {
  for (const VisitGroup& g : groups) {
    const NormalizedRequest& first = g.requests.front();
    const NormalizedRequest& last = g.requests.back();
    out << g.group_id << '\t' << g.ip << '\t'
        << join(g.session_ids.begin(), g.session_ids.end(), ';',
                [](const std::string& s) { return s; })
        << '\t' << format_datetime(first.timestamp, first.utc_offset_minutes) << '\t'
        << format_datetime(last.timestamp, last.utc_offset_minutes) << '\t'
        << join(g.shops.begin(), g.shops.end(), ';',
                [](int s) { return std::to_string(s); })
        << '\t' << g.requests.size() << '\n';
  }
}

std::vector<VisitSummary> read_visits(std::istream& in) {
  std::vector<VisitSummary> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
      std::size_t pos = line.find('\t', start);
      f.push_back(line.substr(start, pos == std::string::npos ? std::string::npos
                                                              : pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (f.size() != 7)
      throw MalformedLine("visits record needs 7 fields", line_no);
    VisitSummary v;
    v.group_id = std::stoull(f[0]);
    v.ip = f[1];
    std::size_t p = 0;
    while (p <= f[2].size() && !f[2].empty()) {
      std::size_t semi = f[2].find(';', p);
      v.session_ids.push_back(
          f[2].substr(p, semi == std::string::npos ? std::string::npos : semi - p));
      if (semi == std::string::npos) break;
      p = semi + 1;
    }
    v.first_timestamp = parse_datetime(f[3], v.utc_offset_minutes);
    int off = 0;
    v.last_timestamp = parse_datetime(f[4], off);
    p = 0;
    while (p <= f[5].size() && !f[5].empty()) {
      std::size_t semi = f[5].find(';', p);
      v.shops.insert(std::stoi(
          f[5].substr(p, semi == std::string::npos ? std::string::npos : semi - p)));
      if (semi == std::string::npos) break;
      p = semi + 1;
    }
    v.request_count = std::stoull(f[6]);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace xshop
