#include "xshop/ingest.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <queue>
#include <tuple>

#include "xshop/errors.hpp"
#include "xshop/time.hpp"

namespace xshop {

std::map<int, std::string> IngestConfig::default_shop_table() {
  return {{10, "www.shop1.cz"}, {11, "www.shop2.cz"}, {12, "www.shop3.cz"},
          {14, "www.shop4.cz"}, {15, "www.shop5.cz"}, {16, "www.shop6.cz"},
          {17, "www.shop7.cz"}};
}

std::size_t IngestStats::dropped_total() const {
  std::size_t n = 0;
  for (const auto& [suffix, count] : dropped_by_suffix) n += count;
  return n;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(delim, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

bool parse_int64(const std::string& s, std::int64_t& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  long long v = std::strtoll(s.c_str(), &end, 10);
  if (errno != 0 || end != s.c_str() + s.size()) return false;
  out = v;
  return true;
}

}  // namespace

RawRequest parse_line(const std::string& line, const IngestConfig& config,
                      std::size_t line_no) {
  std::vector<std::string> fields = split(line, config.input_delimiter);
  if (fields.size() != 6)
    throw MalformedLine("expected 6 fields, got " + std::to_string(fields.size()),
                        line_no);
  for (auto& f : fields) f = trim(f);

  RawRequest req;
  std::int64_t shop = 0;
  if (!parse_int64(fields[0], shop) || shop <= 0)
    throw MalformedLine("bad shop_id: " + fields[0], line_no);
  req.shop_id = static_cast<int>(shop);
  if (!parse_int64(fields[1], req.timestamp) || req.timestamp < 0)
    throw MalformedLine("bad timestamp: " + fields[1], line_no);
  req.ip = fields[2];
  req.session_id = fields[3];
  if (req.session_id.empty()) throw MalformedLine("empty session_id", line_no);
  req.page = fields[4];
  if (req.page.empty() || req.page[0] != '/')
    throw MalformedLine("page must start with '/': " + req.page, line_no);
  if (!fields[5].empty()) req.referrer = fields[5];
  return req;
}

std::string format_line(const RawRequest& req, const IngestConfig& config) {
  const char d = config.input_delimiter;
  std::string out = std::to_string(req.shop_id);
  out += d;
  out += std::to_string(req.timestamp);
  out += d;
  out += req.ip;
  out += d;
  out += req.session_id;
  out += d;
  out += req.page;
  out += d;
  if (req.referrer) out += *req.referrer;
  return out;
}

namespace {

struct ParsedFile {
  std::vector<RawRequest> requests;
  std::size_t lines = 0;
  std::size_t malformed = 0;
};

ParsedFile parse_file(const std::string& path, const IngestConfig& config) {
  std::ifstream in(path);
  if (!in) throw UnreadableFile("cannot open " + path);
  ParsedFile out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++out.lines;
    try {
      out.requests.push_back(parse_line(line, config, line_no));
    } catch (const MalformedLine& e) {
      if (config.strict)
        throw MalformedLine(path + ":" + std::to_string(line_no) + ": " + e.what(),
                            line_no);
      ++out.malformed;
    }
  }
  return out;
}

}  // namespace

std::vector<RawRequest> fuse(const std::vector<std::string>& paths,
                             const IngestConfig& config, IngestStats& stats) {
  std::vector<ParsedFile> parsed(paths.size());
  std::vector<std::exception_ptr> errors(paths.size());
  // hourly slices parse independently; the merge below is a single consumer
#pragma omp parallel for schedule(dynamic)
  for (std::size_t f = 0; f < paths.size(); ++f) {
    try {
      parsed[f] = parse_file(paths[f], config);
    } catch (...) {
      errors[f] = std::current_exception();
    }
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
  stats.files += paths.size();
  std::size_t total = 0;
  for (const ParsedFile& p : parsed) {
    stats.lines += p.lines;
    stats.malformed += p.malformed;
    total += p.requests.size();
  }

  // min-heap on (timestamp, file index, line index) keeps equal timestamps stable
  using Head = std::tuple<std::int64_t, std::size_t, std::size_t>;
  std::priority_queue<Head, std::vector<Head>, std::greater<Head>> heap;
  for (std::size_t f = 0; f < parsed.size(); ++f)
    if (!parsed[f].requests.empty())
      heap.emplace(parsed[f].requests[0].timestamp, f, 0);

  std::vector<RawRequest> merged;
  merged.reserve(total);
  while (!heap.empty()) {
    auto [ts, f, i] = heap.top();
    heap.pop();
    merged.push_back(std::move(parsed[f].requests[i]));
    if (i + 1 < parsed[f].requests.size())
      heap.emplace(parsed[f].requests[i + 1].timestamp, f, i + 1);
  }
  return merged;
}

NormalizedRequest normalize(const RawRequest& req, const IngestConfig& config) {
  auto it = config.shop_table.find(req.shop_id);
  if (it == config.shop_table.end())
    throw UnknownShop("shop_id " + std::to_string(req.shop_id) + " not in shop table");
  NormalizedRequest out;
  out.timestamp = req.timestamp;
  out.utc_offset_minutes = config.utc_offset_minutes;
  out.ip = req.ip;
  out.session_id = req.session_id;
  out.url = "http://" + it->second + req.page;
  out.referrer = req.referrer;
  out.shop_id = req.shop_id;
  return out;
}

std::string url_path(const std::string& url) {
  std::size_t start = 0;
  if (url.rfind("http://", 0) == 0) {
    start = url.find('/', 7);
    if (start == std::string::npos) return "/";
  } else if (url.rfind("https://", 0) == 0) {
    start = url.find('/', 8);
    if (start == std::string::npos) return "/";
  }
  std::size_t q = url.find('?', start);
  return url.substr(start, q == std::string::npos ? std::string::npos : q - start);
}

std::string url_host(const std::string& url) {
  std::size_t start;
  if (url.rfind("http://", 0) == 0)
    start = 7;
  else if (url.rfind("https://", 0) == 0)
    start = 8;
  else
    return "";
  std::size_t end = url.find('/', start);
  return url.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

std::vector<NormalizedRequest> clean(std::vector<NormalizedRequest> stream,
                                     const IngestConfig& config, IngestStats& stats) {
  if (config.cleaning_suffixes.empty()) return stream;
  std::vector<NormalizedRequest> kept;
  kept.reserve(stream.size());
  for (auto& req : stream) {
    const std::string path = url_path(req.url);
    const std::string* hit = nullptr;
    for (const std::string& suffix : config.cleaning_suffixes) {
      if (path.size() >= suffix.size() &&
          path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0) {
        hit = &suffix;
        break;
      }
    }
    if (hit)
      ++stats.dropped_by_suffix[*hit];
    else
      kept.push_back(std::move(req));
  }
  return kept;
}

void write_normalized(std::ostream& out, const std::vector<NormalizedRequest>& stream) {
  for (const NormalizedRequest& r : stream) {
    out << format_datetime(r.timestamp, r.utc_offset_minutes) << '\t' << r.ip << '\t'
        << r.session_id << '\t' << r.url << '\t' << (r.referrer ? *r.referrer : "-")
        << '\t' << r.shop_id << '\n';
  }
}

std::vector<NormalizedRequest> read_normalized(std::istream& in) {
  std::vector<NormalizedRequest> stream;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f = split(line, '\t');
    if (f.size() != 6)
      throw MalformedLine("normalized record needs 6 fields, got " +
                              std::to_string(f.size()),
                          line_no);
    NormalizedRequest r;
    r.timestamp = parse_datetime(f[0], r.utc_offset_minutes);
    r.ip = f[1];
    r.session_id = f[2];
    r.url = f[3];
    if (f[4] != "-") r.referrer = f[4];
    std::int64_t shop = 0;
    if (!parse_int64(f[5], shop))
      throw MalformedLine("bad shop_id: " + f[5], line_no);
    r.shop_id = static_cast<int>(shop);
    stream.push_back(std::move(r));
  }
  return stream;
}

}  // namespace xshop
