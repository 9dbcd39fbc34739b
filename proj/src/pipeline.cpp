#include "xshop/pipeline.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "xshop/errors.hpp"

namespace xshop {

namespace fs = std::filesystem;

std::vector<std::string> expand_glob(const std::string& pattern) {
  const fs::path p(pattern);
  if (pattern.find('*') == std::string::npos &&
      pattern.find('?') == std::string::npos) {
    if (!fs::exists(p)) throw UnreadableFile("no such file: " + pattern);
    return {pattern};
  }
  const fs::path dir = p.parent_path().empty() ? fs::path(".") : p.parent_path();
  const std::string name_pattern = p.filename().string();
  std::vector<std::string> matches;
  if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      const std::string name = entry.path().filename().string();
      if (fnmatch(name_pattern.c_str(), name.c_str(), 0) == 0)
        matches.push_back((p.parent_path() / name).string());
    }
  }
  std::sort(matches.begin(), matches.end());
  return matches;
}

IngestOutcome run_ingest(const std::vector<std::string>& files,
                         const IngestConfig& config, const std::string& out_path,
                         std::ostream& log) {
  if (files.empty()) throw UnreadableFile("no input files");
  IngestOutcome outcome;
  std::vector<RawRequest> raw = fuse(files, config, outcome.stats);
  std::vector<NormalizedRequest> normalized;
  normalized.reserve(raw.size());
  for (const RawRequest& r : raw) {
    try {
      normalized.push_back(normalize(r, config));
    } catch (const UnknownShop&) {
      if (config.strict) throw;
      ++outcome.stats.unknown_shop;
    }
  }
  normalized = clean(std::move(normalized), config, outcome.stats);
  std::ofstream out(out_path);
  if (!out) throw UnreadableFile("cannot write " + out_path);
  write_normalized(out, normalized);
  outcome.records_written = normalized.size();
  log << "files=" << outcome.stats.files << " lines=" << outcome.stats.lines
      << " malformed=" << outcome.stats.malformed
      << " unknown_shop=" << outcome.stats.unknown_shop
      << " dropped=" << outcome.stats.dropped_total()
      << " written=" << outcome.records_written << '\n';
  return outcome;
}

SessionizeOutcome run_sessionize(const std::string& normalized_path,
                                 const SessionizerConfig& config,
                                 const std::string& visits_out, std::ostream& log) {
  std::ifstream in(normalized_path);
  if (!in) throw UnreadableFile("cannot read " + normalized_path);
  const std::vector<NormalizedRequest> stream = read_normalized(in);
  const SessionizeResult result = group_sessions(stream, config);
  std::ofstream out(visits_out);
  if (!out) throw UnreadableFile("cannot write " + visits_out);
  write_visits(out, result.groups);
  SessionizeOutcome outcome;
  outcome.sessions = result.n_sessions;
  outcome.groups = result.groups.size();
  outcome.reduction =
      result.n_sessions == 0 ? 0.0
                             : reduction_ratio(result.n_sessions, result.groups.size());
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", outcome.reduction * 100.0);
  log << "sessions=" << outcome.sessions << " groups=" << outcome.groups
      << " reduction=" << buf << "%\n";
  return outcome;
}

void run_stats(const std::string& visits_path, const std::string& out_all,
               const std::string& out_multi_shop, std::ostream& log) {
  std::ifstream in(visits_path);
  if (!in) throw UnreadableFile("cannot read " + visits_path);
  const std::vector<VisitSummary> visits = read_visits(in);
  const VisitMatrix all = visit_matrix(visits, VisitMatrixKind::AllVisits);
  const VisitMatrix multi = visit_matrix(visits, VisitMatrixKind::MultiShopVisits);
  write_table_file(out_all, all.as_table());
  write_table_file(out_multi_shop, multi.as_table());
  log << "visits=" << all.total() << " multi_shop=" << multi.total() << '\n';
}

Catalog load_catalog_dir(const std::string& dir, char delimiter) {
  auto open = [&](const char* name) {
    std::ifstream in(fs::path(dir) / name);
    if (!in) throw UnreadableFile("cannot read " + (fs::path(dir) / name).string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer;
  };
  std::stringstream kategorie = open("kategorie.csv");
  std::stringstream list = open("list.csv");
  std::stringstream znacka = open("znacka.csv");
  std::stringstream tema = open("tema.csv");
  return load_catalog(kategorie, list, znacka, tema, delimiter);
}

CrosstabStats run_crosstab(const std::string& normalized_path,
                           const CrosstabFilter& filter, const std::string& catalog_dir,
                           char delimiter, const std::string& table_out,
                           std::ostream& log, const VariableMap& vars) {
  std::ifstream in(normalized_path);
  if (!in) throw UnreadableFile("cannot read " + normalized_path);
  const std::vector<NormalizedRequest> stream = read_normalized(in);
  Catalog catalog;
  if (!catalog_dir.empty()) catalog = load_catalog_dir(catalog_dir, delimiter);
  CrosstabStats stats;
  const ContingencyTable table = build_crosstab(stream, filter, catalog, stats, vars);
  write_table_file(table_out, table);
  log << "matched=" << stats.matched
      << " skipped=" << stats.skipped_missing_variable
      << " columns=" << table.cells.cols() << " total=" << table.grand_total << '\n';
  return stats;
}

BlockModel run_cocluster(const std::string& table_path, const FitConfig& config,
                         const std::string& model_out, std::ostream& log) {
  const ContingencyTable table = read_table_file(table_path);
  const BlockModel model = fit(table, config);
  std::ofstream out(model_out);
  if (!out) throw UnreadableFile("cannot write " + model_out);
  write_model(out, model, table);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", model.chi2);
  log << "chi2=" << buf << " k=" << config.k << " l=" << config.l
      << " iterations=" << model.iterations << " restarts=" << model.restarts_used
      << '\n';
  return model;
}

void run_report(const std::string& model_path, const std::string& table_path,
                const std::string& report_out, std::ostream& log) {
  std::ifstream min(model_path);
  if (!min) throw UnreadableFile("cannot read " + model_path);
  const ModelFile mf = read_model(min);
  const ContingencyTable table = read_table_file(table_path);
  if (mf.row_labels != table.row_labels || mf.col_labels != table.col_labels)
    throw DimensionMismatch("model labels do not match the table");
  const BlockReport report = block_report(mf.model, table);
  std::ofstream out(report_out);
  if (!out) throw UnreadableFile("cannot write " + report_out);
  render_report(out, report);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", report.chi2);
  log << "report chi2=" << buf << " blocks=" << mf.model.row_partition.k << "x"
      << mf.model.col_partition.k << '\n';
}

SynthOutcome run_synth(const SynthSpec& spec, std::uint64_t seed,
                       const std::string& out_dir, std::ostream& log) {
  const SynthResult result = synthesize(spec, seed);
  SynthOutcome outcome;
  outcome.files = write_synth(out_dir, result, spec);
  outcome.requests = result.requests.size();
  outcome.groups = result.truth_groups.size();
  log << "users=" << spec.n_users << " requests=" << outcome.requests
      << " groups=" << outcome.groups << " files=" << outcome.files << '\n';
  return outcome;
}

}  // namespace xshop
