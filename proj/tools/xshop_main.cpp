#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "xshop/errors.hpp"
#include "xshop/pipeline.hpp"

namespace {

using namespace xshop;

// 0 = success, 1 = data error (strict mode), 2 = usage or path error
constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

PageType parse_page_type(const std::string& token) {
  if (token == "HOME" || token == "/") return PageType::Home;
  if (token == "OTHER") return PageType::Other;
  for (const auto& [name, type] : kPageTokens)
    if (token == name) return type;
  throw CLI::ValidationError("--page-type", "unknown page type: " + token);
}

std::map<int, std::string> parse_shop_table(const std::string& path, char delimiter) {
  std::ifstream in(path);
  if (!in) throw UnreadableFile("cannot read shop table " + path);
  std::map<int, std::string> table;
  std::map<std::string, int> hosts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t d = line.find(delimiter);
    if (d == std::string::npos)
      throw MalformedLine("shop table needs 'id,host' rows", line_no);
    const int id = std::stoi(line.substr(0, d));
    const std::string host = line.substr(d + 1);
    if (!table.emplace(id, host).second)
      throw DuplicateId("duplicate shop id " + std::to_string(id));
    if (!hosts.emplace(host, id).second)
      throw DuplicateId("two shops share host " + host);
  }
  return table;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"intersite clickstream preprocessing and crossed clustering"};
  app.require_subcommand(1);

  // shared options
  IngestConfig ingest_config;
  SessionizerConfig session_config;
  FitConfig fit_config;
  SynthSpec synth_spec;
  std::string delimiter = ",";
  std::uint64_t seed = 1;

  std::vector<std::string> inputs;
  std::string out_path, out_all, out_multi, catalog_dir, shop_table_path;
  std::string model_path, table_path;

  auto* ingest = app.add_subcommand("ingest", "fuse, clean and normalize raw logs");
  ingest->add_option("inputs", inputs, "log files or a glob pattern")->required();
  ingest->add_option("-o,--out", out_path, "normalized output file")->required();
  ingest->add_flag("--strict", ingest_config.strict, "abort on malformed lines");
  ingest->add_option("--utc-offset", ingest_config.utc_offset_minutes,
                     "UTC offset in minutes");
  ingest->add_option("--delimiter", delimiter, "input field delimiter");
  ingest->add_option("--shop-table", shop_table_path, "file of 'id,host' rows");
  ingest->add_option("--clean-suffix", ingest_config.cleaning_suffixes,
                     "path suffixes to drop");

  auto* sessionize = app.add_subcommand("sessionize", "group sessions into visits");
  sessionize->add_option("input", inputs, "normalized request file")->required();
  sessionize->add_option("-o,--out", out_path, "visits output file")->required();
  sessionize->add_option("--window", session_config.window_seconds,
                         "referrer match window in seconds");

  auto* stats = app.add_subcommand("stats", "weekday x hour visit matrices");
  stats->add_option("input", inputs, "visits file")->required();
  stats->add_option("--all", out_all, "output for all visits")->required();
  stats->add_option("--multi-shop", out_multi, "output for multi-shop visits")
      ->required();

  std::string page_type = "ls";
  CrosstabFilter filter;
  auto* crosstab = app.add_subcommand("crosstab", "time-slice x variable table");
  crosstab->add_option("input", inputs, "normalized request file")->required();
  crosstab->add_option("-o,--out", out_path, "table output file")->required();
  crosstab->add_option("--shop", filter.shop_id, "shop id to select")->required();
  crosstab->add_option("--page-type", page_type, "page type to select");
  crosstab->add_option("--variable", filter.variable, "query variable for columns");
  crosstab->add_option("--catalog", catalog_dir,
                       "directory with kategorie/list/znacka/tema csv files");
  crosstab->add_option("--delimiter", delimiter, "catalog field delimiter");
  crosstab->add_flag("--all-columns", filter.all_catalog_columns,
                     "emit a column for every catalog id");

  bool allow_empty = false;
  auto* cocluster = app.add_subcommand("cocluster", "crossed clustering of a table");
  cocluster->add_option("input", inputs, "contingency table file")->required();
  cocluster->add_option("-o,--out", out_path, "model output file")->required();
  cocluster->add_option("-k,--k", fit_config.k, "row clusters")->required();
  cocluster->add_option("-l,--l", fit_config.l, "column clusters")->required();
  cocluster->add_option("--restarts", fit_config.restarts, "random restarts");
  cocluster->add_option("--max-iters", fit_config.max_iters, "sweep limit per restart");
  cocluster->add_option("--seed", seed, "random seed");
  cocluster->add_flag("--allow-empty", allow_empty,
                      "keep empty clusters instead of reseeding");

  auto* report = app.add_subcommand("report", "human-readable block report");
  report->add_option("--model", model_path, "model file")->required();
  report->add_option("--table", table_path, "source table file")->required();
  report->add_option("-o,--out", out_path, "report output file")->required();

  auto* synth = app.add_subcommand("synth", "seeded synthetic logs with ground truth");
  synth->add_option("-o,--out", out_path, "output directory")->required();
  synth->add_option("--users", synth_spec.n_users, "number of users");
  synth->add_option("--shops", synth_spec.n_shops, "number of shops");
  synth->add_option("--multi-shop-frac", synth_spec.multi_shop_fraction,
                    "fraction of multi-shop visits");
  synth->add_option("--days", synth_spec.duration_days, "covered days");
  synth->add_option("--products", synth_spec.n_products, "distinct products");
  synth->add_option("--weekend-factor", synth_spec.weekend_factor,
                    "weekend visit intensity scale");
  synth->add_option("--tally-shop", synth_spec.tally_shop_id,
                    "shop tallied in truth_tally.tsv");
  synth->add_option("--window", synth_spec.window_seconds,
                    "window the generator respects");
  bool break_window = false;
  synth->add_flag("--break-window", break_window,
                  "make cross-shop gaps exceed the window");
  synth->add_option("--utc-offset", synth_spec.utc_offset_minutes,
                    "UTC offset in minutes");
  synth->add_option("--seed", seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*ingest) {
      if (delimiter.size() != 1)
        throw UnreadableFile("delimiter must be a single character");
      ingest_config.input_delimiter = delimiter[0];
      if (!shop_table_path.empty())
        ingest_config.shop_table = parse_shop_table(shop_table_path, delimiter[0]);
      std::vector<std::string> files;
      for (const std::string& pattern : inputs)
        for (std::string& path : expand_glob(pattern)) files.push_back(std::move(path));
      run_ingest(files, ingest_config, out_path, std::cout);
    } else if (*sessionize) {
      run_sessionize(inputs.at(0), session_config, out_path, std::cout);
    } else if (*stats) {
      run_stats(inputs.at(0), out_all, out_multi, std::cout);
    } else if (*crosstab) {
      filter.page_type = parse_page_type(page_type);
      if (delimiter.size() != 1)
        throw UnreadableFile("delimiter must be a single character");
      run_crosstab(inputs.at(0), filter, catalog_dir, delimiter[0], out_path,
                   std::cout);
    } else if (*cocluster) {
      fit_config.seed = seed;
      fit_config.empty_cluster_policy = allow_empty ? EmptyClusterPolicy::AllowEmpty
                                                    : EmptyClusterPolicy::ReseedFarthest;
      run_cocluster(inputs.at(0), fit_config, out_path, std::cout);
    } else if (*report) {
      run_report(model_path, table_path, out_path, std::cout);
    } else if (*synth) {
      synth_spec.window_respecting = !break_window;
      run_synth(synth_spec, seed, out_path, std::cout);
    }
  } catch (const UnreadableFile& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
