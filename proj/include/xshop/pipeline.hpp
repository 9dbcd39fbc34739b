#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "xshop/aggregate.hpp"
#include "xshop/cocluster.hpp"
#include "xshop/ingest.hpp"
#include "xshop/page.hpp"
#include "xshop/sessionize.hpp"
#include "xshop/synth.hpp"

namespace xshop {

// Shell-style glob expansion ('*' and '?' in the filename part), results
// sorted; a literal path passes through if it exists.
std::vector<std::string> expand_glob(const std::string& pattern);

// Each run_* step writes its output file(s), prints a one-line summary to
// `log` and throws an xshop::Error on failure. The CLI maps errors to exit
// codes; tests drive these directly.

struct IngestOutcome {
  IngestStats stats;
  std::size_t records_written = 0;
};

IngestOutcome run_ingest(const std::vector<std::string>& files,
                         const IngestConfig& config, const std::string& out_path,
                         std::ostream& log);

struct SessionizeOutcome {
  std::size_t sessions = 0;
  std::size_t groups = 0;
  double reduction = 0.0;
};

SessionizeOutcome run_sessionize(const std::string& normalized_path,
                                 const SessionizerConfig& config,
                                 const std::string& visits_out, std::ostream& log);

void run_stats(const std::string& visits_path, const std::string& out_all,
               const std::string& out_multi_shop, std::ostream& log);

// catalog_dir may be empty (no label resolution); otherwise it must contain
// kategorie.csv, list.csv, znacka.csv and tema.csv
CrosstabStats run_crosstab(const std::string& normalized_path,
                           const CrosstabFilter& filter, const std::string& catalog_dir,
                           char delimiter, const std::string& table_out,
                           std::ostream& log, const VariableMap& vars = VariableMap{});

BlockModel run_cocluster(const std::string& table_path, const FitConfig& config,
                         const std::string& model_out, std::ostream& log);

void run_report(const std::string& model_path, const std::string& table_path,
                const std::string& report_out, std::ostream& log);

struct SynthOutcome {
  std::size_t requests = 0;
  std::size_t groups = 0;
  std::size_t files = 0;
};

SynthOutcome run_synth(const SynthSpec& spec, std::uint64_t seed,
                       const std::string& out_dir, std::ostream& log);

Catalog load_catalog_dir(const std::string& dir, char delimiter);

}  // namespace xshop
