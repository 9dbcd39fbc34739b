#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "xshop/errors.hpp"
#include "xshop/pipeline.hpp"

using namespace xshop;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
#ifdef XSHOP_BIN_PATH
  const std::string cmd = std::string(XSHOP_BIN_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
#else
  (void)args;
  return -1;
#endif
}

// byte-for-byte equality of two directory trees
void check_trees_equal(const fs::path& a, const fs::path& b) {
  std::vector<fs::path> rel_a, rel_b;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) rel_a.push_back(fs::relative(e.path(), a));
  for (const auto& e : fs::recursive_directory_iterator(b))
    if (e.is_regular_file()) rel_b.push_back(fs::relative(e.path(), b));
  std::sort(rel_a.begin(), rel_a.end());
  std::sort(rel_b.begin(), rel_b.end());
  REQUIRE(rel_a == rel_b);
  for (const fs::path& rel : rel_a) CHECK(slurp(a / rel) == slurp(b / rel));
}

}  // namespace

TEST_CASE("expand_glob matches the fixture files") {
  const std::vector<std::string> files = expand_glob("tests/fixtures/raw_?.csv");
  CHECK(files == std::vector<std::string>{"tests/fixtures/raw_a.csv",
                                          "tests/fixtures/raw_b.csv",
                                          "tests/fixtures/raw_c.csv"});
  CHECK(expand_glob("tests/fixtures/zzz*.csv").empty());
  CHECK_THROWS_AS(expand_glob("tests/fixtures/missing.csv"), UnreadableFile);
}

TEST_CASE("ingest of the fixture logs is byte-identical to the golden file") {
  const fs::path out = temp_dir("xshop_golden") / "normalized.tsv";
  std::ostringstream log;
  const IngestOutcome outcome = run_ingest(
      {"tests/fixtures/raw_a.csv", "tests/fixtures/raw_b.csv",
       "tests/fixtures/raw_c.csv"},
      IngestConfig{}, out.string(), log);
  CHECK(outcome.stats.files == 3);
  CHECK(outcome.stats.lines == 6);
  CHECK(outcome.stats.malformed == 0);
  CHECK(outcome.stats.dropped_total() == 1);  // the .jpg resource
  CHECK(outcome.records_written == 5);
  CHECK(slurp(out) == slurp("tests/fixtures/golden_normalized.tsv"));
  CHECK(log.str() ==
        "files=3 lines=6 malformed=0 unknown_shop=0 dropped=1 written=5\n");
}

TEST_CASE("lenient ingest counts a bad line, strict ingest fails on it") {
  const fs::path out = temp_dir("xshop_bad") / "normalized.tsv";
  std::ostringstream log;
  const IngestOutcome outcome =
      run_ingest({"tests/fixtures/raw_bad.csv"}, IngestConfig{}, out.string(), log);
  CHECK(outcome.stats.malformed == 1);
  CHECK(outcome.records_written == 1);

  IngestConfig strict;
  strict.strict = true;
  std::ostringstream log2;
  CHECK_THROWS_AS(
      run_ingest({"tests/fixtures/raw_bad.csv"}, strict, out.string(), log2),
      MalformedLine);
}

TEST_CASE("sessionize prints the documented summary for the Table-3 pair") {
  const fs::path dir = temp_dir("xshop_t3");
  const fs::path normalized = dir / "normalized.tsv";
  {
    std::ostringstream log;
    run_ingest({"tests/fixtures/raw_a.csv"}, IngestConfig{}, normalized.string(), log);
  }
  std::ostringstream log;
  const SessionizeOutcome outcome = run_sessionize(
      normalized.string(), SessionizerConfig{}, (dir / "visits.tsv").string(), log);
  CHECK(outcome.sessions == 2);
  CHECK(outcome.groups == 1);
  CHECK(log.str() == "sessions=2 groups=1 reduction=50.00%\n");
}

TEST_CASE("stats of an empty visits file yields zero matrices") {
  const fs::path dir = temp_dir("xshop_empty");
  std::ofstream(dir / "visits.tsv").close();
  std::ostringstream log;
  run_stats((dir / "visits.tsv").string(), (dir / "all.tsv").string(),
            (dir / "multi.tsv").string(), log);
  const ContingencyTable all = read_table_file((dir / "all.tsv").string());
  CHECK(all.grand_total == 0);
  CHECK(all.cells.rows() == 7);
  CHECK(all.cells.cols() == 24);
}

TEST_CASE("crosstab resolves labels from the catalog directory") {
  const fs::path dir = temp_dir("xshop_xtab");
  CrosstabFilter filter;
  filter.shop_id = 10;
  std::ostringstream log;
  run_crosstab("tests/fixtures/golden_normalized.tsv", filter,
               "tests/fixtures/catalog", ',', (dir / "table.tsv").string(), log);
  const ContingencyTable t = read_table_file((dir / "table.tsv").string());
  CHECK(t.col_labels == std::vector<std::string>{"Built-in electric hobs (7)"});
  CHECK(t.grand_total == 1);
}

TEST_CASE("cocluster and report run from files") {
  const fs::path dir = temp_dir("xshop_fit");
  FitConfig config;
  config.k = 7;
  config.l = 5;
  config.restarts = 5;
  std::ostringstream log;
  const BlockModel model = run_cocluster("tests/fixtures/table5.tsv", config,
                                         (dir / "model.txt").string(), log);
  CHECK(model.chi2 > 0.0);
  CHECK(log.str().find("chi2=") == 0);
  std::ostringstream log2;
  run_report((dir / "model.txt").string(), "tests/fixtures/table5.tsv",
             (dir / "report.txt").string(), log2);
  CHECK(slurp(dir / "report.txt").find("Confusion table") == 0);
}

TEST_CASE("cocluster on the fixture reproduces the frozen model file") {
  const fs::path dir = temp_dir("xshop_frozen");
  FitConfig config;
  config.k = 7;
  config.l = 5;
  config.restarts = 50;
  config.seed = 1;
  std::ostringstream log;
  run_cocluster("tests/fixtures/table5.tsv", config, (dir / "model.txt").string(),
                log);
  CHECK(slurp(dir / "model.txt") == slurp("tests/fixtures/model_table5.txt"));

  std::ostringstream log2;
  run_report((dir / "model.txt").string(), "tests/fixtures/table5.tsv",
             (dir / "report.txt").string(), log2);
  CHECK(slurp(dir / "report.txt") == slurp("tests/fixtures/report_table5.txt"));
}

TEST_CASE("synth is deterministic for a fixed seed") {
  const fs::path a = temp_dir("xshop_synth_a");
  const fs::path b = temp_dir("xshop_synth_b");
  SynthSpec spec;
  spec.n_users = 150;
  std::ostringstream log;
  const SynthOutcome oa = run_synth(spec, 42, a.string(), log);
  const SynthOutcome ob = run_synth(spec, 42, b.string(), log);
  CHECK(oa.requests == ob.requests);
  CHECK(oa.files == ob.files);
  check_trees_equal(a, b);

  const SynthOutcome oc = run_synth(spec, 43, (a / "other").string(), log);
  CHECK(slurp(a / "truth_groups.tsv") !=
        slurp(a / "other" / "truth_groups.tsv"));
  CHECK(oc.groups == oa.groups);
}

TEST_CASE("a multi-shop fraction of zero leaves every session alone") {
  const fs::path dir = temp_dir("xshop_single");
  SynthSpec spec;
  spec.n_users = 120;
  spec.multi_shop_fraction = 0.0;
  std::ostringstream log;
  run_synth(spec, 5, dir.string(), log);
  std::ostringstream log2;
  run_ingest(expand_glob((dir / "logs" / "*.csv").string()), IngestConfig{},
             (dir / "normalized.tsv").string(), log2);
  std::ostringstream log3;
  const SessionizeOutcome outcome =
      run_sessionize((dir / "normalized.tsv").string(), SessionizerConfig{},
                     (dir / "visits.tsv").string(), log3);
  CHECK(outcome.sessions == 120);
  CHECK(outcome.groups == 120);
  CHECK(outcome.reduction == 0.0);
}

TEST_CASE("file-level pipeline recovers the generator truth") {
  const fs::path dir = temp_dir("xshop_e2e");
  SynthSpec spec;
  spec.n_users = 300;
  std::ostringstream log;
  run_synth(spec, 12, dir.string(), log);
  run_ingest(expand_glob((dir / "logs" / "*.csv").string()), IngestConfig{},
             (dir / "normalized.tsv").string(), log);
  run_sessionize((dir / "normalized.tsv").string(), SessionizerConfig{},
                 (dir / "visits.tsv").string(), log);

  std::vector<std::vector<std::string>> recovered;
  std::ifstream visits(dir / "visits.tsv");
  std::string line;
  while (std::getline(visits, line)) {
    std::vector<std::string> sids;
    std::size_t start = line.find('\t', line.find('\t') + 1) + 1;
    const std::size_t end = line.find('\t', start);
    std::string field = line.substr(start, end - start);
    std::size_t pos = 0;
    while (true) {
      const std::size_t semi = field.find(';', pos);
      sids.push_back(field.substr(pos, semi == std::string::npos ? std::string::npos
                                                                 : semi - pos));
      if (semi == std::string::npos) break;
      pos = semi + 1;
    }
    recovered.push_back(std::move(sids));
  }
  std::vector<std::vector<std::string>> truth;
  std::ifstream truth_in(dir / "truth_groups.tsv");
  while (std::getline(truth_in, line)) {
    std::vector<std::string> sids;
    std::size_t pos = 0;
    while (true) {
      const std::size_t semi = line.find(';', pos);
      sids.push_back(line.substr(pos, semi == std::string::npos ? std::string::npos
                                                                : semi - pos));
      if (semi == std::string::npos) break;
      pos = semi + 1;
    }
    truth.push_back(std::move(sids));
  }
  CHECK(oracle::canonical(std::move(recovered)) == oracle::canonical(std::move(truth)));
}

#ifdef XSHOP_BIN_PATH
TEST_CASE("outputs are identical whatever the thread count") {
  const fs::path dir = temp_dir("xshop_threads");
  SynthSpec spec;
  spec.n_users = 250;
  std::ostringstream log;
  run_synth(spec, 9, dir.string(), log);

  auto run_with_threads = [&](int threads, const std::string& tag) {
    const std::string norm = (dir / ("n_" + tag + ".tsv")).string();
    const std::string visits = (dir / ("v_" + tag + ".tsv")).string();
    const std::string model = (dir / ("m_" + tag + ".txt")).string();
    const std::string env = "OMP_NUM_THREADS=" + std::to_string(threads) + " ";
    const std::string bin = XSHOP_BIN_PATH;
    REQUIRE(std::system((env + bin + " ingest '" + (dir / "logs" / "*.csv").string() +
                         "' -o " + norm + " >/dev/null")
                            .c_str()) == 0);
    REQUIRE(std::system(
                (env + bin + " sessionize " + norm + " -o " + visits + " >/dev/null")
                    .c_str()) == 0);
    REQUIRE(std::system((env + bin + " cocluster tests/fixtures/table5.tsv -o " +
                         model + " -k 7 -l 5 --restarts 50 --seed 1 >/dev/null")
                            .c_str()) == 0);
  };
  run_with_threads(1, "one");
  run_with_threads(3, "three");
  CHECK(slurp(dir / "n_one.tsv") == slurp(dir / "n_three.tsv"));
  CHECK(slurp(dir / "v_one.tsv") == slurp(dir / "v_three.tsv"));
  CHECK(slurp(dir / "m_one.txt") == slurp(dir / "m_three.txt"));
  CHECK(slurp(dir / "m_one.txt") == slurp("tests/fixtures/model_table5.txt"));
}

TEST_CASE("the CLI maps errors to the documented exit codes") {
  const fs::path dir = temp_dir("xshop_cli");
  const std::string out = (dir / "out.tsv").string();

  CHECK(run_cli("ingest tests/fixtures/raw_a.csv -o " + out) == 0);
  // empty glob is a usage/path error
  CHECK(run_cli("ingest 'tests/fixtures/none_*.csv' -o " + out) == 2);
  // lenient mode skips and counts the bad line
  CHECK(run_cli("ingest tests/fixtures/raw_bad.csv -o " + out) == 0);
  // strict mode turns it into a data error
  CHECK(run_cli("ingest --strict tests/fixtures/raw_bad.csv -o " + out) == 1);
  // unknown subcommand is a usage error
  CHECK(run_cli("frobnicate") == 2);
  // missing required option
  CHECK(run_cli("cocluster tests/fixtures/table5.tsv -o " + out) == 2);
  // a damaged table is a data error
  std::ofstream(dir / "garbage.tsv") << "not\ta\ttable\n";
  CHECK(run_cli("cocluster " + (dir / "garbage.tsv").string() + " -o " + out +
                " -k 2 -l 2") == 1);
  // infeasible clustering request on a valid table
  CHECK(run_cli("cocluster tests/fixtures/table5.tsv -o " + out + " -k 9 -l 2") == 1);
}

TEST_CASE("the CLI pipeline reproduces the documented sessionize summary") {
  const fs::path dir = temp_dir("xshop_cli_sum");
  const std::string norm = (dir / "n.tsv").string();
  REQUIRE(run_cli("ingest tests/fixtures/raw_a.csv -o " + norm) == 0);
  const std::string cmd = std::string(XSHOP_BIN_PATH) + " sessionize " + norm +
                          " -o " + (dir / "v.tsv").string() + " > " +
                          (dir / "stdout.txt").string();
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(slurp(dir / "stdout.txt") == "sessions=2 groups=1 reduction=50.00%\n");
}
#endif
