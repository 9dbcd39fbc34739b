// Compares the OpenMP kernels against their serial references on a synthetic
// workload and reports wall-clock timings. The outputs must agree exactly;
// the speedup column is what varies with the machine.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

#include "xshop/aggregate.hpp"
#include "xshop/cocluster.hpp"
#include "xshop/rng.hpp"
#include "xshop/sessionize.hpp"
#include "xshop/synth.hpp"

using namespace xshop;

namespace {

double seconds_of(const std::function<void()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

void report(const char* name, double serial, double parallel, bool agree) {
  std::printf("%-22s serial %8.3fs   openmp %8.3fs   speedup %5.2fx   %s\n", name,
              serial, parallel, serial / parallel, agree ? "outputs equal" : "MISMATCH");
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());

  // ---- session stitching --------------------------------------------------
  SynthSpec spec;
  spec.n_users = 20000;
  spec.duration_days = 24;
  const SynthResult synth = synthesize(spec, 1);
  IngestConfig config;
  std::vector<NormalizedRequest> stream;
  stream.reserve(synth.requests.size());
  for (const RawRequest& r : synth.requests) stream.push_back(normalize(r, config));
  std::printf("workload: %zu requests, %zu users\n", stream.size(), spec.n_users);

  SessionizeResult groups_serial, groups_parallel;
  const double t_sess_serial = seconds_of([&] {
    groups_serial = reference::group_sessions_serial(stream, SessionizerConfig{});
  });
  const double t_sess_parallel =
      seconds_of([&] { groups_parallel = group_sessions(stream, SessionizerConfig{}); });
  bool sess_equal = groups_serial.groups.size() == groups_parallel.groups.size();
  for (std::size_t i = 0; sess_equal && i < groups_serial.groups.size(); ++i)
    sess_equal = groups_serial.groups[i].session_ids ==
                 groups_parallel.groups[i].session_ids;
  report("group_sessions", t_sess_serial, t_sess_parallel, sess_equal);

  // ---- crosstab aggregation -----------------------------------------------
  CrosstabFilter filter;
  filter.shop_id = spec.tally_shop_id;
  ContingencyTable tab_serial, tab_parallel;
  CrosstabStats stats_a, stats_b;
  const double t_tab_serial = seconds_of([&] {
    tab_serial = reference::build_crosstab_serial(stream, filter, Catalog{}, stats_a);
  });
  const double t_tab_parallel = seconds_of(
      [&] { tab_parallel = build_crosstab(stream, filter, Catalog{}, stats_b); });
  report("build_crosstab", t_tab_serial, t_tab_parallel, tab_serial == tab_parallel);

  // ---- crossed clustering --------------------------------------------------
  Rng rng(7);
  Grid g(168, 200);
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j)
      g.at(i, j) = rng.below(40) + (rng.below(7) == (j % 7) ? 60 : 0);
  std::vector<std::string> rl, cl;
  for (std::size_t i = 0; i < g.rows(); ++i) rl.push_back("r" + std::to_string(i));
  for (std::size_t j = 0; j < g.cols(); ++j) cl.push_back("c" + std::to_string(j));
  const ContingencyTable table = make_table(rl, cl, std::move(g));
  FitConfig fit_config;
  fit_config.k = 7;
  fit_config.l = 5;
  fit_config.restarts = 16;
  fit_config.seed = 3;

  BlockModel model_serial, model_parallel;
  const double t_fit_serial =
      seconds_of([&] { model_serial = reference::fit_serial(table, fit_config); });
  const double t_fit_parallel =
      seconds_of([&] { model_parallel = fit(table, fit_config); });
  report("fit (16 restarts)", t_fit_serial, t_fit_parallel,
         model_serial == model_parallel);
  std::printf("fit chi2 %.6f after %zu iterations\n", model_parallel.chi2,
              model_parallel.iterations);
  return 0;
}
