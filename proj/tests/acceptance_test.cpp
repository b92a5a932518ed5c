// Apache License, Version 2.0, refer to LICENSE.txt
//
// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the process exits non-zero if any criterion fails. argv[1] must name the
// tripclust binary (used by the byte-determinism criterion).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include <unistd.h>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tripclust/corpus.hpp"
#include "tripclust/generator.hpp"
#include "tripclust/graphs.hpp"
#include "tripclust/metrics.hpp"
#include "tripclust/rng.hpp"
#include "tripclust/sampler.hpp"
#include "tripclust/weights.hpp"

using namespace tripclust;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string format(const char* fmt, ...) {
  char buffer[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buffer, sizeof buffer, fmt, args);
  va_end(args);
  return buffer;
}

// ---------------------------------------------------------------------------
// Criterion 1: the likelihood part of each weight equals the oracle ratio on
// a randomized family of tiny corpora.
Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  double max_err = 0.0;
  long comparisons = 0;

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto rng = make_substream(seed, "acceptance.oracle");
    const int m = 1 + static_cast<int>(uniform_below(rng, 5));
    std::array<std::int32_t, kNumDims> sizes;
    std::array<std::vector<std::string>, kNumDims> labels;
    const char* prefix[kNumDims] = {"o", "d", "t"};
    for (int d = 0; d < kNumDims; ++d) {
      sizes[d] = 1 + static_cast<std::int32_t>(uniform_below(rng, 3));
      for (std::int32_t w = 0; w < sizes[d]; ++w)
        labels[d].push_back(prefix[d] + std::to_string(w));
    }
    const VocabularySpec vocab = VocabularySpec::from_labels(labels);

    std::vector<TripRecord> records;
    for (int u = 0; u < m; ++u) {
      const int trips = 1 + static_cast<int>(uniform_below(rng, 3));
      for (int i = 0; i < trips; ++i) {
        records.push_back(TripRecord{
            "p" + std::to_string(u), labels[kOrigin][uniform_below(rng, sizes[kOrigin])],
            labels[kDestination][uniform_below(rng, sizes[kDestination])],
            labels[kTime][uniform_below(rng, sizes[kTime])]});
      }
    }
    const Corpus corpus = ingest_trips(records, &vocab);

    Hyperparams hyper;
    hyper.alpha = 0.05 + 0.4 * uniform_unit(rng);
    for (int d = 0; d < kNumDims; ++d) hyper.beta[d] = 0.05 + 2.5 * uniform_unit(rng);

    std::vector<std::int32_t> assignment(m);
    for (int u = 0; u < m; ++u)
      assignment[u] = static_cast<std::int32_t>(uniform_below(rng, m));

    for (std::int32_t u = 0; u < m; ++u) {
      std::vector<std::int32_t> base = assignment;
      base[u] = -1;
      const double oracle_base = oracle_log_marginal(corpus, base, hyper);

      std::set<std::int32_t> live(base.begin(), base.end());
      live.erase(-1);
      for (std::int32_t z : live) {
        ClusterStats minus_u(corpus.vocab.sizes());
        for (std::int32_t v = 0; v < m; ++v) {
          if (v != u && base[v] == z) minus_u.add_doc(corpus.docs[v]);
        }
        std::vector<std::int32_t> joined = base;
        joined[u] = z;
        const double direct = log_likelihood_existing(corpus.docs[u], minus_u, hyper);
        const double via_oracle = oracle_log_marginal(corpus, joined, hyper) - oracle_base;
        max_err = std::max(max_err, std::abs(direct - via_oracle));
        ++comparisons;
      }

      std::vector<std::int32_t> alone = base;
      alone[u] = m + 1;  // unused label = a fresh singleton cluster
      const double direct = log_likelihood_new(corpus.docs[u], corpus.vocab.sizes(), hyper);
      const double via_oracle = oracle_log_marginal(corpus, alone, hyper) - oracle_base;
      max_err = std::max(max_err, std::abs(direct - via_oracle));
      ++comparisons;
    }
  }
  const double elapsed = seconds_since(t0);
  return {max_err <= 1e-10 && elapsed < 10.0,
          format("%ld ratios, max |err| %.2e, %.2f s", comparisons, max_err, elapsed)};
}

// ---------------------------------------------------------------------------
// Criterion 2: empirical choose_cluster frequencies match the analytically
// normalized weights, expected values derived through the oracle.
Outcome sampler_conditional() {
  const VocabularySpec vocab = VocabularySpec::from_labels({{{"A", "B"}, {"X", "Y"},
                                                             {"08", "09"}}});
  std::string detail;

  // Worked two-passenger case: P(existing) = 64/91.
  {
    const std::vector<TripRecord> records = {TripRecord{"p1", "A", "X", "08"},
                                             TripRecord{"p2", "A", "X", "08"}};
    const Corpus corpus = ingest_trips(records, &vocab);
    Hyperparams hyper;
    hyper.mode = Mode::dpmm;
    hyper.alpha = 1.0;
    hyper.beta = {1.0, 1.0, 1.0};
    hyper.min_cluster_size = 0;
    hyper.seed = 2024;
    SamplerState state = SamplerState::init(corpus, hyper);
    state.kick_out(corpus, 0);
    int existing = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) existing += state.choose_cluster(corpus, 0) == 0;
    const double freq = static_cast<double>(existing) / draws;
    const double expect = 64.0 / 91.0;
    if (std::abs(freq - expect) > 0.01)
      return {false, format("two-passenger case: freq %.4f vs %.4f", freq, expect)};
    detail = format("64/91 case %.4f", freq);
  }

  // Three passengers, two live clusters plus the new-cluster option.
  {
    const std::vector<TripRecord> records = {
        TripRecord{"p1", "A", "X", "08"}, TripRecord{"p2", "A", "X", "08"},
        TripRecord{"p2", "B", "X", "09"}, TripRecord{"p3", "B", "Y", "09"}};
    const Corpus corpus = ingest_trips(records, &vocab);
    Hyperparams hyper;
    hyper.mode = Mode::dpmm;
    hyper.alpha = 0.8;
    hyper.beta = {0.6, 1.0, 1.4};
    hyper.min_cluster_size = 0;
    hyper.seed = 55;
    SamplerState state = SamplerState::init(corpus, hyper);
    state.kick_out(corpus, 1);
    state.merge(corpus, 1, 1);
    state.kick_out(corpus, 2);
    state.merge(corpus, 2, 2);
    state.kick_out(corpus, 0);  // candidates: cluster 1, cluster 2, new

    // Expected posterior via the oracle route.
    const std::vector<std::int32_t> base = {-1, 1, 2};
    const double oracle_base = oracle_log_marginal(corpus, base, hyper);
    const double denom_prior = 2.0 + hyper.alpha;  // M - 1 + alpha
    std::vector<double> weights;
    for (std::int32_t z : {1, 2}) {
      std::vector<std::int32_t> joined = base;
      joined[0] = z;
      weights.push_back((1.0 / denom_prior) *
                        std::exp(oracle_log_marginal(corpus, joined, hyper) - oracle_base));
    }
    std::vector<std::int32_t> alone = base;
    alone[0] = 9;
    weights.push_back((hyper.alpha / denom_prior) *
                      std::exp(oracle_log_marginal(corpus, alone, hyper) - oracle_base));
    const double total = weights[0] + weights[1] + weights[2];

    int counts[3] = {0, 0, 0};
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
      const std::uint32_t pick = state.choose_cluster(corpus, 0);
      if (pick == 1) ++counts[0];
      else if (pick == 2) ++counts[1];
      else ++counts[2];
    }
    for (int i = 0; i < 3; ++i) {
      const double freq = static_cast<double>(counts[i]) / draws;
      const double expect = weights[i] / total;
      if (std::abs(freq - expect) > 0.01)
        return {false, format("three-passenger case option %d: freq %.4f vs %.4f", i, freq,
                              expect)};
    }
    detail += format("; 3-passenger max dev %.4f",
                     std::max({std::abs(counts[0] / 1e5 - weights[0] / total),
                               std::abs(counts[1] / 1e5 - weights[1] / total),
                               std::abs(counts[2] / 1e5 - weights[2] / total)}));
  }
  return {true, detail};
}

// ---------------------------------------------------------------------------
// Criterion 3: recovery of four well-separated synthetic clusters.
Outcome synthetic_recovery() {
  int dpmm_ok = 0, dmm_ok = 0;
  double worst_fit_seconds = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GeneratorConfig config = separated_clusters_recipe();
    config.num_passengers = 500;
    config.seed = 1000 + seed;
    const SyntheticCorpus synthetic = sample_corpus(config);

    Hyperparams hyper;
    hyper.alpha = 0.01;
    hyper.beta = {0.1, 0.1, 0.1};
    hyper.min_cluster_size = 10;
    hyper.max_iter = 30;
    hyper.seed = seed;

    {
      Hyperparams dpmm = hyper;
      dpmm.mode = Mode::dpmm;
      const auto t0 = std::chrono::steady_clock::now();
      const ClusteringResult result = fit(synthetic.corpus, dpmm);
      worst_fit_seconds = std::max(worst_fit_seconds, seconds_since(t0));
      const double score = nmi(result.assignments, synthetic.true_labels);
      if (result.num_clusters >= 3 && result.num_clusters <= 5 && score >= 0.9) ++dpmm_ok;
    }
    {
      Hyperparams dmm = hyper;
      dmm.mode = Mode::dmm;
      dmm.initial_clusters = 10;
      const auto t0 = std::chrono::steady_clock::now();
      const ClusteringResult result = fit(synthetic.corpus, dmm);
      worst_fit_seconds = std::max(worst_fit_seconds, seconds_since(t0));
      const double score = nmi(result.assignments, synthetic.true_labels);
      if (result.num_clusters <= 6 && score >= 0.9) ++dmm_ok;
    }
  }
  return {dpmm_ok >= 8 && dmm_ok >= 8 && worst_fit_seconds < 60.0,
          format("dpmm %d/10, dmm %d/10, worst fit %.1f s", dpmm_ok, dmm_ok,
                 worst_fit_seconds)};
}

// ---------------------------------------------------------------------------
// Criterion 4: structural invariants survive 10^4 randomized
// kick/choose/merge cycles.
Outcome invariant_fuzz() {
  long cycles_done = 0;
  for (int round = 0; round < 2; ++round) {
    GeneratorConfig config;
    config.num_passengers = 40;
    config.trip_law = GeneratorConfig::TripLaw::shifted_poisson;
    config.trips_mean = 4.0;
    config.vocab_sizes = {5, 4, 6};
    config.num_components = 3;
    config.seed = 400 + round;
    const Corpus corpus = sample_corpus(config).corpus;

    Hyperparams hyper;
    hyper.mode = round == 0 ? Mode::dpmm : Mode::dmm;
    hyper.initial_clusters = round == 0 ? 1 : 8;
    hyper.alpha = 0.4;
    hyper.beta = {0.3, 0.3, 0.3};
    hyper.min_cluster_size = 0;
    hyper.seed = 41 + round;
    SamplerState state = SamplerState::init(corpus, hyper);

    auto pick_rng = make_substream(71 + round, "acceptance.fuzz");
    for (int cycle = 0; cycle < 5000; ++cycle) {
      const auto u = static_cast<std::int32_t>(uniform_below(pick_rng, 40));
      state.kick_out(corpus, u);
      const std::uint32_t z = state.choose_cluster(corpus, u);
      state.merge(corpus, u, z);
      try {
        state.validate(corpus);
      } catch (const CorruptStatsError& e) {
        return {false, format("cycle %d (%s): %s", cycle, round == 0 ? "dpmm" : "dmm",
                              e.what())};
      }
      ++cycles_done;
    }
  }
  return {cycles_done == 10000, format("%ld cycles validated", cycles_done)};
}

// ---------------------------------------------------------------------------
// Criterion 5: disband-and-relocate contract on randomized states.
Outcome disband_contract() {
  int trials = 0, disbanded_total = 0;
  for (int r : {2, 3, 5}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      GeneratorConfig config;
      config.num_passengers = 36;
      config.trip_law = GeneratorConfig::TripLaw::shifted_poisson;
      config.trips_mean = 3.0;
      config.vocab_sizes = {4, 4, 5};
      config.num_components = 4;
      config.seed = 500 + seed;
      const Corpus corpus = sample_corpus(config).corpus;

      Hyperparams hyper;
      hyper.mode = Mode::dpmm;
      hyper.alpha = 2.0;  // encourage several clusters, some small
      hyper.beta = {0.3, 0.3, 0.3};
      hyper.min_cluster_size = r;
      hyper.seed = 600 + seed + 31 * r;
      SamplerState state = SamplerState::init(corpus, hyper);
      for (int sweep = 0; sweep < 3; ++sweep) state.sweep(corpus);

      const std::size_t ids_before = state.clusters().size();
      const auto assignments_before = state.assignments();
      const DisbandReport report = state.disband_and_relocate(corpus);
      ++trials;
      disbanded_total += report.disbanded_clusters;

      if (state.clusters().size() != ids_before)
        return {false, "cluster id allocated during phase 3"};
      try {
        state.validate(corpus);
      } catch (const CorruptStatsError& e) {
        return {false, format("membership not conserved: %s", e.what())};
      }
      if (report.no_surviving_cluster) {
        if (state.assignments() != assignments_before)
          return {false, "state changed despite no surviving cluster"};
        continue;
      }
      for (std::uint32_t z : state.live()) {
        if (state.clusters()[z].members < r)
          return {false, format("survivor below r=%d after relocation", r)};
      }
    }
  }
  if (disbanded_total == 0) return {false, "fuzz never disbanded anything"};
  return {true, format("%d trials, %d clusters disbanded", trials, disbanded_total)};
}

// ---------------------------------------------------------------------------
// Criterion 6: the dmm cluster-count trace is non-increasing.
Outcome dmm_monotone() {
  int checked = 0;
  for (std::uint64_t c = 0; c < 20; ++c) {
    GeneratorConfig config;
    config.num_passengers = 60;
    config.trip_law = GeneratorConfig::TripLaw::shifted_poisson;
    config.trips_mean = 5.0;
    config.vocab_sizes = {static_cast<std::int32_t>(3 + c % 6),
                          static_cast<std::int32_t>(3 + (c / 2) % 5),
                          static_cast<std::int32_t>(4 + c % 4)};
    config.num_components = 5;
    config.alpha = 1.0;
    config.beta = {0.5, 0.5, 0.5};
    config.seed = 700 + c;
    const Corpus corpus = sample_corpus(config).corpus;

    for (int k0 : {5, 20, 50}) {
      Hyperparams hyper;
      hyper.mode = Mode::dmm;
      hyper.initial_clusters = k0;
      hyper.alpha = 0.05;
      hyper.beta = {0.2, 0.2, 0.2};
      hyper.min_cluster_size = 0;
      hyper.max_iter = 10;
      hyper.seed = 800 + c * 3 + k0;
      const ClusteringResult result = fit(corpus, hyper);
      for (std::size_t i = 1; i < result.trace.size(); ++i) {
        if (result.trace[i].num_clusters > result.trace[i - 1].num_clusters)
          return {false, format("K rose at corpus %llu, K0=%d, iter %zu",
                                static_cast<unsigned long long>(c), k0, i)};
      }
      ++checked;
    }
  }
  return {true, format("%d traces non-increasing", checked)};
}

// ---------------------------------------------------------------------------
// Criterion 7: metric fixtures and RS range/monotonicity.
Outcome metrics_fixtures() {
  PassengerVectors toy;
  toy.ambient_dim = 1;
  for (double v : {0.0, 1.0, 10.0, 11.0}) {
    SparseVector row;
    if (v != 0.0) row.items.emplace_back(0, v);
    toy.rows.push_back(std::move(row));
  }
  const std::vector<std::int32_t> assignment = {0, 0, 1, 1};

  const double rmsstd_value = rmsstd(toy, assignment);
  const double rs_value = rs(toy, assignment);
  const double ch_value = ch_index(toy, assignment);
  if (std::abs(rmsstd_value - 0.7071067811865476) > 1e-6)
    return {false, format("rmsstd %.8f", rmsstd_value)};
  if (std::abs(rs_value - 100.0 / 101.0) > 1e-6) return {false, format("rs %.8f", rs_value)};
  if (std::abs(ch_value - 100.0) > 1e-6) return {false, format("ch %.8f", ch_value)};

  // RS stays in [0, 1] on random data.
  auto rng = make_substream(900, "acceptance.rs");
  int rs_checked = 0, nested_checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    PassengerVectors vectors;
    vectors.ambient_dim = 12;
    const int m = 3 + static_cast<int>(uniform_below(rng, 20));
    std::vector<std::int32_t> coarse(m);
    for (int u = 0; u < m; ++u) {
      SparseVector row;
      const int nz = 1 + static_cast<int>(uniform_below(rng, 4));
      for (int i = 0; i < nz; ++i)
        row.items.emplace_back(uniform_below(rng, 12),
                               1.0 + static_cast<double>(uniform_below(rng, 5)));
      std::sort(row.items.begin(), row.items.end());
      row.items.erase(
          std::unique(row.items.begin(), row.items.end(),
                      [](const auto& a, const auto& b) { return a.first == b.first; }),
          row.items.end());
      vectors.rows.push_back(std::move(row));
      coarse[u] = static_cast<std::int32_t>(uniform_below(rng, 3));
    }
    double rs_coarse;
    try {
      rs_coarse = rs(vectors, coarse);
    } catch (const UndefinedError&) {
      continue;
    }
    if (rs_coarse < 0.0 || rs_coarse > 1.0)
      return {false, format("rs out of range: %.6f", rs_coarse)};
    ++rs_checked;

    std::vector<std::int32_t> fine = coarse;
    for (int u = 0; u < m; ++u) {
      if (fine[u] == 0 && u % 2 == 0) fine[u] = 4;
    }
    const double rs_fine = rs(vectors, fine);
    if (rs_fine < rs_coarse - 1e-12)
      return {false, format("refinement decreased rs: %.8f -> %.8f", rs_coarse, rs_fine)};
    ++nested_checked;
  }
  return {true, format("fixtures exact; %d range checks, %d nested refinements", rs_checked,
                       nested_checked)};
}

// ---------------------------------------------------------------------------
// Criterion 8: community detection matches exhaustive search on small graphs.
void enumerate_partitions(int n, const std::function<void(const std::vector<std::int32_t>&)>& fn) {
  std::vector<std::int32_t> labels(n, 0);
  std::function<void(int, int)> recurse = [&](int i, int max_label) {
    if (i == n) {
      fn(labels);
      return;
    }
    for (int l = 0; l <= max_label + 1; ++l) {
      labels[i] = l;
      recurse(i + 1, std::max(max_label, l));
    }
  };
  recurse(1, 0);
}

Outcome community_fixtures() {
  using Edge = std::pair<std::int32_t, std::int32_t>;
  struct Fixture {
    const char* name;
    std::int32_t n;
    std::vector<Edge> edges;
  };
  const std::vector<Fixture> fixtures = {
      {"two triangles + bridge", 6,
       {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}}},
      {"path P5", 5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}},
      {"cycle C6", 6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}}},
      {"complete K5", 5,
       {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}},
      {"star S6", 6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}}},
      {"two disconnected triangles", 6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}}},
      {"single edge", 2, {{0, 1}}},
      {"barbell K4-K4", 8,
       {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}, {4, 5}, {4, 6}, {4, 7}, {5, 6},
        {5, 7}, {6, 7}, {3, 4}}},
  };

  auto rng = make_substream(42, "acceptance.communities");
  std::string detail;
  for (const Fixture& fixture : fixtures) {
    const StationGraph graph = StationGraph::from_edges(fixture.n, fixture.edges);
    double best = -1.0;
    enumerate_partitions(fixture.n, [&](const std::vector<std::int32_t>& partition) {
      best = std::max(best, modularity(graph, partition));
    });
    const auto [partition, q] = detect_communities(graph, rng);
    if (std::abs(q - best) > 1e-9)
      return {false, format("%s: detected Q %.6f vs optimum %.6f", fixture.name, q, best)};

    if (std::string(fixture.name) == "two triangles + bridge") {
      const double expect = 6.0 / 7.0 - 0.5;
      if (std::abs(q - expect) > 1e-9)
        return {false, format("bridge fixture Q %.9f vs %.9f", q, expect)};
      if (partition.num_communities != 2 || partition.community[0] != partition.community[2] ||
          partition.community[3] != partition.community[5] ||
          partition.community[0] == partition.community[3])
        return {false, "bridge fixture did not split into the two triangles"};
    }
  }
  return {true, format("%zu fixtures at the exhaustive optimum", fixtures.size())};
}

// ---------------------------------------------------------------------------
// Criterion 9: per-sweep cost scales linearly in M; a 10k-passenger fit
// finishes well inside the budget.
Outcome performance_scaling() {
  const auto sweep_time = [](std::int64_t m, int& k_out) {
    GeneratorConfig config = separated_clusters_recipe();
    config.num_passengers = m;
    config.seed = 90;
    const SyntheticCorpus synthetic = sample_corpus(config);
    Hyperparams hyper;
    hyper.mode = Mode::dpmm;
    hyper.alpha = 0.01;
    hyper.beta = {0.1, 0.1, 0.1};
    hyper.min_cluster_size = 10;
    hyper.seed = 91;
    SamplerState state = SamplerState::init(synthetic.corpus, hyper);
    state.sweep(synthetic.corpus);  // warm-up while K settles
    state.sweep(synthetic.corpus);
    const auto t0 = std::chrono::steady_clock::now();
    constexpr int kTimedSweeps = 5;
    for (int i = 0; i < kTimedSweeps; ++i) state.sweep(synthetic.corpus);
    k_out = state.num_live();
    return seconds_since(t0) / kTimedSweeps;
  };

  int k_small = 0, k_large = 0;
  const double t_small = sweep_time(10000, k_small);
  const double t_large = sweep_time(20000, k_large);
  const double ratio = t_large / t_small;

  GeneratorConfig config = separated_clusters_recipe();
  config.num_passengers = 10000;
  config.seed = 92;
  const SyntheticCorpus synthetic = sample_corpus(config);
  Hyperparams hyper;
  hyper.mode = Mode::dpmm;
  hyper.alpha = 0.01;
  hyper.beta = {0.1, 0.1, 0.1};
  hyper.min_cluster_size = 10;
  hyper.max_iter = 20;
  hyper.seed = 93;
  const auto t0 = std::chrono::steady_clock::now();
  const ClusteringResult result = fit(synthetic.corpus, hyper);
  const double fit_seconds = seconds_since(t0);

  return {ratio >= 1.5 && ratio <= 2.5 && fit_seconds < 300.0,
          format("sweep ratio %.2f (K %d vs %d), 20-sweep fit of M=10000: %.1f s (K=%d)",
                 ratio, k_small, k_large, fit_seconds, result.num_clusters)};
}

// ---------------------------------------------------------------------------
// Criterion 10: identical config + seed give byte-identical CLI outputs.
std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_determinism(const std::string& binary) {
  if (binary.empty()) return {false, "tripclust binary path not supplied"};

  const fs::path root = fs::temp_directory_path() /
                        ("tripclust_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(root);
  const auto run = [&](const std::string& args) {
    const std::string cmd = binary + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };

  Outcome outcome{false, ""};
  const std::string data = (root / "data").string();
  if (run("generate --out " + data + " --passengers 200 --seed 42") != 0) {
    outcome.detail = "generate failed";
  } else {
    const std::string fit_args =
        "fit --trips " + data + "/trips.csv --mode dpmm --alpha 0.01 --beta 0.1 "
        "--min-cluster-size 10 --iters 10 --seed 5 --out ";
    const std::string fit_a = (root / "fit_a").string();
    const std::string fit_b = (root / "fit_b").string();
    if (run(fit_args + fit_a) != 0 || run(fit_args + fit_b) != 0) {
      outcome.detail = "fit failed";
    } else {
      const bool assignments_equal =
          slurp(fit_a + "/assignments.csv") == slurp(fit_b + "/assignments.csv");
      const bool results_equal = slurp(fit_a + "/result.json") == slurp(fit_b + "/result.json");
      const bool nonempty = !slurp(fit_a + "/assignments.csv").empty();
      outcome.pass = assignments_equal && results_equal && nonempty;
      outcome.detail = format("assignments %s, result.json %s",
                              assignments_equal ? "identical" : "DIFFER",
                              results_equal ? "identical" : "DIFFER");
    }
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  return outcome;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string binary = argc > 1 ? argv[1] : "";
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "oracle equivalence of weight likelihoods", oracle_equivalence},
      {2, "sampler conditional frequencies", sampler_conditional},
      {3, "synthetic four-cluster recovery", synthetic_recovery},
      {4, "structural invariants under fuzz", invariant_fuzz},
      {5, "disband-and-relocate contract", disband_contract},
      {6, "dmm cluster-count monotonicity", dmm_monotone},
      {7, "internal metric fixtures", metrics_fixtures},
      {8, "community detection optimality", community_fixtures},
      {9, "linear per-sweep scaling", performance_scaling},
      {10, "byte-identical reruns", [&] { return cli_determinism(binary); }},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %2d: %s (%s)\n", outcome.pass ? "PASS" : "FAIL", criterion.id,
                criterion.name, outcome.detail.c_str());
    std::fflush(stdout);
    failures += !outcome.pass;
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
