// Apache License, Version 2.0, refer to LICENSE.txt
//
// Compares the serial reference kernels against their OpenMP twins and
// reports sweep throughput at two corpus sizes. Results must match exactly;
// the bench aborts if they do not.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "tripclust/generator.hpp"
#include "tripclust/graphs.hpp"
#include "tripclust/metrics.hpp"
#include "tripclust/parallel.hpp"
#include "tripclust/rng.hpp"
#include "tripclust/sampler.hpp"
#include "tripclust/weights.hpp"

using namespace tripclust;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename F>
double time_best_of(int reps, F&& body) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-28s serial %8.3f ms   parallel %8.3f ms   speedup %5.2fx\n", name,
              serial * 1e3, parallel * 1e3, serial / parallel);
}

void bench_weights() {
  GeneratorConfig config = separated_clusters_recipe();
  config.num_passengers = 256;
  config.seed = 11;
  const SyntheticCorpus synthetic = sample_corpus(config);
  const Corpus& corpus = synthetic.corpus;

  Hyperparams hyper;
  hyper.alpha = 0.5;
  hyper.beta = {0.1, 0.1, 0.1};

  for (int k : {64, 256, 1024}) {
    std::vector<ClusterStats> clusters(k, ClusterStats(corpus.vocab.sizes()));
    std::vector<std::uint32_t> ids(k);
    for (int z = 0; z < k; ++z) {
      ids[z] = static_cast<std::uint32_t>(z);
      for (int rep = 0; rep < 4; ++rep)
        clusters[z].add_doc(corpus.docs[(z * 7 + rep) % corpus.docs.size()]);
    }
    std::vector<double> out_serial(k), out_parallel(k);
    const auto run = [&](Execution exec, std::vector<double>& out) {
      for (const PassengerDoc& doc : corpus.docs)
        batch_log_weights(doc, clusters, ids, hyper, corpus.num_passengers(), 0, out, exec);
    };
    const double t_serial = time_best_of(3, [&] { run(Execution::serial, out_serial); });
    const double t_parallel = time_best_of(3, [&] { run(Execution::parallel, out_parallel); });
    if (out_serial != out_parallel) {
      std::fprintf(stderr, "FATAL: weight kernels disagree at K=%d\n", k);
      std::exit(1);
    }
    char name[64];
    std::snprintf(name, sizeof name, "weights K=%d", k);
    report(name, t_serial, t_parallel);
  }
}

void bench_metrics() {
  GeneratorConfig config = separated_clusters_recipe();
  config.num_passengers = 20000;
  config.seed = 12;
  const SyntheticCorpus synthetic = sample_corpus(config);

  const PassengerVectors serial_vectors = vectorize(synthetic.corpus, false, Execution::serial);
  const PassengerVectors parallel_vectors =
      vectorize(synthetic.corpus, false, Execution::parallel);
  for (std::size_t u = 0; u < serial_vectors.rows.size(); ++u) {
    if (serial_vectors.rows[u].items != parallel_vectors.rows[u].items) {
      std::fprintf(stderr, "FATAL: vectorize kernels disagree\n");
      std::exit(1);
    }
  }

  double ch_serial = 0.0, ch_parallel = 0.0;
  const double t_serial = time_best_of(3, [&] {
    ch_serial = ch_index(serial_vectors, synthetic.true_labels, false, Execution::serial);
  });
  const double t_parallel = time_best_of(3, [&] {
    ch_parallel = ch_index(serial_vectors, synthetic.true_labels, false, Execution::parallel);
  });
  if (ch_serial != ch_parallel) {
    std::fprintf(stderr, "FATAL: scatter kernels disagree\n");
    std::exit(1);
  }
  report("metrics scatter M=20000", t_serial, t_parallel);
}

void bench_hop_graph() {
  const std::int32_t n = 2000;
  auto rng = make_substream(13, "bench.graph");
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  for (std::int32_t v = 1; v < n; ++v)
    edges.emplace_back(v, static_cast<std::int32_t>(uniform_below(rng, v)));
  for (int extra = 0; extra < 3 * n; ++extra) {
    const auto a = static_cast<std::int32_t>(uniform_below(rng, n));
    const auto b = static_cast<std::int32_t>(uniform_below(rng, n));
    if (a != b) edges.emplace_back(a, b);
  }

  StationGraph serial_graph, parallel_graph;
  const double t_serial =
      time_best_of(3, [&] { serial_graph = build_hop_graph(n, edges, 4, Execution::serial); });
  const double t_parallel = time_best_of(
      3, [&] { parallel_graph = build_hop_graph(n, edges, 4, Execution::parallel); });
  if (serial_graph.neighbors != parallel_graph.neighbors) {
    std::fprintf(stderr, "FATAL: hop-graph kernels disagree\n");
    std::exit(1);
  }
  report("hop graph n=2000 h=4", t_serial, t_parallel);
}

void bench_sweep_scaling() {
  for (std::int64_t m : {10000, 20000}) {
    GeneratorConfig config = separated_clusters_recipe();
    config.num_passengers = m;
    config.seed = 14;
    const SyntheticCorpus synthetic = sample_corpus(config);

    Hyperparams hyper;
    hyper.mode = Mode::dpmm;
    hyper.alpha = 0.01;
    hyper.beta = {0.1, 0.1, 0.1};
    hyper.seed = 14;
    SamplerState state = SamplerState::init(synthetic.corpus, hyper);
    state.sweep(synthetic.corpus);  // let K grow off the single-cluster start
    state.sweep(synthetic.corpus);

    const auto t0 = std::chrono::steady_clock::now();
    constexpr int kTimedSweeps = 3;
    for (int i = 0; i < kTimedSweeps; ++i) state.sweep(synthetic.corpus);
    std::printf("sweep M=%-6lld K=%-3d  %8.3f ms/sweep\n", static_cast<long long>(m),
                state.num_live(), seconds_since(t0) / kTimedSweeps * 1e3);
  }
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", max_threads());
  bench_weights();
  bench_metrics();
  bench_hop_graph();
  bench_sweep_scaling();
  return 0;
}
