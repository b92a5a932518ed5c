// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "tripclust/weights.hpp"

namespace tripclust {

struct TraceEntry {
  int iteration = 0;          // 0 = state right after initialization
  int num_clusters = 0;       // live (non-empty) clusters
  std::vector<std::int64_t> sizes;  // live cluster sizes, ascending cluster id

  bool operator==(const TraceEntry&) const = default;
};

struct DisbandReport {
  int disbanded_clusters = 0;
  std::int64_t relocated_members = 0;
  bool no_surviving_cluster = false;  // all clusters were below r; nothing was disbanded
};

// Mutable collapsed-Gibbs state. Cluster ids are stable handles: ids are
// never reused within a run, and a cluster whose last member leaves is dead
// for good (in dpmm mode a passenger opens a fresh id instead).
class SamplerState {
 public:
  static SamplerState init(const Corpus& corpus, const Hyperparams& hyper);

  // One passenger step = kick_out, choose_cluster, merge.
  void kick_out(const Corpus& corpus, std::int32_t u);
  std::uint32_t choose_cluster(const Corpus& corpus, std::int32_t u);
  void merge(const Corpus& corpus, std::int32_t u, std::uint32_t z);

  // Full pass over all passengers in index order; appends a trace entry.
  void sweep(const Corpus& corpus);

  // Dissolves every live cluster smaller than r and reassigns the displaced
  // passengers among the survivors (no new clusters). When nothing survives,
  // reports it and leaves the state untouched.
  DisbandReport disband_and_relocate(const Corpus& corpus);

  const std::vector<std::int32_t>& assignments() const { return assignments_; }
  const std::vector<ClusterStats>& clusters() const { return clusters_; }
  const std::vector<std::uint32_t>& live() const { return live_; }
  int num_live() const { return static_cast<int>(live_.size()); }
  const std::vector<TraceEntry>& trace() const { return trace_; }
  int iteration() const { return iteration_; }
  const Hyperparams& hyper() const { return hyper_; }
  std::mt19937_64& rng() { return rng_; }

  // Recomputes every sufficient statistic from scratch and checks the state
  // invariants (sum m_z = M, sum n_z = total trips, per-dimension count sums,
  // live-K definition). Throws CorruptStatsError on any mismatch.
  void validate(const Corpus& corpus) const;

 private:
  TraceEntry snapshot(int iteration) const;
  void record_trace();
  void drop_if_dead(std::uint32_t z);

  std::vector<std::int32_t> assignments_;  // cluster id per passenger, -1 = kicked out
  std::vector<ClusterStats> clusters_;     // indexed by stable cluster id
  std::vector<std::uint32_t> live_;        // ids with members > 0, ascending
  Hyperparams hyper_;
  std::mt19937_64 rng_;
  int iteration_ = 0;
  std::int32_t last_kicked_ = -1;
  std::vector<TraceEntry> trace_;
};

struct ClusteringResult {
  std::vector<std::int32_t> assignments;  // dense labels 0..K-1
  int num_clusters = 0;
  std::vector<double> theta_hat;                                  // m_z / M
  std::array<std::vector<std::vector<double>>, kNumDims> phi_hat;  // [dim][cluster][element]
  std::vector<TraceEntry> trace;
  std::vector<double> seconds_per_iteration;
  bool no_surviving_cluster = false;
};

// Algorithm: init, max_iter sweeps, then (dpmm) one disband-and-relocate
// pass -- or one per sweep when hyper.disband_every_sweep is set. The final
// sample is the reported clustering; phi_hat is the Dirichlet posterior mean
// (n_z^w + beta) / (n_z + V beta).
ClusteringResult fit(const Corpus& corpus, const Hyperparams& hyper);

}  // namespace tripclust
