// Apache License, Version 2.0, refer to LICENSE.txt

#include "tripclust/sampler.hpp"

#include <algorithm>
#include <chrono>

#include "tripclust/errors.hpp"
#include "tripclust/rng.hpp"

namespace tripclust {

SamplerState SamplerState::init(const Corpus& corpus, const Hyperparams& hyper) {
  hyper.validate();
  if (corpus.docs.empty()) throw EmptyInputError();

  SamplerState state;
  state.hyper_ = hyper;
  state.rng_ = make_substream(hyper.seed, "sweep");
  const int k0 = hyper.initial_clusters;
  state.clusters_.assign(k0, ClusterStats(corpus.vocab.sizes()));
  state.assignments_.assign(corpus.docs.size(), -1);

  auto init_rng = make_substream(hyper.seed, "init");
  for (std::size_t u = 0; u < corpus.docs.size(); ++u) {
    const auto z = static_cast<std::uint32_t>(uniform_below(init_rng, k0));
    state.assignments_[u] = static_cast<std::int32_t>(z);
    state.clusters_[z].add_doc(corpus.docs[u]);
  }
  // Clusters the uniform draw left empty never had a member; they are not
  // part of the live pool (a dead cluster is never revived).
  for (std::uint32_t z = 0; z < static_cast<std::uint32_t>(k0); ++z) {
    if (state.clusters_[z].members > 0) state.live_.push_back(z);
  }
  state.trace_.push_back(state.snapshot(0));
  return state;
}

TraceEntry SamplerState::snapshot(int iteration) const {
  TraceEntry entry;
  entry.iteration = iteration;
  entry.num_clusters = static_cast<int>(live_.size());
  entry.sizes.reserve(live_.size());
  for (std::uint32_t z : live_) entry.sizes.push_back(clusters_[z].members);
  return entry;
}

void SamplerState::record_trace() { trace_.push_back(snapshot(iteration_)); }

void SamplerState::drop_if_dead(std::uint32_t z) {
  if (clusters_[z].members > 0) return;
  auto it = std::lower_bound(live_.begin(), live_.end(), z);
  if (it != live_.end() && *it == z) live_.erase(it);
}

void SamplerState::kick_out(const Corpus& corpus, std::int32_t u) {
  const std::int32_t z = assignments_[u];
  if (z < 0) throw CorruptStatsError("passenger already kicked out");
  clusters_[z].remove_doc(corpus.docs[u]);
  assignments_[u] = -1;
  last_kicked_ = z;
  drop_if_dead(static_cast<std::uint32_t>(z));
}

std::uint32_t SamplerState::choose_cluster(const Corpus& corpus, std::int32_t u) {
  if (assignments_[u] >= 0) throw CorruptStatsError("choose_cluster before kick_out");
  const PassengerDoc& doc = corpus.docs[u];
  const std::int64_t m = corpus.num_passengers();
  const bool dpmm = hyper_.mode == Mode::dpmm;

  if (live_.empty() && !dpmm) {
    // The kick emptied the entire pool (single live cluster, now gone); with
    // no new-cluster option the passenger rejoins the cluster it just left.
    if (last_kicked_ < 0) throw CorruptStatsError("empty pool without a kick");
    return static_cast<std::uint32_t>(last_kicked_);
  }

  std::vector<double> weights(live_.size() + (dpmm ? 1 : 0));
  batch_log_weights(doc, clusters_, live_, hyper_, m,
                    dpmm ? 0 : static_cast<int>(live_.size()),
                    std::span<double>(weights.data(), live_.size()));
  if (dpmm) weights.back() = log_weight_new(doc, corpus.vocab.sizes(), hyper_, m);

  const std::size_t pick = sample_from_log_weights(weights, rng_);
  if (pick == live_.size()) return static_cast<std::uint32_t>(clusters_.size());  // fresh id
  return live_[pick];
}

void SamplerState::merge(const Corpus& corpus, std::int32_t u, std::uint32_t z) {
  if (assignments_[u] >= 0) throw CorruptStatsError("merge before kick_out");
  if (z == clusters_.size()) {
    clusters_.emplace_back(corpus.vocab.sizes());
  } else if (z > clusters_.size()) {
    throw CorruptStatsError("merge into unknown cluster id");
  }
  ClusterStats& stats = clusters_[z];
  const bool was_dead = stats.members == 0;
  stats.add_doc(corpus.docs[u]);
  assignments_[u] = static_cast<std::int32_t>(z);
  if (was_dead) live_.insert(std::lower_bound(live_.begin(), live_.end(), z), z);
}

void SamplerState::sweep(const Corpus& corpus) {
  for (std::int32_t u = 0; u < static_cast<std::int32_t>(corpus.docs.size()); ++u) {
    kick_out(corpus, u);
    const std::uint32_t z = choose_cluster(corpus, u);
    merge(corpus, u, z);
  }
  ++iteration_;
  record_trace();
}

DisbandReport SamplerState::disband_and_relocate(const Corpus& corpus) {
  DisbandReport report;
  const std::int64_t r = hyper_.min_cluster_size;
  if (r <= 0) return report;

  std::vector<std::uint32_t> survivors;
  std::vector<std::uint32_t> doomed;
  for (std::uint32_t z : live_) {
    (clusters_[z].members >= r ? survivors : doomed).push_back(z);
  }
  if (doomed.empty()) return report;
  if (survivors.empty()) {
    report.no_surviving_cluster = true;
    return report;
  }

  // Disband first: delete the small clusters' statistics and record their
  // members, ascending passenger index.
  std::vector<std::int32_t> displaced;
  for (std::size_t u = 0; u < assignments_.size(); ++u) {
    const std::int32_t z = assignments_[u];
    if (z >= 0 &&
        std::binary_search(doomed.begin(), doomed.end(), static_cast<std::uint32_t>(z))) {
      displaced.push_back(static_cast<std::int32_t>(u));
    }
  }
  for (std::int32_t u : displaced) {
    clusters_[assignments_[u]].remove_doc(corpus.docs[u]);
    assignments_[u] = -1;
  }
  live_ = survivors;
  report.disbanded_clusters = static_cast<int>(doomed.size());

  // Relocate sequentially among the frozen survivor set; no new clusters,
  // stats updated after each merge.
  const std::int64_t m = corpus.num_passengers();
  std::vector<double> weights(survivors.size());
  for (std::int32_t u : displaced) {
    batch_log_weights(corpus.docs[u], clusters_, live_, hyper_, m, /*fixed_pool_size=*/0,
                      weights);
    const std::size_t pick = sample_from_log_weights(weights, rng_);
    merge(corpus, u, live_[pick]);
  }
  report.relocated_members = static_cast<std::int64_t>(displaced.size());

  // The trace entry for the current iteration should show the state the
  // phase actually ended with.
  if (!trace_.empty() && trace_.back().iteration == iteration_)
    trace_.back() = snapshot(iteration_);
  return report;
}

void SamplerState::validate(const Corpus& corpus) const {
  std::vector<ClusterStats> expect(clusters_.size(), ClusterStats(corpus.vocab.sizes()));
  std::int64_t assigned = 0;
  for (std::size_t u = 0; u < assignments_.size(); ++u) {
    const std::int32_t z = assignments_[u];
    if (z < 0) continue;
    if (z >= static_cast<std::int32_t>(clusters_.size()))
      throw CorruptStatsError("assignment points at unknown cluster");
    expect[z].add_doc(corpus.docs[u]);
    ++assigned;
  }
  if (assigned != corpus.num_passengers())
    throw CorruptStatsError("sum of cluster members != M");

  std::int64_t total_trips = 0;
  std::vector<std::uint32_t> expect_live;
  for (std::size_t z = 0; z < clusters_.size(); ++z) {
    const ClusterStats& got = clusters_[z];
    const ClusterStats& want = expect[z];
    if (got.members != want.members || got.trips != want.trips)
      throw CorruptStatsError("cluster totals out of sync");
    for (int d = 0; d < kNumDims; ++d) {
      if (got.counts[d] != want.counts[d])
        throw CorruptStatsError("element counts out of sync");
      std::int64_t sum = 0;
      for (std::int64_t c : got.counts[d]) sum += c;
      if (sum != got.trips) throw CorruptStatsError("per-dimension count sum != n_z");
    }
    if ((got.members == 0) != (got.trips == 0))
      throw CorruptStatsError("empty cluster with residual trips");
    total_trips += got.trips;
    if (got.members > 0) expect_live.push_back(static_cast<std::uint32_t>(z));
  }
  if (total_trips != corpus.total_trips)
    throw CorruptStatsError("sum of cluster trips != corpus total");
  if (expect_live != live_) throw CorruptStatsError("live set out of sync");
}

ClusteringResult fit(const Corpus& corpus, const Hyperparams& hyper) {
  SamplerState state = SamplerState::init(corpus, hyper);

  ClusteringResult result;
  result.seconds_per_iteration.reserve(hyper.max_iter);
  for (int it = 0; it < hyper.max_iter; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    state.sweep(corpus);
    if (hyper.mode == Mode::dpmm && hyper.disband_every_sweep)
      result.no_surviving_cluster |= state.disband_and_relocate(corpus).no_surviving_cluster;
    const auto t1 = std::chrono::steady_clock::now();
    result.seconds_per_iteration.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  if (hyper.mode == Mode::dpmm && !hyper.disband_every_sweep)
    result.no_surviving_cluster = state.disband_and_relocate(corpus).no_surviving_cluster;

  // Dense relabeling of the live clusters, ascending stable id.
  const auto& live = state.live();
  std::vector<std::int32_t> dense(state.clusters().size(), -1);
  for (std::size_t i = 0; i < live.size(); ++i) dense[live[i]] = static_cast<std::int32_t>(i);

  result.num_clusters = static_cast<int>(live.size());
  result.assignments.resize(corpus.docs.size());
  for (std::size_t u = 0; u < corpus.docs.size(); ++u)
    result.assignments[u] = dense[state.assignments()[u]];

  const double m_total = static_cast<double>(corpus.num_passengers());
  for (std::uint32_t z : live)
    result.theta_hat.push_back(static_cast<double>(state.clusters()[z].members) / m_total);

  for (int d = 0; d < kNumDims; ++d) {
    const double beta = hyper.beta[d];
    const std::int64_t v = corpus.vocab.size(d);
    result.phi_hat[d].reserve(live.size());
    for (std::uint32_t z : live) {
      const ClusterStats& stats = state.clusters()[z];
      std::vector<double> row(v);
      const double denom = static_cast<double>(stats.trips) + static_cast<double>(v) * beta;
      for (std::int64_t w = 0; w < v; ++w)
        row[w] = (static_cast<double>(stats.counts[d][w]) + beta) / denom;
      result.phi_hat[d].push_back(std::move(row));
    }
  }
  result.trace = state.trace();
  return result;
}

}  // namespace tripclust
