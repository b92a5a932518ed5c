// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "tripclust/corpus.hpp"
#include "tripclust/parallel.hpp"

namespace tripclust {

enum class Mode { dmm, dpmm };

struct Hyperparams {
  double alpha = 0.01;
  std::array<double, kNumDims> beta{0.01, 0.01, 0.042};
  int min_cluster_size = 45;  // r; 0 disables disband-and-relocate
  int max_iter = 30;
  std::uint64_t seed = 0;
  Mode mode = Mode::dpmm;
  int initial_clusters = 1;  // K0; the dmm pool size, 1 for dpmm
  bool disband_every_sweep = false;

  void validate() const;  // throws BadConfigError
};

// Sufficient statistics of one cluster: member count m, trip count n, and
// per-dimension element occurrence counts n^w. The "minus-u" statistics of
// the conditional formulas are just these fields after the doc is removed.
struct ClusterStats {
  std::int64_t members = 0;
  std::int64_t trips = 0;
  std::array<std::vector<std::int64_t>, kNumDims> counts;

  ClusterStats() = default;
  explicit ClusterStats(const std::array<std::int32_t, kNumDims>& vocab_sizes);

  void add_doc(const PassengerDoc& doc);
  void remove_doc(const PassengerDoc& doc);  // throws CorruptStatsError on underflow

  bool operator==(const ClusterStats&) const = default;
};

// log of the collapsed per-dimension product: for each dimension,
//   prod_{w in doc} prod_{j=1..N_u^w} (n^w + beta + j - 1)
//   --------------------------------------------------------
//   prod_{i=1..N_u} (n + V*beta + i - 1)
// evaluated against the cluster's minus-u counts.
double log_likelihood_existing(const PassengerDoc& doc, const ClusterStats& minus_u,
                               const Hyperparams& hyper);

// Same product with all cluster counts at zero (a brand-new cluster).
double log_likelihood_new(const PassengerDoc& doc,
                          const std::array<std::int32_t, kNumDims>& vocab_sizes,
                          const Hyperparams& hyper);

// Unnormalized log weight of joining an existing cluster under the infinite
// limit prior m_{z,-u} / (M - 1 + alpha); -inf when the cluster is empty.
double log_weight_existing(const PassengerDoc& doc, const ClusterStats& minus_u,
                           const Hyperparams& hyper, std::int64_t num_passengers);

// Unnormalized log weight of opening a new cluster, prior alpha / (M-1+alpha).
double log_weight_new(const PassengerDoc& doc,
                      const std::array<std::int32_t, kNumDims>& vocab_sizes,
                      const Hyperparams& hyper, std::int64_t num_passengers);

// Fixed-pool variant: prior (m_{z,-u} + alpha) / (M - 1 + K*alpha); finite
// even for an empty cluster.
double log_weight_dmm(const PassengerDoc& doc, const ClusterStats& minus_u,
                      const Hyperparams& hyper, std::int64_t num_passengers,
                      int num_clusters);

// Draws index k with probability exp(lw_k - logsumexp(lw)); invariant under
// adding a constant to every weight. Throws DegenerateDistributionError when
// no weight is finite.
std::size_t sample_from_log_weights(std::span<const double> log_weights,
                                    std::mt19937_64& rng);

// Fills out[i] with the weight of cluster clusters[ids[i]] for this doc:
// log_weight_existing when fixed_pool_size <= 0, log_weight_dmm otherwise.
// Slots are independent, so the parallel path is bit-identical to the serial
// one.
void batch_log_weights(const PassengerDoc& doc, std::span<const ClusterStats> clusters,
                       std::span<const std::uint32_t> ids, const Hyperparams& hyper,
                       std::int64_t num_passengers, int fixed_pool_size,
                       std::span<double> out, Execution exec = Execution::automatic);

// Brute-force marginal likelihood log P(D | z, beta): for every dimension and
// every cluster, log Delta(n_z + beta*1) - log Delta(beta*1), with
// Delta(v) = prod Gamma(v_i) / Gamma(sum v_i). Independent of the weight
// functions above; used as the test oracle for them. Assignment labels are
// arbitrary non-negative ints; entries < 0 mean "passenger excluded".
double oracle_log_marginal(const Corpus& corpus, std::span<const std::int32_t> assignment,
                           const Hyperparams& hyper);

// log P(z_1..z_M) for the finite-K symmetric prior:
// Gamma(alpha)/Gamma(M+alpha) * prod_k Gamma(m_k + alpha/K)/Gamma(alpha/K).
double oracle_log_partition_prior(std::span<const std::int64_t> cluster_sizes,
                                  double alpha, int num_clusters);

}  // namespace tripclust
