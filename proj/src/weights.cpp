// Apache License, Version 2.0, refer to LICENSE.txt

#include "tripclust/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "tripclust/errors.hpp"
#include "tripclust/rng.hpp"

namespace tripclust {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log of the rising factorial x (x+1) ... (x+k-1). Short runs are summed
// directly (the product form of the conditionals); long ones go through
// lgamma, which is the same quantity.
double log_rising(double x, std::int64_t k) {
  if (k <= 24) {
    double acc = 0.0;
    for (std::int64_t j = 0; j < k; ++j) acc += std::log(x + static_cast<double>(j));
    return acc;
  }
  return std::lgamma(x + static_cast<double>(k)) - std::lgamma(x);
}

}  // namespace

void Hyperparams::validate() const {
  if (!(alpha > 0.0)) throw BadConfigError("alpha must be > 0");
  for (int d = 0; d < kNumDims; ++d) {
    if (!(beta[d] > 0.0))
      throw BadConfigError(std::string("beta for ") + dim_name(d) + " must be > 0");
  }
  if (min_cluster_size < 0) throw BadConfigError("min_cluster_size must be >= 0");
  if (max_iter < 1) throw BadConfigError("max_iter must be >= 1");
  if (initial_clusters < 1) throw BadConfigError("initial_clusters must be >= 1");
}

ClusterStats::ClusterStats(const std::array<std::int32_t, kNumDims>& vocab_sizes) {
  for (int d = 0; d < kNumDims; ++d) counts[d].assign(vocab_sizes[d], 0);
}

void ClusterStats::add_doc(const PassengerDoc& doc) {
  ++members;
  trips += doc.trip_count();
  for (int d = 0; d < kNumDims; ++d) {
    for (const auto& [w, c] : doc.counts[d]) counts[d][w] += c;
  }
}

void ClusterStats::remove_doc(const PassengerDoc& doc) {
  if (members < 1 || trips < doc.trip_count())
    throw CorruptStatsError("cluster stats underflow removing '" + doc.passenger_id + "'");
  for (int d = 0; d < kNumDims; ++d) {
    for (const auto& [w, c] : doc.counts[d]) {
      if (counts[d][w] < c)
        throw CorruptStatsError("element count underflow removing '" + doc.passenger_id + "'");
      counts[d][w] -= c;
    }
  }
  --members;
  trips -= doc.trip_count();
}

double log_likelihood_existing(const PassengerDoc& doc, const ClusterStats& minus_u,
                               const Hyperparams& hyper) {
  if (minus_u.members < 0 || minus_u.trips < 0)
    throw CorruptStatsError("negative cluster totals");
  const double n = static_cast<double>(minus_u.trips);
  double total = 0.0;
  for (int d = 0; d < kNumDims; ++d) {
    const double beta = hyper.beta[d];
    const double vbeta = static_cast<double>(minus_u.counts[d].size()) * beta;
    double num = 0.0;
    for (const auto& [w, c] : doc.counts[d]) {
      const std::int64_t nw = minus_u.counts[d][w];
      if (nw < 0) throw CorruptStatsError("negative element count");
      num += log_rising(static_cast<double>(nw) + beta, c);
    }
    total += num - log_rising(n + vbeta, doc.trip_count());
  }
  return total;
}

double log_likelihood_new(const PassengerDoc& doc,
                          const std::array<std::int32_t, kNumDims>& vocab_sizes,
                          const Hyperparams& hyper) {
  double total = 0.0;
  for (int d = 0; d < kNumDims; ++d) {
    const double beta = hyper.beta[d];
    const double vbeta = static_cast<double>(vocab_sizes[d]) * beta;
    double num = 0.0;
    for (const auto& [w, c] : doc.counts[d]) {
      (void)w;
      num += log_rising(beta, c);
    }
    total += num - log_rising(vbeta, doc.trip_count());
  }
  return total;
}

double log_weight_existing(const PassengerDoc& doc, const ClusterStats& minus_u,
                           const Hyperparams& hyper, std::int64_t num_passengers) {
  if (minus_u.members == 0) return kNegInf;
  if (minus_u.members < 0) throw CorruptStatsError("negative member count");
  const double prior = std::log(static_cast<double>(minus_u.members)) -
                       std::log(static_cast<double>(num_passengers) - 1.0 + hyper.alpha);
  return prior + log_likelihood_existing(doc, minus_u, hyper);
}

double log_weight_new(const PassengerDoc& doc,
                      const std::array<std::int32_t, kNumDims>& vocab_sizes,
                      const Hyperparams& hyper, std::int64_t num_passengers) {
  const double prior = std::log(hyper.alpha) -
                       std::log(static_cast<double>(num_passengers) - 1.0 + hyper.alpha);
  return prior + log_likelihood_new(doc, vocab_sizes, hyper);
}

double log_weight_dmm(const PassengerDoc& doc, const ClusterStats& minus_u,
                      const Hyperparams& hyper, std::int64_t num_passengers,
                      int num_clusters) {
  if (num_clusters < 1) throw BadConfigError("dmm weight needs at least one cluster");
  if (minus_u.members < 0) throw CorruptStatsError("negative member count");
  const double prior =
      std::log(static_cast<double>(minus_u.members) + hyper.alpha) -
      std::log(static_cast<double>(num_passengers) - 1.0 +
               static_cast<double>(num_clusters) * hyper.alpha);
  return prior + log_likelihood_existing(doc, minus_u, hyper);
}

std::size_t sample_from_log_weights(std::span<const double> log_weights,
                                    std::mt19937_64& rng) {
  double max_lw = kNegInf;
  for (double lw : log_weights) max_lw = std::max(max_lw, lw);
  if (!(max_lw > kNegInf)) throw DegenerateDistributionError();

  double total = 0.0;
  for (double lw : log_weights) total += std::exp(lw - max_lw);

  const double target = uniform_unit(rng) * total;
  double acc = 0.0;
  std::size_t last_finite = 0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    if (log_weights[i] == kNegInf) continue;
    acc += std::exp(log_weights[i] - max_lw);
    last_finite = i;
    if (acc > target) return i;
  }
  return last_finite;  // guards the acc == total round-off edge
}

void batch_log_weights(const PassengerDoc& doc, std::span<const ClusterStats> clusters,
                       std::span<const std::uint32_t> ids, const Hyperparams& hyper,
                       std::int64_t num_passengers, int fixed_pool_size,
                       std::span<double> out, Execution exec) {
  const std::int64_t k = static_cast<std::int64_t>(ids.size());
  constexpr std::size_t kParallelThreshold = 64;
  if (run_parallel(exec, ids.size(), kParallelThreshold)) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < k; ++i) {
      out[i] = fixed_pool_size > 0
                   ? log_weight_dmm(doc, clusters[ids[i]], hyper, num_passengers,
                                    fixed_pool_size)
                   : log_weight_existing(doc, clusters[ids[i]], hyper, num_passengers);
    }
  } else {
    for (std::int64_t i = 0; i < k; ++i) {
      out[i] = fixed_pool_size > 0
                   ? log_weight_dmm(doc, clusters[ids[i]], hyper, num_passengers,
                                    fixed_pool_size)
                   : log_weight_existing(doc, clusters[ids[i]], hyper, num_passengers);
    }
  }
}

double oracle_log_marginal(const Corpus& corpus, std::span<const std::int32_t> assignment,
                           const Hyperparams& hyper) {
  if (assignment.size() != corpus.docs.size())
    throw BadInputError("assignment length does not match corpus size");

  std::map<std::int32_t, ClusterStats> clusters;
  for (std::size_t u = 0; u < corpus.docs.size(); ++u) {
    if (assignment[u] < 0) continue;
    auto it = clusters.try_emplace(assignment[u], corpus.vocab.sizes()).first;
    it->second.add_doc(corpus.docs[u]);
  }

  double total = 0.0;
  for (const auto& [label, stats] : clusters) {
    (void)label;
    for (int d = 0; d < kNumDims; ++d) {
      const double beta = hyper.beta[d];
      const std::int64_t v = corpus.vocab.size(d);
      // log Delta(n_z + beta) - log Delta(beta); zero-count elements cancel.
      double log_delta = 0.0;
      for (std::int64_t w = 0; w < v; ++w) {
        const std::int64_t nw = stats.counts[d][w];
        if (nw > 0)
          log_delta += std::lgamma(static_cast<double>(nw) + beta) - std::lgamma(beta);
      }
      log_delta -=
          std::lgamma(static_cast<double>(stats.trips) + static_cast<double>(v) * beta) -
          std::lgamma(static_cast<double>(v) * beta);
      total += log_delta;
    }
  }
  return total;
}

double oracle_log_partition_prior(std::span<const std::int64_t> cluster_sizes,
                                  double alpha, int num_clusters) {
  if (num_clusters < 1) throw BadConfigError("prior needs at least one cluster");
  std::int64_t m = 0;
  for (std::int64_t s : cluster_sizes) m += s;
  const double a_k = alpha / static_cast<double>(num_clusters);
  double total = std::lgamma(alpha) - std::lgamma(static_cast<double>(m) + alpha);
  for (std::int64_t s : cluster_sizes)
    total += std::lgamma(static_cast<double>(s) + a_k) - std::lgamma(a_k);
  // Clusters beyond the listed ones are empty and contribute nothing.
  return total;
}

}  // namespace tripclust
