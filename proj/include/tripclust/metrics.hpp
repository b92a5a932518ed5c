// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tripclust/corpus.hpp"
#include "tripclust/parallel.hpp"

namespace tripclust {

// Sparse non-negative vector, items sorted by index.
struct SparseVector {
  std::vector<std::pair<std::int64_t, double>> items;

  double squared_norm() const;
};

// Passengers embedded in the flat OD x T count space: index of (o, d, t) is
// ((o * V_D) + d) * V_T + t, entry = number of trips with that triple.
// ambient_dim carries the V-product for the RMSSTD denominator.
struct PassengerVectors {
  std::int64_t ambient_dim = 0;
  std::vector<SparseVector> rows;
};

PassengerVectors vectorize(const Corpus& corpus, bool normalize = false,
                           Execution exec = Execution::automatic);

// Within-cluster compactness:
//   sqrt( sum_k sum_{u in C_k} ||d_u - c_k||^2 / (Vprod * sum_k (m_k - 1)) ).
// Throws UndefinedError when every cluster is a singleton.
double rmsstd(const PassengerVectors& vectors, std::span<const std::int32_t> assignment,
              Execution exec = Execution::automatic);

// Cross-cluster separateness in [0, 1]:
//   (total scatter - within scatter) / total scatter.
// Throws UndefinedError when all vectors are identical.
double rs(const PassengerVectors& vectors, std::span<const std::int32_t> assignment,
          Execution exec = Execution::automatic);

// (sum_k ||c_k - g||^2 / (K-1)) / (within / (M-K)), the between term
// unweighted by cluster sizes; `weighted` switches to the size-weighted
// variant. Throws UndefinedError for K=1 or K=M; returns +inf for zero
// within-scatter.
double ch_index(const PassengerVectors& vectors, std::span<const std::int32_t> assignment,
                bool weighted = false, Execution exec = Execution::automatic);

// Normalized mutual information, arithmetic-mean normalization, in [0, 1].
double nmi(std::span<const std::int32_t> labels_a, std::span<const std::int32_t> labels_b);

// Adjusted Rand index in (-1, 1].
double ari(std::span<const std::int32_t> labels_a, std::span<const std::int32_t> labels_b);

struct MetricsReport {
  int num_clusters = 0;
  std::optional<double> rmsstd;  // absent when undefined
  std::optional<double> rs;
  std::optional<double> ch;  // absent when undefined; +inf flagged separately
  bool ch_infinite = false;
  std::optional<double> nmi;
  std::optional<double> ari;
};

// Computes all internal metrics, mapping UndefinedError to absent fields;
// external scores are filled when true labels are given.
MetricsReport evaluate_clustering(const PassengerVectors& vectors,
                                  std::span<const std::int32_t> assignment,
                                  std::span<const std::int32_t> true_labels = {},
                                  bool weighted_ch = false);

}  // namespace tripclust
