// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "tripclust/corpus.hpp"
#include "tripclust/parallel.hpp"
#include "tripclust/weights.hpp"

namespace tripclust {

struct GeneratorConfig {
  std::int64_t num_passengers = 500;

  enum class TripLaw { fixed, shifted_poisson };
  TripLaw trip_law = TripLaw::fixed;
  double trips_mean = 20.0;  // exact N when fixed; mean (>= 1) when shifted_poisson

  std::array<std::int32_t, kNumDims> vocab_sizes{8, 8, 24};

  // dmm: theta ~ Dir(alpha) over num_components clusters.
  // dpmm: theta ~ GEM(1, alpha) truncated at num_components.
  Mode mode = Mode::dmm;
  int num_components = 4;
  double alpha = 1.0;
  std::array<double, kNumDims> beta{0.1, 0.1, 0.1};

  // Overrides for the sampled mixture weights / emission tables.
  std::optional<std::vector<double>> explicit_theta;
  std::optional<std::array<std::vector<std::vector<double>>, kNumDims>> explicit_phi;

  std::uint64_t seed = 0;

  void validate() const;  // throws BadConfigError
};

struct SyntheticCorpus {
  Corpus corpus;
  std::vector<std::int32_t> true_labels;
  std::vector<double> true_theta;
  std::array<std::vector<std::vector<double>>, kNumDims> true_phi;
};

// Stick-breaking weights: theta_k = v_k prod_{j<k} (1 - v_j) with
// v_k ~ Beta(1, alpha); the last component takes the residual so the vector
// sums to one exactly.
std::vector<double> sample_gem_weights(double alpha, int truncation, std::mt19937_64& rng);

// Draws a corpus from the generative process: mixture weights, one cluster
// per passenger, then per-trip elements from the cluster's per-dimension
// distributions. Each passenger uses its own RNG sub-stream, so the parallel
// path is bit-identical to the serial one.
SyntheticCorpus sample_corpus(const GeneratorConfig& config,
                              Execution exec = Execution::automatic);

// Four well-separated clusters on an 8 x 8 x 24 vocabulary: per cluster and
// dimension, 0.85 of the emission mass sits on a disjoint element pair.
GeneratorConfig separated_clusters_recipe();

}  // namespace tripclust
