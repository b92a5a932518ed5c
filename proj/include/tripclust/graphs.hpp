// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tripclust/corpus.hpp"
#include "tripclust/parallel.hpp"

namespace tripclust {

// Undirected simple graph over stations: symmetric, no self-loops.
struct StationGraph {
  std::int32_t n = 0;
  std::vector<std::vector<std::int32_t>> neighbors;  // sorted adjacency lists

  static StationGraph from_edges(std::int32_t n,
                                 std::span<const std::pair<std::int32_t, std::int32_t>> edges);

  std::int64_t num_edges() const;
  bool has_edge(std::int32_t i, std::int32_t j) const;
};

// Geographical proximity: stations adjacent iff their hop distance in the
// physical network is in [1, hops]. Disconnected pairs stay non-adjacent.
StationGraph build_hop_graph(std::int32_t n,
                             std::span<const std::pair<std::int32_t, std::int32_t>> edges,
                             int hops, Execution exec = Execution::automatic);

// Functional similarity: stations adjacent iff the cosine similarity of
// their POI vectors reaches gamma in (0, 1]. A zero-norm vector raises
// DegeneratePoiError.
StationGraph build_poi_graph(const std::vector<std::vector<double>>& poi_vectors,
                             double gamma, Execution exec = Execution::automatic);

// Newman-Girvan modularity of a full partition (community index per node).
// Throws UndefinedError on an edgeless graph.
double modularity(const StationGraph& graph, std::span<const std::int32_t> partition);

struct StationPartition {
  std::vector<std::int32_t> community;  // dense community index per node
  std::int32_t num_communities = 0;
};

// Greedy modularity maximization: seeded-restart local moving (ties broken
// toward the lowest community index) with community aggregation, then a
// refinement pass that splits internally disconnected communities. The
// result never scores below the single-community baseline and every
// community induces a connected subgraph.
std::pair<StationPartition, double> detect_communities(const StationGraph& graph,
                                                       std::mt19937_64& rng);

// Joint community = (adjacency community, poi community) pair, densely
// re-indexed over the occupied pairs in lexicographic order.
StationPartition compose_partitions(const StationPartition& adjacency,
                                    const StationPartition& poi);

// The station-level mapping applied to both OD dimensions. Every vocabulary
// label must name a station; unknown labels surface later as
// UnmappedStationError from remap_with_communities.
CommunityMapping compose_mapping(const StationPartition& adjacency,
                                 const StationPartition& poi,
                                 double modularity_adjacency, double modularity_poi);

// Re-keys a station-indexed mapping onto a corpus vocabulary: station_labels
// gives the label of each station index; vocabulary labels absent from it
// are left unmapped (-1).
CommunityMapping align_mapping_to_vocab(const StationPartition& stations,
                                        const std::vector<std::string>& station_labels,
                                        const VocabularySpec& vocab,
                                        double modularity_adjacency, double modularity_poi);

}  // namespace tripclust
