// Apache License, Version 2.0, refer to LICENSE.txt

#include "tripclust/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <unordered_map>

#include "tripclust/errors.hpp"
#include "tripclust/rng.hpp"

namespace tripclust {

StationGraph StationGraph::from_edges(
    std::int32_t n, std::span<const std::pair<std::int32_t, std::int32_t>> edges) {
  if (n < 1) throw BadInputError("graph needs at least one node");
  StationGraph graph;
  graph.n = n;
  graph.neighbors.assign(n, {});
  for (const auto& [a, b] : edges) {
    if (a < 0 || a >= n || b < 0 || b >= n)
      throw BadInputError("edge endpoint out of range");
    if (a == b) throw BadInputError("self-loop on node " + std::to_string(a));
    graph.neighbors[a].push_back(b);
    graph.neighbors[b].push_back(a);
  }
  for (auto& adj : graph.neighbors) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  return graph;
}

std::int64_t StationGraph::num_edges() const {
  std::int64_t deg = 0;
  for (const auto& adj : neighbors) deg += static_cast<std::int64_t>(adj.size());
  return deg / 2;
}

bool StationGraph::has_edge(std::int32_t i, std::int32_t j) const {
  const auto& adj = neighbors[i];
  return std::binary_search(adj.begin(), adj.end(), j);
}

StationGraph build_hop_graph(std::int32_t n,
                             std::span<const std::pair<std::int32_t, std::int32_t>> edges,
                             int hops, Execution exec) {
  if (hops < 1) throw BadConfigError("hop radius must be >= 1");
  const StationGraph base = StationGraph::from_edges(n, edges);

  StationGraph out;
  out.n = n;
  out.neighbors.assign(n, {});

  const auto bfs_row = [&](std::int32_t src) {
    std::vector<int> dist(n, -1);
    std::queue<std::int32_t> frontier;
    dist[src] = 0;
    frontier.push(src);
    while (!frontier.empty()) {
      const std::int32_t v = frontier.front();
      frontier.pop();
      if (dist[v] >= hops) continue;
      for (std::int32_t w : base.neighbors[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          frontier.push(w);
        }
      }
    }
    for (std::int32_t w = 0; w < n; ++w) {
      if (w != src && dist[w] > 0) out.neighbors[src].push_back(w);
    }
  };

  constexpr std::size_t kParallelThreshold = 128;
  if (run_parallel(exec, static_cast<std::size_t>(n), kParallelThreshold)) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int32_t src = 0; src < n; ++src) bfs_row(src);
  } else {
    for (std::int32_t src = 0; src < n; ++src) bfs_row(src);
  }
  return out;
}

StationGraph build_poi_graph(const std::vector<std::vector<double>>& poi_vectors,
                             double gamma, Execution exec) {
  if (!(gamma > 0.0) || gamma > 1.0) throw BadConfigError("gamma must be in (0, 1]");
  const std::int32_t n = static_cast<std::int32_t>(poi_vectors.size());
  if (n < 1) throw BadInputError("no POI vectors");
  const std::size_t width = poi_vectors[0].size();

  std::vector<double> norms(n);
  for (std::int32_t i = 0; i < n; ++i) {
    if (poi_vectors[i].size() != width) throw BadInputError("ragged POI vectors");
    double sq = 0.0;
    for (double x : poi_vectors[i]) {
      if (x < 0.0) throw BadInputError("negative POI count");
      sq += x * x;
    }
    if (sq <= 0.0) throw DegeneratePoiError(i);
    norms[i] = std::sqrt(sq);
  }

  StationGraph out;
  out.n = n;
  out.neighbors.assign(n, {});
  const auto fill_row = [&](std::int32_t i) {
    for (std::int32_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double dot = 0.0;
      for (std::size_t p = 0; p < width; ++p) dot += poi_vectors[i][p] * poi_vectors[j][p];
      if (dot / (norms[i] * norms[j]) >= gamma) out.neighbors[i].push_back(j);
    }
  };

  constexpr std::size_t kParallelThreshold = 128;
  if (run_parallel(exec, static_cast<std::size_t>(n), kParallelThreshold)) {
#pragma omp parallel for schedule(static)
    for (std::int32_t i = 0; i < n; ++i) fill_row(i);
  } else {
    for (std::int32_t i = 0; i < n; ++i) fill_row(i);
  }
  return out;
}

double modularity(const StationGraph& graph, std::span<const std::int32_t> partition) {
  if (partition.size() != static_cast<std::size_t>(graph.n))
    throw BadInputError("partition size does not match node count");
  const double m = static_cast<double>(graph.num_edges());
  if (m <= 0.0) throw UndefinedError("modularity of an edgeless graph");

  std::int32_t num_comm = 0;
  for (std::int32_t c : partition) {
    if (c < 0) throw BadInputError("negative community index");
    num_comm = std::max(num_comm, c + 1);
  }
  std::vector<double> within(num_comm, 0.0);   // edges inside each community
  std::vector<double> degree(num_comm, 0.0);   // summed degrees
  for (std::int32_t v = 0; v < graph.n; ++v) {
    degree[partition[v]] += static_cast<double>(graph.neighbors[v].size());
    for (std::int32_t w : graph.neighbors[v]) {
      if (w > v && partition[w] == partition[v]) within[partition[v]] += 1.0;
    }
  }
  double q = 0.0;
  for (std::int32_t c = 0; c < num_comm; ++c) {
    const double a = degree[c] / (2.0 * m);
    q += within[c] / m - a * a;
  }
  return q;
}

namespace {

// Weighted view used across aggregation levels: undirected edge weights plus
// per-node self-loop weight (intra-community mass after contraction).
struct WeightedGraph {
  std::vector<std::vector<std::pair<std::int32_t, double>>> neighbors;
  std::vector<double> self_loop;
  std::vector<double> degree;  // sum of incident weights, self-loops counted twice
  double total_weight = 0.0;   // sum of edge weights + self-loops

  std::int32_t size() const { return static_cast<std::int32_t>(neighbors.size()); }
};

WeightedGraph weighted_view(const StationGraph& graph) {
  WeightedGraph wg;
  wg.neighbors.resize(graph.n);
  wg.self_loop.assign(graph.n, 0.0);
  wg.degree.assign(graph.n, 0.0);
  for (std::int32_t v = 0; v < graph.n; ++v) {
    for (std::int32_t w : graph.neighbors[v]) {
      wg.neighbors[v].emplace_back(w, 1.0);
      wg.degree[v] += 1.0;
    }
  }
  wg.total_weight = static_cast<double>(graph.num_edges());
  return wg;
}

std::vector<std::int32_t> densify(std::vector<std::int32_t> labels) {
  std::unordered_map<std::int32_t, std::int32_t> remap;
  std::int32_t next = 0;
  for (std::int32_t& c : labels) {
    auto [it, inserted] = remap.emplace(c, next);
    if (inserted) ++next;
    c = it->second;
  }
  return labels;
}

// One pass of greedy local moving; returns true if any node moved. Ties are
// broken toward the lowest community index.
bool local_moving(const WeightedGraph& wg, std::span<const std::int32_t> order,
                  std::vector<std::int32_t>& community, std::vector<double>& comm_degree) {
  const double two_w = 2.0 * wg.total_weight;
  bool moved = false;
  std::unordered_map<std::int32_t, double> links;
  for (std::int32_t v : order) {
    const std::int32_t old_c = community[v];
    comm_degree[old_c] -= wg.degree[v];

    links.clear();
    links[old_c] += 0.0;  // staying put is always a candidate
    for (const auto& [w, weight] : wg.neighbors[v]) links[community[w]] += weight;

    std::int32_t best_c = old_c;
    double best_gain = -std::numeric_limits<double>::infinity();
    // Deterministic scan order: sort candidate communities.
    std::vector<std::pair<std::int32_t, double>> candidates(links.begin(), links.end());
    std::sort(candidates.begin(), candidates.end());
    for (const auto& [c, k_vc] : candidates) {
      const double gain = k_vc / wg.total_weight -
                          wg.degree[v] * comm_degree[c] / (two_w * wg.total_weight);
      if (gain > best_gain + 1e-15) {
        best_gain = gain;
        best_c = c;
      }
    }
    community[v] = best_c;
    comm_degree[best_c] += wg.degree[v];
    if (best_c != old_c) moved = true;
  }
  return moved;
}

WeightedGraph aggregate(const WeightedGraph& wg, std::span<const std::int32_t> community,
                        std::int32_t num_communities) {
  WeightedGraph out;
  out.neighbors.resize(num_communities);
  out.self_loop.assign(num_communities, 0.0);
  out.degree.assign(num_communities, 0.0);
  out.total_weight = wg.total_weight;

  std::vector<std::map<std::int32_t, double>> acc(num_communities);
  for (std::int32_t v = 0; v < wg.size(); ++v) {
    const std::int32_t cv = community[v];
    out.self_loop[cv] += wg.self_loop[v];
    for (const auto& [w, weight] : wg.neighbors[v]) {
      const std::int32_t cw = community[w];
      if (cw == cv) {
        out.self_loop[cv] += weight / 2.0;  // each intra edge visited twice
      } else {
        acc[cv][cw] += weight;
      }
    }
  }
  for (std::int32_t c = 0; c < num_communities; ++c) {
    out.neighbors[c].assign(acc[c].begin(), acc[c].end());
    double deg = 2.0 * out.self_loop[c];
    for (const auto& [w, weight] : out.neighbors[c]) {
      (void)w;
      deg += weight;
    }
    out.degree[c] = deg;
  }
  return out;
}

std::vector<std::int32_t> louvain(const StationGraph& graph,
                                  std::vector<std::int32_t> order) {
  WeightedGraph level = weighted_view(graph);
  std::vector<std::int32_t> node_to_comm(graph.n);
  std::iota(node_to_comm.begin(), node_to_comm.end(), 0);

  while (true) {
    std::vector<std::int32_t> community(level.size());
    std::iota(community.begin(), community.end(), 0);
    std::vector<double> comm_degree = level.degree;

    // Zero-gain ties move toward the lowest community index, so a pass cap
    // backstops the (theoretical) tie-cycling case.
    bool any_move = false;
    int pass = 0;
    while (local_moving(level, order, community, comm_degree) && ++pass < 1000)
      any_move = true;
    if (!any_move) break;

    community = densify(std::move(community));
    std::int32_t num_comm = *std::max_element(community.begin(), community.end()) + 1;
    for (std::int32_t& c : node_to_comm) c = community[c];
    if (num_comm == level.size()) break;  // nothing contracted; a fixpoint
    level = aggregate(level, community, num_comm);
    order.resize(level.size());
    std::iota(order.begin(), order.end(), 0);
    if (level.size() == 1) break;
  }
  return densify(std::move(node_to_comm));
}

// Splits every community that does not induce a connected subgraph into its
// connected components. Never decreases modularity.
std::vector<std::int32_t> split_disconnected(const StationGraph& graph,
                                             std::span<const std::int32_t> community) {
  std::vector<std::int32_t> out(graph.n, -1);
  std::int32_t next = 0;
  for (std::int32_t v = 0; v < graph.n; ++v) {
    if (out[v] >= 0) continue;
    const std::int32_t label = next++;
    std::queue<std::int32_t> frontier;
    out[v] = label;
    frontier.push(v);
    while (!frontier.empty()) {
      const std::int32_t x = frontier.front();
      frontier.pop();
      for (std::int32_t w : graph.neighbors[x]) {
        if (out[w] < 0 && community[w] == community[v]) {
          out[w] = label;
          frontier.push(w);
        }
      }
    }
  }
  return out;
}

std::vector<std::int32_t> connected_components(const StationGraph& graph) {
  std::vector<std::int32_t> all_same(graph.n, 0);
  return split_disconnected(graph, all_same);
}

}  // namespace

std::pair<StationPartition, double> detect_communities(const StationGraph& graph,
                                                       std::mt19937_64& rng) {
  const double m = static_cast<double>(graph.num_edges());
  if (m <= 0.0) throw UndefinedError("community detection on an edgeless graph");

  // The components partition is always a valid fallback: connected
  // communities and modularity >= the single-community baseline.
  std::vector<std::int32_t> best = connected_components(graph);
  double best_q = modularity(graph, best);

  constexpr int kRestarts = 10;
  std::vector<std::int32_t> order(graph.n);
  std::iota(order.begin(), order.end(), 0);
  for (int restart = 0; restart < kRestarts; ++restart) {
    for (std::int32_t i = graph.n - 1; i > 0; --i) {
      const auto j = static_cast<std::int32_t>(uniform_below(rng, i + 1));
      std::swap(order[i], order[j]);
    }
    std::vector<std::int32_t> candidate = louvain(graph, order);
    candidate = split_disconnected(graph, candidate);
    const double q = modularity(graph, candidate);
    if (q > best_q + 1e-12) {
      best_q = q;
      best = std::move(candidate);
    }
  }

  StationPartition partition;
  partition.community = densify(std::move(best));
  partition.num_communities =
      *std::max_element(partition.community.begin(), partition.community.end()) + 1;
  return {std::move(partition), best_q};
}

StationPartition compose_partitions(const StationPartition& adjacency,
                                    const StationPartition& poi) {
  if (adjacency.community.size() != poi.community.size())
    throw BadInputError("partitions cover different station sets");
  const std::size_t n = adjacency.community.size();

  std::map<std::pair<std::int32_t, std::int32_t>, std::int32_t> pair_index;
  for (std::size_t v = 0; v < n; ++v)
    pair_index.emplace(std::make_pair(adjacency.community[v], poi.community[v]), 0);
  std::int32_t next = 0;
  for (auto& [pair, idx] : pair_index) {
    (void)pair;
    idx = next++;
  }

  StationPartition out;
  out.community.resize(n);
  for (std::size_t v = 0; v < n; ++v)
    out.community[v] =
        pair_index.at(std::make_pair(adjacency.community[v], poi.community[v]));
  out.num_communities = next;
  return out;
}

CommunityMapping compose_mapping(const StationPartition& adjacency,
                                 const StationPartition& poi,
                                 double modularity_adjacency, double modularity_poi) {
  const StationPartition joint = compose_partitions(adjacency, poi);
  CommunityMapping mapping;
  mapping.origin_map = joint.community;
  mapping.destination_map = joint.community;
  mapping.origin_communities = joint.num_communities;
  mapping.destination_communities = joint.num_communities;
  mapping.modularity_adjacency = modularity_adjacency;
  mapping.modularity_poi = modularity_poi;
  return mapping;
}

CommunityMapping align_mapping_to_vocab(const StationPartition& stations,
                                        const std::vector<std::string>& station_labels,
                                        const VocabularySpec& vocab,
                                        double modularity_adjacency, double modularity_poi) {
  if (stations.community.size() != station_labels.size())
    throw BadInputError("station label list does not match partition size");
  std::unordered_map<std::string, std::int32_t> by_label;
  for (std::size_t i = 0; i < station_labels.size(); ++i)
    by_label.emplace(station_labels[i], static_cast<std::int32_t>(i));

  CommunityMapping mapping;
  mapping.origin_communities = stations.num_communities;
  mapping.destination_communities = stations.num_communities;
  mapping.modularity_adjacency = modularity_adjacency;
  mapping.modularity_poi = modularity_poi;
  for (int d : {kOrigin, kDestination}) {
    auto& map = d == kOrigin ? mapping.origin_map : mapping.destination_map;
    map.assign(vocab.labels[d].size(), -1);
    for (std::size_t w = 0; w < vocab.labels[d].size(); ++w) {
      auto it = by_label.find(vocab.labels[d][w]);
      if (it != by_label.end()) map[w] = stations.community[it->second];
    }
  }
  return mapping;
}

}  // namespace tripclust
