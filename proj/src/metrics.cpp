// Apache License, Version 2.0, refer to LICENSE.txt

#include "tripclust/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "tripclust/errors.hpp"

namespace tripclust {

double SparseVector::squared_norm() const {
  double sq = 0.0;
  for (const auto& [idx, val] : items) {
    (void)idx;
    sq += val * val;
  }
  return sq;
}

PassengerVectors vectorize(const Corpus& corpus, bool normalize, Execution exec) {
  PassengerVectors out;
  out.ambient_dim = corpus.vocab.flat_size();
  out.rows.resize(corpus.docs.size());
  const std::int64_t v_d = corpus.vocab.size(kDestination);
  const std::int64_t v_t = corpus.vocab.size(kTime);

  const auto fill_row = [&](std::int64_t u) {
    const PassengerDoc& doc = corpus.docs[u];
    std::map<std::int64_t, double> acc;
    for (const Trip& t : doc.trips) {
      const std::int64_t flat = (static_cast<std::int64_t>(t.origin) * v_d + t.destination) * v_t +
                                t.time;
      acc[flat] += 1.0;
    }
    SparseVector& row = out.rows[u];
    row.items.assign(acc.begin(), acc.end());
    if (normalize && doc.trip_count() > 0) {
      const double inv = 1.0 / static_cast<double>(doc.trip_count());
      for (auto& [idx, val] : row.items) val *= inv;
    }
  };

  const std::int64_t m = static_cast<std::int64_t>(corpus.docs.size());
  constexpr std::size_t kParallelThreshold = 1024;
  if (run_parallel(exec, static_cast<std::size_t>(m), kParallelThreshold)) {
#pragma omp parallel for schedule(static)
    for (std::int64_t u = 0; u < m; ++u) fill_row(u);
  } else {
    for (std::int64_t u = 0; u < m; ++u) fill_row(u);
  }
  return out;
}

namespace {

// Scatter decomposition shared by the three indices. Cluster sums are built
// per cluster in member order and reduced in cluster order, so results do
// not depend on the execution policy.
struct Scatter {
  int num_clusters = 0;
  std::vector<std::int64_t> sizes;
  std::vector<double> within;          // sum_{u in C_k} ||d_u - c_k||^2 per cluster
  std::vector<SparseVector> centroid_sums;  // sum of member vectors per cluster
  SparseVector global_sum;
  double total_scatter = 0.0;  // sum_u ||d_u - g||^2
};

SparseVector sum_vectors(const std::vector<SparseVector>& rows,
                         std::span<const std::int64_t> members) {
  std::vector<std::pair<std::int64_t, double>> all;
  std::size_t total = 0;
  for (std::int64_t u : members) total += rows[u].items.size();
  all.reserve(total);
  for (std::int64_t u : members)
    all.insert(all.end(), rows[u].items.begin(), rows[u].items.end());
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseVector out;
  for (const auto& [idx, val] : all) {
    if (!out.items.empty() && out.items.back().first == idx) {
      out.items.back().second += val;
    } else {
      out.items.emplace_back(idx, val);
    }
  }
  return out;
}

double dot(const SparseVector& a, const SparseVector& b) {
  double acc = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.items.size() && j < b.items.size()) {
    if (a.items[i].first < b.items[j].first) {
      ++i;
    } else if (a.items[i].first > b.items[j].first) {
      ++j;
    } else {
      acc += a.items[i].second * b.items[j].second;
      ++i;
      ++j;
    }
  }
  return acc;
}

Scatter compute_scatter(const PassengerVectors& vectors,
                        std::span<const std::int32_t> assignment, Execution exec) {
  if (assignment.size() != vectors.rows.size())
    throw BadInputError("assignment length does not match vector count");
  if (vectors.rows.empty()) throw BadInputError("no vectors");

  std::map<std::int32_t, std::int32_t> label_to_dense;
  for (std::int32_t label : assignment) {
    if (label < 0) throw BadInputError("negative cluster label");
    label_to_dense.emplace(label, 0);
  }
  std::int32_t next = 0;
  for (auto& [label, dense] : label_to_dense) {
    (void)label;
    dense = next++;
  }

  Scatter scatter;
  scatter.num_clusters = next;
  scatter.sizes.assign(next, 0);
  scatter.within.assign(next, 0.0);
  scatter.centroid_sums.resize(next);

  std::vector<std::vector<std::int64_t>> members(next);
  for (std::size_t u = 0; u < assignment.size(); ++u) {
    const std::int32_t k = label_to_dense.at(assignment[u]);
    members[k].push_back(static_cast<std::int64_t>(u));
    ++scatter.sizes[k];
  }

  const auto cluster_pass = [&](std::int32_t k) {
    scatter.centroid_sums[k] = sum_vectors(vectors.rows, members[k]);
    double sq = 0.0;
    for (std::int64_t u : members[k]) sq += vectors.rows[u].squared_norm();
    // sum ||d_u - c||^2 = sum ||d_u||^2 - ||s||^2 / m
    scatter.within[k] =
        sq - scatter.centroid_sums[k].squared_norm() / static_cast<double>(scatter.sizes[k]);
    scatter.within[k] = std::max(scatter.within[k], 0.0);  // clamp round-off
  };

  constexpr std::size_t kParallelThreshold = 8;
  if (run_parallel(exec, static_cast<std::size_t>(next), kParallelThreshold)) {
#pragma omp parallel for schedule(dynamic)
    for (std::int32_t k = 0; k < next; ++k) cluster_pass(k);
  } else {
    for (std::int32_t k = 0; k < next; ++k) cluster_pass(k);
  }

  std::vector<std::int64_t> everyone(vectors.rows.size());
  for (std::size_t u = 0; u < everyone.size(); ++u) everyone[u] = static_cast<std::int64_t>(u);
  scatter.global_sum = sum_vectors(vectors.rows, everyone);
  double total_sq = 0.0;
  for (const SparseVector& row : vectors.rows) total_sq += row.squared_norm();
  const double m = static_cast<double>(vectors.rows.size());
  scatter.total_scatter =
      std::max(total_sq - scatter.global_sum.squared_norm() / m, 0.0);
  return scatter;
}

double within_total(const Scatter& scatter) {
  double acc = 0.0;
  for (double w : scatter.within) acc += w;
  return acc;
}

// ||s_a / m_a - s_b / m_b||^2 without materializing dense centroids.
double centroid_sq_distance(const SparseVector& sum_a, double m_a, const SparseVector& sum_b,
                            double m_b) {
  const double a2 = sum_a.squared_norm() / (m_a * m_a);
  const double b2 = sum_b.squared_norm() / (m_b * m_b);
  const double ab = dot(sum_a, sum_b) / (m_a * m_b);
  return std::max(a2 - 2.0 * ab + b2, 0.0);
}

}  // namespace

double rmsstd(const PassengerVectors& vectors, std::span<const std::int32_t> assignment,
              Execution exec) {
  const Scatter scatter = compute_scatter(vectors, assignment, exec);
  std::int64_t dof = 0;
  for (std::int64_t size : scatter.sizes) dof += size - 1;
  if (dof <= 0) throw UndefinedError("rmsstd needs a cluster with at least two members");
  if (vectors.ambient_dim <= 0) throw BadInputError("ambient dimension must be positive");
  return std::sqrt(within_total(scatter) /
                   (static_cast<double>(vectors.ambient_dim) * static_cast<double>(dof)));
}

double rs(const PassengerVectors& vectors, std::span<const std::int32_t> assignment,
          Execution exec) {
  const Scatter scatter = compute_scatter(vectors, assignment, exec);
  if (scatter.total_scatter <= 0.0)
    throw UndefinedError("rs undefined when all vectors are identical");
  const double value = (scatter.total_scatter - within_total(scatter)) / scatter.total_scatter;
  return std::clamp(value, 0.0, 1.0);  // within <= total up to round-off
}

double ch_index(const PassengerVectors& vectors, std::span<const std::int32_t> assignment,
                bool weighted, Execution exec) {
  const Scatter scatter = compute_scatter(vectors, assignment, exec);
  const std::int64_t m = static_cast<std::int64_t>(vectors.rows.size());
  const int k = scatter.num_clusters;
  if (k < 2 || k >= m) throw UndefinedError("ch needs 2 <= K <= M-1");

  double between = 0.0;
  for (int c = 0; c < k; ++c) {
    const double d2 = centroid_sq_distance(scatter.centroid_sums[c],
                                           static_cast<double>(scatter.sizes[c]),
                                           scatter.global_sum, static_cast<double>(m));
    between += weighted ? static_cast<double>(scatter.sizes[c]) * d2 : d2;
  }
  const double within = within_total(scatter);
  const double numerator = between / static_cast<double>(k - 1);
  if (within <= 0.0) return std::numeric_limits<double>::infinity();
  return numerator / (within / static_cast<double>(m - k));
}

namespace {

struct Contingency {
  std::map<std::pair<std::int32_t, std::int32_t>, std::int64_t> joint;
  std::map<std::int32_t, std::int64_t> rows;
  std::map<std::int32_t, std::int64_t> cols;
  std::int64_t total = 0;
};

Contingency cross_tabulate(std::span<const std::int32_t> a, std::span<const std::int32_t> b) {
  if (a.size() != b.size()) throw BadInputError("label arrays differ in length");
  if (a.size() < 2) throw BadInputError("need at least two labelled items");
  Contingency table;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++table.joint[{a[i], b[i]}];
    ++table.rows[a[i]];
    ++table.cols[b[i]];
    ++table.total;
  }
  return table;
}

double entropy(const std::map<std::int32_t, std::int64_t>& counts, double total) {
  double h = 0.0;
  for (const auto& [label, count] : counts) {
    (void)label;
    const double p = static_cast<double>(count) / total;
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

}  // namespace

double nmi(std::span<const std::int32_t> labels_a, std::span<const std::int32_t> labels_b) {
  const Contingency table = cross_tabulate(labels_a, labels_b);
  const double n = static_cast<double>(table.total);
  double info = 0.0;
  for (const auto& [cell, count] : table.joint) {
    const double p = static_cast<double>(count) / n;
    const double pa = static_cast<double>(table.rows.at(cell.first)) / n;
    const double pb = static_cast<double>(table.cols.at(cell.second)) / n;
    info += p * std::log(p / (pa * pb));
  }
  const double denom = 0.5 * (entropy(table.rows, n) + entropy(table.cols, n));
  if (denom <= 0.0) return 1.0;  // both partitions trivial -> identical
  return std::clamp(info / denom, 0.0, 1.0);
}

double ari(std::span<const std::int32_t> labels_a, std::span<const std::int32_t> labels_b) {
  const Contingency table = cross_tabulate(labels_a, labels_b);
  const auto choose2 = [](std::int64_t x) {
    return static_cast<double>(x) * static_cast<double>(x - 1) / 2.0;
  };
  double sum_joint = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [cell, count] : table.joint) {
    (void)cell;
    sum_joint += choose2(count);
  }
  for (const auto& [label, count] : table.rows) {
    (void)label;
    sum_rows += choose2(count);
  }
  for (const auto& [label, count] : table.cols) {
    (void)label;
    sum_cols += choose2(count);
  }
  const double pairs = choose2(table.total);
  const double expected = sum_rows * sum_cols / pairs;
  const double maximum = 0.5 * (sum_rows + sum_cols);
  if (maximum == expected) return 1.0;  // both partitions trivial
  return (sum_joint - expected) / (maximum - expected);
}

MetricsReport evaluate_clustering(const PassengerVectors& vectors,
                                  std::span<const std::int32_t> assignment,
                                  std::span<const std::int32_t> true_labels,
                                  bool weighted_ch) {
  MetricsReport report;
  {
    std::map<std::int32_t, std::int64_t> sizes;
    for (std::int32_t z : assignment) ++sizes[z];
    report.num_clusters = static_cast<int>(sizes.size());
  }
  try {
    report.rmsstd = rmsstd(vectors, assignment);
  } catch (const UndefinedError&) {
  }
  try {
    report.rs = rs(vectors, assignment);
  } catch (const UndefinedError&) {
  }
  try {
    const double ch = ch_index(vectors, assignment, weighted_ch);
    if (std::isinf(ch)) {
      report.ch_infinite = true;
    } else {
      report.ch = ch;
    }
  } catch (const UndefinedError&) {
  }
  if (!true_labels.empty()) {
    report.nmi = nmi(assignment, true_labels);
    report.ari = ari(assignment, true_labels);
  }
  return report;
}

}  // namespace tripclust
