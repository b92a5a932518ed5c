// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tripclust/errors.hpp"

namespace tripclust {

// The three categorical dimensions of a trip record.
inline constexpr int kNumDims = 3;
enum Dim : int { kOrigin = 0, kDestination = 1, kTime = 2 };
const char* dim_name(int dim);

// One trip: indices into the per-dimension vocabularies.
struct Trip {
  std::int32_t origin = 0;
  std::int32_t destination = 0;
  std::int32_t time = 0;

  std::int32_t element(int dim) const {
    return dim == kOrigin ? origin : dim == kDestination ? destination : time;
  }
  bool operator==(const Trip&) const = default;
};

struct VocabularySpec {
  std::array<std::vector<std::string>, kNumDims> labels;
  std::array<std::unordered_map<std::string, std::int32_t>, kNumDims> index;

  // Validates uniqueness per dimension and builds the lookup tables.
  static VocabularySpec from_labels(std::array<std::vector<std::string>, kNumDims> labels);

  std::int32_t size(int dim) const { return static_cast<std::int32_t>(labels[dim].size()); }
  std::array<std::int32_t, kNumDims> sizes() const {
    return {size(kOrigin), size(kDestination), size(kTime)};
  }
  std::int64_t flat_size() const {
    return std::int64_t{size(kOrigin)} * size(kDestination) * size(kTime);
  }
};

// One passenger: an ordered bag of trips plus cached per-dimension element
// counts (element index -> occurrence count, sorted, no zero entries).
struct PassengerDoc {
  std::string passenger_id;
  std::vector<Trip> trips;
  std::array<std::vector<std::pair<std::int32_t, std::int32_t>>, kNumDims> counts;

  std::int64_t trip_count() const { return static_cast<std::int64_t>(trips.size()); }
  void rebuild_counts();
};

struct Corpus {
  VocabularySpec vocab;
  std::vector<PassengerDoc> docs;
  std::int64_t total_trips = 0;

  std::int64_t num_passengers() const { return static_cast<std::int64_t>(docs.size()); }
};

// Raw input record, labels still unresolved.
struct TripRecord {
  std::string passenger_id;
  std::string origin;
  std::string destination;
  std::string time;
};

// Builds a corpus from raw records. Vocabularies come from distinct labels in
// first-appearance order unless `fixed_vocab` is supplied, in which case a
// label outside it raises UnknownLabelError. Passengers keep their trips in
// input order; passenger order is first appearance.
Corpus ingest_trips(std::span<const TripRecord> records,
                    const VocabularySpec* fixed_vocab = nullptr);

// Station -> community index maps, one per OD dimension, aligned to a
// specific corpus vocabulary (entry -1 = station not covered).
struct CommunityMapping {
  std::vector<std::int32_t> origin_map;
  std::vector<std::int32_t> destination_map;
  std::int32_t origin_communities = 0;
  std::int32_t destination_communities = 0;
  double modularity_adjacency = 0.0;
  double modularity_poi = 0.0;
};

// Replaces origin/destination indices by their community indices; the OD
// vocabularies shrink to the community counts (labels "c0", "c1", ...), the
// time dimension is untouched, and per-doc counts are re-aggregated.
Corpus remap_with_communities(const Corpus& corpus, const CommunityMapping& mapping);

// CSV with header `passenger_id,origin,destination,time`. Labels are plain
// tokens; no quoting.
std::vector<TripRecord> read_trip_records_csv(const std::string& path);
void write_trips_csv(const Corpus& corpus, const std::string& path);

// Sidecar vocabulary file: one label per line.
std::vector<std::string> read_vocab_file(const std::string& path);

}  // namespace tripclust
