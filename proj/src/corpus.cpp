// Apache License, Version 2.0, refer to LICENSE.txt

#include "tripclust/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace tripclust {

const char* dim_name(int dim) {
  switch (dim) {
    case kOrigin:
      return "origin";
    case kDestination:
      return "destination";
    default:
      return "time";
  }
}

VocabularySpec VocabularySpec::from_labels(
    std::array<std::vector<std::string>, kNumDims> labels) {
  VocabularySpec vocab;
  vocab.labels = std::move(labels);
  for (int d = 0; d < kNumDims; ++d) {
    auto& idx = vocab.index[d];
    idx.reserve(vocab.labels[d].size());
    for (std::size_t i = 0; i < vocab.labels[d].size(); ++i) {
      const auto& lbl = vocab.labels[d][i];
      if (lbl.empty())
        throw BadInputError(std::string("empty ") + dim_name(d) + " label");
      if (!idx.emplace(lbl, static_cast<std::int32_t>(i)).second)
        throw BadInputError(std::string("duplicate ") + dim_name(d) + " label '" + lbl + "'");
    }
  }
  return vocab;
}

void PassengerDoc::rebuild_counts() {
  for (int d = 0; d < kNumDims; ++d) {
    std::map<std::int32_t, std::int32_t> acc;
    for (const Trip& t : trips) ++acc[t.element(d)];
    counts[d].assign(acc.begin(), acc.end());
  }
}

Corpus ingest_trips(std::span<const TripRecord> records,
                    const VocabularySpec* fixed_vocab) {
  if (records.empty()) throw EmptyInputError();

  Corpus corpus;
  std::array<std::unordered_map<std::string, std::int32_t>, kNumDims> lookup;
  if (fixed_vocab) {
    corpus.vocab = *fixed_vocab;
  }

  auto resolve = [&](int d, const std::string& label) -> std::int32_t {
    if (label.empty()) throw BadInputError(std::string("empty ") + dim_name(d) + " label");
    if (fixed_vocab) {
      auto it = corpus.vocab.index[d].find(label);
      if (it == corpus.vocab.index[d].end())
        throw UnknownLabelError(dim_name(d), label);
      return it->second;
    }
    auto [it, inserted] =
        lookup[d].emplace(label, static_cast<std::int32_t>(corpus.vocab.labels[d].size()));
    if (inserted) corpus.vocab.labels[d].push_back(label);
    return it->second;
  };

  std::unordered_map<std::string, std::size_t> doc_index;
  for (const TripRecord& rec : records) {
    if (rec.passenger_id.empty()) throw BadInputError("empty passenger_id");
    Trip trip{resolve(kOrigin, rec.origin), resolve(kDestination, rec.destination),
              resolve(kTime, rec.time)};
    auto [it, inserted] = doc_index.emplace(rec.passenger_id, corpus.docs.size());
    if (inserted) {
      corpus.docs.push_back(PassengerDoc{rec.passenger_id, {}, {}});
    }
    corpus.docs[it->second].trips.push_back(trip);
    ++corpus.total_trips;
  }

  if (!fixed_vocab) {
    for (int d = 0; d < kNumDims; ++d) corpus.vocab.index[d] = std::move(lookup[d]);
  }
  for (PassengerDoc& doc : corpus.docs) doc.rebuild_counts();
  return corpus;
}

Corpus remap_with_communities(const Corpus& corpus, const CommunityMapping& mapping) {
  const auto check = [&](int d, const std::vector<std::int32_t>& map, std::int32_t size,
                         std::int32_t communities) {
    if (static_cast<std::int32_t>(map.size()) < size)
      throw UnmappedStationError(dim_name(d), static_cast<std::int32_t>(map.size()));
    for (std::int32_t i = 0; i < size; ++i) {
      if (map[i] < 0 || map[i] >= communities) throw UnmappedStationError(dim_name(d), i);
    }
  };
  check(kOrigin, mapping.origin_map, corpus.vocab.size(kOrigin), mapping.origin_communities);
  check(kDestination, mapping.destination_map, corpus.vocab.size(kDestination),
        mapping.destination_communities);

  Corpus out;
  std::array<std::vector<std::string>, kNumDims> labels;
  for (std::int32_t c = 0; c < mapping.origin_communities; ++c)
    labels[kOrigin].push_back("c" + std::to_string(c));
  for (std::int32_t c = 0; c < mapping.destination_communities; ++c)
    labels[kDestination].push_back("c" + std::to_string(c));
  labels[kTime] = corpus.vocab.labels[kTime];
  out.vocab = VocabularySpec::from_labels(std::move(labels));

  out.docs.reserve(corpus.docs.size());
  for (const PassengerDoc& doc : corpus.docs) {
    PassengerDoc mapped;
    mapped.passenger_id = doc.passenger_id;
    mapped.trips.reserve(doc.trips.size());
    for (const Trip& t : doc.trips) {
      mapped.trips.push_back(Trip{mapping.origin_map[t.origin],
                                  mapping.destination_map[t.destination], t.time});
    }
    mapped.rebuild_counts();
    out.docs.push_back(std::move(mapped));
  }
  out.total_trips = corpus.total_trips;
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

std::vector<TripRecord> read_trip_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trips file", path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty trips file", path);
  if (strip_cr(line) != "passenger_id,origin,destination,time")
    throw BadInputError("bad trips header in " + path + ": '" + line + "'");

  std::vector<TripRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 4)
      throw BadInputError(path + ":" + std::to_string(lineno) + ": expected 4 fields, got " +
                          std::to_string(fields.size()));
    records.push_back(TripRecord{fields[0], fields[1], fields[2], fields[3]});
  }
  return records;
}

void write_trips_csv(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trips file", path);
  out << "passenger_id,origin,destination,time\n";
  for (const PassengerDoc& doc : corpus.docs) {
    for (const Trip& t : doc.trips) {
      out << doc.passenger_id << ',' << corpus.vocab.labels[kOrigin][t.origin] << ','
          << corpus.vocab.labels[kDestination][t.destination] << ','
          << corpus.vocab.labels[kTime][t.time] << '\n';
    }
  }
  if (!out) throw IoError("write failed", path);
}

std::vector<std::string> read_vocab_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vocabulary file", path);
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (!line.empty()) labels.push_back(line);
  }
  return labels;
}

}  // namespace tripclust
