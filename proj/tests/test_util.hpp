// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "tripclust/corpus.hpp"

namespace tripclust::test {

// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;

  TempDir() {
    static int counter = 0;
    const auto base = std::filesystem::temp_directory_path();
    do {
      path = base / ("tripclust_test_" + std::to_string(::getpid()) + "_" +
                     std::to_string(counter++));
    } while (std::filesystem::exists(path));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path / name).string(); }
};

inline VocabularySpec binary_vocab() {
  return VocabularySpec::from_labels({{{"A", "B"}, {"X", "Y"}, {"08", "09"}}});
}

inline TripRecord rec(std::string pid, std::string o, std::string d, std::string t) {
  return TripRecord{std::move(pid), std::move(o), std::move(d), std::move(t)};
}

// Two passengers with the same single trip over the 2x2x2 vocabulary; the
// worked example setting for the weight formulas.
inline Corpus identical_pair_corpus() {
  const VocabularySpec vocab = binary_vocab();
  const std::vector<TripRecord> records = {rec("p1", "A", "X", "08"),
                                           rec("p2", "A", "X", "08")};
  return ingest_trips(records, &vocab);
}

}  // namespace tripclust::test
