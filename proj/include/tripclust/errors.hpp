// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tripclust {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Ingestion / configuration.
struct EmptyInputError : Error {
  EmptyInputError() : Error("empty input stream") {}
};

struct UnknownLabelError : Error {
  UnknownLabelError(const std::string& dim, const std::string& lbl)
      : Error("label '" + lbl + "' not in the fixed " + dim + " vocabulary"),
        dimension(dim),
        label(lbl) {}
  std::string dimension;
  std::string label;
};

struct UnmappedStationError : Error {
  UnmappedStationError(const std::string& dim, std::int32_t idx)
      : Error(dim + " station index " + std::to_string(idx) +
              " missing from community mapping"),
        dimension(dim),
        index(idx) {}
  std::string dimension;
  std::int32_t index;
};

struct BadInputError : Error {
  using Error::Error;
};

struct BadConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  IoError(const std::string& what, const std::string& p)
      : Error(what + ": " + p), path(p) {}
  std::string path;
};

// Numerics / sampling.
struct CorruptStatsError : Error {
  using Error::Error;
};

struct DegenerateDistributionError : Error {
  DegenerateDistributionError() : Error("all sampling weights are zero") {}
};

struct DegeneratePoiError : Error {
  explicit DegeneratePoiError(std::int32_t idx)
      : Error("POI vector " + std::to_string(idx) + " has zero norm"),
        index(idx) {}
  std::int32_t index;
};

// Metrics / modularity preconditions (RMSSTD on all-singleton partitions,
// CH at K=1 or K=M, modularity of an edgeless graph, ...).
struct UndefinedError : Error {
  using Error::Error;
};

}  // namespace tripclust
