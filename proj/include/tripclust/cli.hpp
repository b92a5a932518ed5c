// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "tripclust/generator.hpp"
#include "tripclust/weights.hpp"

namespace tripclust::cli {

struct GenerateOptions {
  std::string out_dir;
  std::string recipe = "separated4";  // or "priors"
  GeneratorConfig generator;
};

struct CommunitiesOptions {
  std::string stations_path;
  std::string poi_path;
  std::string out_dir;
  int hops = 4;
  double gamma = 0.7;
  std::uint64_t seed = 0;
};

struct FitOptions {
  std::string trips_path;
  std::string out_dir;
  Hyperparams hyper;
  std::string communities_path;  // optional: mapping.csv switches on OD remapping
  std::array<std::string, kNumDims> vocab_paths;  // optional sidecar vocabularies
  int chains = 1;
};

struct EvaluateOptions {
  std::string trips_path;
  std::string assignments_path;
  std::string labels_path;  // optional ground truth
  std::string out_dir;
  std::string communities_path;  // optional, mirrors the fit-side remapping
  std::array<std::string, kNumDims> vocab_paths;
  bool normalize_vectors = false;
  bool weighted_ch = false;
};

// Each command validates its inputs, runs, writes its artifacts plus a
// run_manifest.json into out_dir, and prints a short summary. Errors are
// thrown; run_cli maps them to exit codes.
void cmd_generate(const GenerateOptions& options);
void cmd_communities(const CommunitiesOptions& options);
void cmd_fit(const FitOptions& options);
void cmd_evaluate(const EvaluateOptions& options);

// Full argv front end. Returns 0 on success, 1 on runtime failure, 2 on
// configuration or input validation failure.
int run_cli(int argc, const char* const* argv);

}  // namespace tripclust::cli
