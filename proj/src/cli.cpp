// Apache License, Version 2.0, refer to LICENSE.txt

#include "tripclust/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <CLI11.hpp>
#include <json.hpp>

#include "tripclust/errors.hpp"
#include "tripclust/graphs.hpp"
#include "tripclust/metrics.hpp"
#include "tripclust/rng.hpp"
#include "tripclust/sampler.hpp"

namespace tripclust::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "tripclust 0.1.0";

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw BadConfigError(std::string(what) + " path is required");
  if (!fs::exists(path)) throw IoError(std::string(what) + " file not found", path);
}

void ensure_out_dir(const std::string& out_dir) {
  if (out_dir.empty()) throw BadConfigError("output directory is required");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory", out_dir);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing", path);
  out << text;
  if (!out) throw IoError("write failed", path);
}

void write_json(const std::string& path, const json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const json& options) {
  json manifest;
  manifest["version"] = kVersion;
  manifest["command"] = command;
  manifest["options"] = options;
  write_json((fs::path(out_dir) / "run_manifest.json").string(), manifest);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                               const std::string& header_prefix) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open", path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty file", path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind(header_prefix, 0) != 0)
    throw BadInputError("bad header in " + path + ": '" + line + "'");
  std::vector<std::vector<std::string>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(split_line(line));
    if (rows.back().size() < 2)
      throw BadInputError(path + ":" + std::to_string(lineno) + ": too few fields");
  }
  return rows;
}

std::int32_t parse_int_field(const std::string& field, const std::string& where) {
  try {
    std::size_t pos = 0;
    const long value = std::stol(field, &pos);
    if (pos != field.size()) throw std::invalid_argument(field);
    return static_cast<std::int32_t>(value);
  } catch (const std::exception&) {
    throw BadInputError(where + ": expected an integer, got '" + field + "'");
  }
}

Corpus load_corpus(const std::string& trips_path,
                   const std::array<std::string, kNumDims>& vocab_paths) {
  const auto records = read_trip_records_csv(trips_path);
  const bool fixed = !vocab_paths[0].empty() || !vocab_paths[1].empty() ||
                     !vocab_paths[2].empty();
  if (!fixed) return ingest_trips(records);
  std::array<std::vector<std::string>, kNumDims> labels;
  for (int d = 0; d < kNumDims; ++d) {
    if (vocab_paths[d].empty())
      throw BadConfigError("sidecar vocabularies must be given for all three dimensions");
    require_file(vocab_paths[d], dim_name(d));
    labels[d] = read_vocab_file(vocab_paths[d]);
  }
  const VocabularySpec vocab = VocabularySpec::from_labels(std::move(labels));
  return ingest_trips(records, &vocab);
}

CommunityMapping load_mapping_for(const Corpus& corpus, const std::string& mapping_path) {
  const auto rows = read_csv(mapping_path, "station,community");
  std::vector<std::string> station_labels;
  StationPartition stations;
  for (const auto& row : rows) {
    station_labels.push_back(row[0]);
    stations.community.push_back(parse_int_field(row[1], mapping_path));
    if (stations.community.back() < 0)
      throw BadInputError(mapping_path + ": negative community index");
  }
  if (stations.community.empty()) throw BadInputError(mapping_path + ": no mappings");
  stations.num_communities =
      *std::max_element(stations.community.begin(), stations.community.end()) + 1;
  return align_mapping_to_vocab(stations, station_labels, corpus.vocab, 0.0, 0.0);
}

json hyper_to_json(const Hyperparams& hyper) {
  json doc;
  doc["mode"] = hyper.mode == Mode::dpmm ? "dpmm" : "dmm";
  doc["alpha"] = hyper.alpha;
  doc["beta_origin"] = hyper.beta[kOrigin];
  doc["beta_destination"] = hyper.beta[kDestination];
  doc["beta_time"] = hyper.beta[kTime];
  doc["min_cluster_size"] = hyper.min_cluster_size;
  doc["max_iter"] = hyper.max_iter;
  doc["initial_clusters"] = hyper.initial_clusters;
  doc["disband_every_sweep"] = hyper.disband_every_sweep;
  doc["seed"] = hyper.seed;
  return doc;
}

json trace_to_json(const std::vector<TraceEntry>& trace) {
  json arr = json::array();
  for (const TraceEntry& entry : trace) {
    json row;
    row["iteration"] = entry.iteration;
    row["clusters"] = entry.num_clusters;
    row["sizes"] = entry.sizes;
    arr.push_back(std::move(row));
  }
  return arr;
}

json top_elements(const std::vector<double>& row, const std::vector<std::string>& labels,
                  std::size_t top_n) {
  std::vector<std::size_t> order(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
  json arr = json::array();
  for (std::size_t i = 0; i < std::min(top_n, order.size()); ++i) {
    json item;
    item["label"] = labels[order[i]];
    item["p"] = row[order[i]];
    arr.push_back(std::move(item));
  }
  return arr;
}

json result_to_json(const Corpus& corpus, const Hyperparams& hyper,
                    const ClusteringResult& result) {
  json doc;
  doc["mode"] = hyper.mode == Mode::dpmm ? "dpmm" : "dmm";
  doc["passengers"] = corpus.num_passengers();
  doc["total_trips"] = corpus.total_trips;
  doc["K"] = result.num_clusters;
  doc["no_surviving_cluster"] = result.no_surviving_cluster;
  doc["theta_hat"] = result.theta_hat;
  json clusters = json::array();
  const char* dim_keys[kNumDims] = {"top_origins", "top_destinations", "top_times"};
  for (int k = 0; k < result.num_clusters; ++k) {
    json cluster;
    cluster["cluster"] = k;
    cluster["weight"] = result.theta_hat[k];
    for (int d = 0; d < kNumDims; ++d)
      cluster[dim_keys[d]] = top_elements(result.phi_hat[d][k], corpus.vocab.labels[d], 10);
    clusters.push_back(std::move(cluster));
  }
  doc["clusters"] = std::move(clusters);
  doc["trace"] = trace_to_json(result.trace);
  return doc;
}

void write_assignments_csv(const std::string& path, const Corpus& corpus,
                           const std::vector<std::int32_t>& assignments) {
  std::ostringstream out;
  out << "passenger_id,cluster\n";
  for (std::size_t u = 0; u < corpus.docs.size(); ++u)
    out << corpus.docs[u].passenger_id << ',' << assignments[u] << '\n';
  write_text(path, out.str());
}

std::vector<std::int32_t> read_aligned_labels(const std::string& path, const Corpus& corpus,
                                              const std::string& header_prefix) {
  const auto rows = read_csv(path, header_prefix);
  std::unordered_map<std::string, std::int32_t> by_id;
  for (const auto& row : rows) {
    if (!by_id.emplace(row[0], parse_int_field(row[1], path)).second)
      throw BadInputError(path + ": duplicate passenger '" + row[0] + "'");
  }
  std::vector<std::int32_t> labels;
  labels.reserve(corpus.docs.size());
  for (const PassengerDoc& doc : corpus.docs) {
    auto it = by_id.find(doc.passenger_id);
    if (it == by_id.end())
      throw BadInputError(path + ": no entry for passenger '" + doc.passenger_id + "'");
    labels.push_back(it->second);
  }
  return labels;
}

double mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc / static_cast<double>(values.size());
}

}  // namespace

void cmd_generate(const GenerateOptions& options) {
  GeneratorConfig config = options.generator;
  config.validate();
  ensure_out_dir(options.out_dir);

  const SyntheticCorpus synthetic = sample_corpus(config);
  const fs::path out(options.out_dir);
  write_trips_csv(synthetic.corpus, (out / "trips.csv").string());

  {
    std::ostringstream labels;
    labels << "passenger_id,true_cluster\n";
    for (std::size_t u = 0; u < synthetic.corpus.docs.size(); ++u)
      labels << synthetic.corpus.docs[u].passenger_id << ',' << synthetic.true_labels[u]
             << '\n';
    write_text((out / "labels.csv").string(), labels.str());
  }

  json params;
  params["theta"] = synthetic.true_theta;
  params["phi"]["origin"] = synthetic.true_phi[kOrigin];
  params["phi"]["destination"] = synthetic.true_phi[kDestination];
  params["phi"]["time"] = synthetic.true_phi[kTime];
  write_json((out / "params.json").string(), params);

  json echo;
  echo["recipe"] = options.recipe;
  echo["passengers"] = config.num_passengers;
  echo["trip_law"] =
      config.trip_law == GeneratorConfig::TripLaw::fixed ? "fixed" : "shifted_poisson";
  echo["trips_mean"] = config.trips_mean;
  echo["vocab_origin"] = config.vocab_sizes[kOrigin];
  echo["vocab_destination"] = config.vocab_sizes[kDestination];
  echo["vocab_time"] = config.vocab_sizes[kTime];
  echo["mode"] = config.mode == Mode::dpmm ? "dpmm" : "dmm";
  echo["components"] = config.num_components;
  echo["alpha"] = config.alpha;
  echo["seed"] = config.seed;
  write_manifest(options.out_dir, "generate", echo);

  const double nbar = static_cast<double>(synthetic.corpus.total_trips) /
                      static_cast<double>(synthetic.corpus.num_passengers());
  std::cout << "generated M=" << synthetic.corpus.num_passengers() << " passengers, N_bar="
            << nbar << ", vocab " << synthetic.corpus.vocab.size(kOrigin) << "x"
            << synthetic.corpus.vocab.size(kDestination) << "x"
            << synthetic.corpus.vocab.size(kTime) << " -> " << options.out_dir << "\n";
}

void cmd_communities(const CommunitiesOptions& options) {
  require_file(options.stations_path, "stations");
  require_file(options.poi_path, "poi");
  if (options.hops < 1) throw BadConfigError("hops must be >= 1");
  if (!(options.gamma > 0.0) || options.gamma > 1.0)
    throw BadConfigError("gamma must be in (0, 1]");
  ensure_out_dir(options.out_dir);

  // The POI file defines the station universe.
  const auto poi_rows = read_csv(options.poi_path, "station");
  std::vector<std::string> station_labels;
  std::unordered_map<std::string, std::int32_t> station_index;
  std::vector<std::vector<double>> poi_vectors;
  for (const auto& row : poi_rows) {
    if (!station_index.emplace(row[0], static_cast<std::int32_t>(station_labels.size())).second)
      throw BadInputError(options.poi_path + ": duplicate station '" + row[0] + "'");
    station_labels.push_back(row[0]);
    std::vector<double> vec;
    for (std::size_t i = 1; i < row.size(); ++i) {
      try {
        vec.push_back(std::stod(row[i]));
      } catch (const std::exception&) {
        throw BadInputError(options.poi_path + ": bad POI value '" + row[i] + "'");
      }
    }
    poi_vectors.push_back(std::move(vec));
  }

  const auto edge_rows = read_csv(options.stations_path, "station_a,station_b");
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  for (const auto& row : edge_rows) {
    auto a = station_index.find(row[0]);
    auto b = station_index.find(row[1]);
    if (a == station_index.end())
      throw BadInputError(options.stations_path + ": station '" + row[0] + "' has no POI row");
    if (b == station_index.end())
      throw BadInputError(options.stations_path + ": station '" + row[1] + "' has no POI row");
    edges.emplace_back(a->second, b->second);
  }

  const auto n = static_cast<std::int32_t>(station_labels.size());
  const StationGraph hop_graph = build_hop_graph(n, edges, options.hops);
  const StationGraph poi_graph = build_poi_graph(poi_vectors, options.gamma);

  auto rng = make_substream(options.seed, "communities");
  const auto [part_adj, q_adj] = detect_communities(hop_graph, rng);
  const auto [part_poi, q_poi] = detect_communities(poi_graph, rng);
  const StationPartition joint = compose_partitions(part_adj, part_poi);

  const fs::path out(options.out_dir);
  {
    std::ostringstream mapping;
    mapping << "station,community\n";
    for (std::int32_t v = 0; v < n; ++v)
      mapping << station_labels[v] << ',' << joint.community[v] << '\n';
    write_text((out / "mapping.csv").string(), mapping.str());
  }

  json report;
  report["stations"] = n;
  report["adjacency"]["hops"] = options.hops;
  report["adjacency"]["edges"] = hop_graph.num_edges();
  report["adjacency"]["communities"] = part_adj.num_communities;
  report["adjacency"]["modularity"] = q_adj;
  report["poi"]["gamma"] = options.gamma;
  report["poi"]["edges"] = poi_graph.num_edges();
  report["poi"]["communities"] = part_poi.num_communities;
  report["poi"]["modularity"] = q_poi;
  report["joint_communities"] = joint.num_communities;
  write_json((out / "modularity_report.json").string(), report);

  json echo;
  echo["stations_path"] = options.stations_path;
  echo["poi_path"] = options.poi_path;
  echo["hops"] = options.hops;
  echo["gamma"] = options.gamma;
  echo["seed"] = options.seed;
  write_manifest(options.out_dir, "communities", echo);

  std::cout << "communities: adjacency " << part_adj.num_communities << " (Q=" << q_adj
            << "), poi " << part_poi.num_communities << " (Q=" << q_poi << "), joint "
            << joint.num_communities << " -> " << options.out_dir << "\n";
}

void cmd_fit(const FitOptions& options) {
  options.hyper.validate();
  if (options.chains < 1) throw BadConfigError("chains must be >= 1");
  require_file(options.trips_path, "trips");
  if (!options.communities_path.empty()) require_file(options.communities_path, "communities");
  ensure_out_dir(options.out_dir);

  Corpus corpus = load_corpus(options.trips_path, options.vocab_paths);
  std::int32_t communities_o = 0, communities_d = 0;
  if (!options.communities_path.empty()) {
    const CommunityMapping mapping = load_mapping_for(corpus, options.communities_path);
    corpus = remap_with_communities(corpus, mapping);
    communities_o = mapping.origin_communities;
    communities_d = mapping.destination_communities;
  }

  struct ChainOutcome {
    ClusteringResult result;
    double ch = -std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;
  };
  std::vector<ChainOutcome> chains(options.chains);
  const PassengerVectors vectors = vectorize(corpus);

  const auto run_chain = [&](int c) {
    Hyperparams hyper = options.hyper;
    hyper.seed = c == 0 ? options.hyper.seed
                        : make_substream(options.hyper.seed, "chain", c)();
    chains[c].seed = hyper.seed;
    chains[c].result = fit(corpus, hyper);
    try {
      const double ch = ch_index(vectors, chains[c].result.assignments);
      if (!std::isinf(ch)) chains[c].ch = ch;
    } catch (const UndefinedError&) {
    }
  };

  if (options.chains == 1) {
    run_chain(0);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(options.chains);
    for (int c = 0; c < options.chains; ++c) workers.emplace_back(run_chain, c);
    for (std::thread& w : workers) w.join();
  }

  int best = 0;
  for (int c = 1; c < options.chains; ++c) {
    if (chains[c].ch > chains[best].ch) best = c;
  }

  const fs::path out(options.out_dir);
  json timing;
  for (int c = 0; c < options.chains; ++c) {
    const ChainOutcome& chain = chains[c];
    json result_doc = result_to_json(corpus, options.hyper, chain.result);
    result_doc["chain"] = c;
    result_doc["chain_seed"] = chain.seed;
    if (communities_o > 0) {
      result_doc["communities"]["origins"] = communities_o;
      result_doc["communities"]["destinations"] = communities_d;
    }
    if (options.chains > 1) {
      write_json((out / ("result_chain" + std::to_string(c) + ".json")).string(), result_doc);
      write_assignments_csv((out / ("assignments_chain" + std::to_string(c) + ".csv")).string(),
                            corpus, chain.result.assignments);
    }
    if (c == best) {
      result_doc["best_chain"] = best;
      write_json((out / "result.json").string(), result_doc);
      write_assignments_csv((out / "assignments.csv").string(), corpus,
                            chain.result.assignments);
    }
    json chain_timing;
    chain_timing["chain"] = c;
    chain_timing["seconds_per_iteration"] = chain.result.seconds_per_iteration;
    chain_timing["mean_seconds_per_iteration"] = mean(chain.result.seconds_per_iteration);
    timing["chains"].push_back(std::move(chain_timing));
  }
  write_json((out / "timing.json").string(), timing);

  json echo;
  echo["trips_path"] = options.trips_path;
  echo["communities_path"] = options.communities_path;
  echo["chains"] = options.chains;
  echo["hyper"] = hyper_to_json(options.hyper);
  write_manifest(options.out_dir, "fit", echo);

  const ChainOutcome& winner = chains[best];
  std::cout << "fit: M=" << corpus.num_passengers() << ", K=" << winner.result.num_clusters
            << ", mean s/iter=" << mean(winner.result.seconds_per_iteration);
  if (options.chains > 1) std::cout << " (best chain " << best << ")";
  if (winner.result.no_surviving_cluster)
    std::cout << " [no cluster met the minimum size; disband skipped]";
  std::cout << " -> " << options.out_dir << "\n";
}

void cmd_evaluate(const EvaluateOptions& options) {
  require_file(options.trips_path, "trips");
  require_file(options.assignments_path, "assignments");
  if (!options.labels_path.empty()) require_file(options.labels_path, "labels");
  if (!options.communities_path.empty()) require_file(options.communities_path, "communities");
  ensure_out_dir(options.out_dir);

  Corpus corpus = load_corpus(options.trips_path, options.vocab_paths);
  if (!options.communities_path.empty()) {
    corpus = remap_with_communities(corpus, load_mapping_for(corpus, options.communities_path));
  }
  const std::vector<std::int32_t> assignment =
      read_aligned_labels(options.assignments_path, corpus, "passenger_id,cluster");
  std::vector<std::int32_t> truth;
  if (!options.labels_path.empty())
    truth = read_aligned_labels(options.labels_path, corpus, "passenger_id,true_cluster");

  const PassengerVectors vectors = vectorize(corpus, options.normalize_vectors);
  const MetricsReport report =
      evaluate_clustering(vectors, assignment, truth, options.weighted_ch);

  json doc;
  doc["K"] = report.num_clusters;
  doc["rmsstd"] = report.rmsstd ? json(*report.rmsstd) : json();
  doc["rs"] = report.rs ? json(*report.rs) : json();
  doc["ch"] = report.ch ? json(*report.ch) : json();
  doc["ch_infinite"] = report.ch_infinite;
  if (report.nmi) doc["nmi"] = *report.nmi;
  if (report.ari) doc["ari"] = *report.ari;
  doc["normalized_vectors"] = options.normalize_vectors;
  doc["weighted_ch"] = options.weighted_ch;
  write_json((fs::path(options.out_dir) / "metrics.json").string(), doc);

  json echo;
  echo["trips_path"] = options.trips_path;
  echo["assignments_path"] = options.assignments_path;
  echo["labels_path"] = options.labels_path;
  echo["communities_path"] = options.communities_path;
  echo["normalize_vectors"] = options.normalize_vectors;
  echo["weighted_ch"] = options.weighted_ch;
  write_manifest(options.out_dir, "evaluate", echo);

  std::cout << "evaluate: K=" << report.num_clusters;
  if (report.rmsstd) std::cout << ", RMSSTD=" << *report.rmsstd;
  if (report.rs) std::cout << ", RS=" << *report.rs;
  if (report.ch) std::cout << ", CH=" << *report.ch;
  if (report.ch_infinite) std::cout << ", CH=inf (zero within-scatter)";
  if (report.nmi) std::cout << ", NMI=" << *report.nmi;
  if (report.ari) std::cout << ", ARI=" << *report.ari;
  std::cout << " -> " << options.out_dir << "\n";
}

namespace {

int classify_error(const std::exception& e) {
  if (dynamic_cast<const BadConfigError*>(&e) || dynamic_cast<const BadInputError*>(&e) ||
      dynamic_cast<const IoError*>(&e) || dynamic_cast<const UnknownLabelError*>(&e) ||
      dynamic_cast<const UnmappedStationError*>(&e) ||
      dynamic_cast<const EmptyInputError*>(&e)) {
    return 2;
  }
  return 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Passenger clustering over origin/destination/time trip records"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "key=value config file (command line overrides win)");
  app.require_subcommand(1);

  GenerateOptions gen;
  double gen_beta = 0.1;
  std::string gen_mode = "dmm";
  std::string gen_trip_law = "fixed";
  auto* generate = app.add_subcommand("generate", "Sample a synthetic corpus");
  generate->add_option("--out", gen.out_dir, "output directory")->required();
  generate->add_option("--recipe", gen.recipe, "separated4 | priors")
      ->check(CLI::IsMember({"separated4", "priors"}));
  generate->add_option("--passengers", gen.generator.num_passengers, "number of passengers");
  generate->add_option("--trips", gen.generator.trips_mean, "trips per passenger (or mean)");
  auto* opt_trip_law =
      generate->add_option("--trip-law", gen_trip_law, "fixed | poisson")
          ->check(CLI::IsMember({"fixed", "poisson"}));
  auto* opt_components =
      generate->add_option("--components", gen.generator.num_components,
                           "cluster count (dmm) or truncation level (dpmm)");
  auto* opt_gen_mode = generate->add_option("--gen-mode", gen_mode, "dmm | dpmm")
                           ->check(CLI::IsMember({"dmm", "dpmm"}));
  auto* opt_gen_alpha = generate->add_option("--alpha", gen.generator.alpha, "mixture prior");
  auto* opt_gen_beta = generate->add_option("--beta", gen_beta, "emission prior (all dims)");
  auto* opt_vo = generate->add_option("--vocab-origins", gen.generator.vocab_sizes[kOrigin]);
  auto* opt_vd =
      generate->add_option("--vocab-destinations", gen.generator.vocab_sizes[kDestination]);
  auto* opt_vt = generate->add_option("--vocab-times", gen.generator.vocab_sizes[kTime]);
  generate->add_option("--seed", gen.generator.seed, "RNG seed");

  CommunitiesOptions comm;
  auto* communities = app.add_subcommand("communities", "Detect station communities");
  communities->add_option("--stations", comm.stations_path, "station_a,station_b edge CSV")
      ->required();
  communities->add_option("--poi", comm.poi_path, "station,poi_1,... CSV")->required();
  communities->add_option("--out", comm.out_dir, "output directory")->required();
  communities->add_option("--hops", comm.hops, "proximity radius in hops");
  communities->add_option("--gamma", comm.gamma, "POI cosine threshold in (0,1]");
  communities->add_option("--seed", comm.seed, "RNG seed");

  FitOptions fit_opts;
  std::string fit_mode = "dpmm";
  auto* fit_cmd = app.add_subcommand("fit", "Cluster a trips file");
  fit_cmd->add_option("--trips", fit_opts.trips_path, "trips CSV")->required();
  fit_cmd->add_option("--out", fit_opts.out_dir, "output directory")->required();
  fit_cmd->add_option("--mode", fit_mode, "dpmm | dmm")
      ->check(CLI::IsMember({"dpmm", "dmm"}));
  fit_cmd->add_option("--alpha", fit_opts.hyper.alpha, "concentration prior");
  // Registered before the per-dimension options so those can override it
  // (CLI11 runs callbacks in registration order).
  fit_cmd->add_option_function<double>(
      "--beta", [&](double b) { fit_opts.hyper.beta = {b, b, b}; },
      "emission prior for all dimensions");
  fit_cmd->add_option("--beta-origin", fit_opts.hyper.beta[kOrigin],
                      "origin emission prior");
  fit_cmd->add_option("--beta-destination", fit_opts.hyper.beta[kDestination],
                      "destination emission prior");
  fit_cmd->add_option("--beta-time", fit_opts.hyper.beta[kTime], "time emission prior");
  fit_cmd->add_option("--min-cluster-size", fit_opts.hyper.min_cluster_size,
                      "disband clusters smaller than this (0 disables)");
  fit_cmd->add_option("--iters", fit_opts.hyper.max_iter, "Gibbs sweeps");
  fit_cmd->add_option("--k0", fit_opts.hyper.initial_clusters,
                      "initial cluster count (required > 1 only for dmm)");
  fit_cmd->add_flag("--disband-every-sweep", fit_opts.hyper.disband_every_sweep,
                    "apply disband-and-relocate after every sweep");
  fit_cmd->add_option("--seed", fit_opts.hyper.seed, "RNG seed");
  fit_cmd->add_option("--chains", fit_opts.chains, "independent seeded chains");
  fit_cmd->add_option("--communities", fit_opts.communities_path,
                      "station,community mapping CSV (switches on OD remapping)");
  fit_cmd->add_option("--vocab-origin-file", fit_opts.vocab_paths[kOrigin]);
  fit_cmd->add_option("--vocab-destination-file", fit_opts.vocab_paths[kDestination]);
  fit_cmd->add_option("--vocab-time-file", fit_opts.vocab_paths[kTime]);

  EvaluateOptions eval;
  auto* evaluate = app.add_subcommand("evaluate", "Score an assignment");
  evaluate->add_option("--trips", eval.trips_path, "trips CSV")->required();
  evaluate->add_option("--assignments", eval.assignments_path, "passenger_id,cluster CSV")
      ->required();
  evaluate->add_option("--labels", eval.labels_path, "ground-truth labels CSV");
  evaluate->add_option("--out", eval.out_dir, "output directory")->required();
  evaluate->add_option("--communities", eval.communities_path, "mapping CSV used at fit time");
  evaluate->add_flag("--normalize-vectors", eval.normalize_vectors,
                     "embed trip frequencies instead of counts");
  evaluate->add_flag("--weighted-ch", eval.weighted_ch,
                     "size-weighted between-scatter variant");
  evaluate->add_option("--vocab-origin-file", eval.vocab_paths[kOrigin]);
  evaluate->add_option("--vocab-destination-file", eval.vocab_paths[kDestination]);
  evaluate->add_option("--vocab-time-file", eval.vocab_paths[kTime]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (generate->parsed()) {
      if (gen.recipe == "separated4") {
        for (const CLI::Option* opt :
             {opt_components, opt_gen_mode, opt_gen_alpha, opt_gen_beta, opt_vo, opt_vd,
              opt_vt, opt_trip_law}) {
          if (opt->count() > 0)
            throw BadConfigError("recipe separated4 fixes " + opt->get_name() +
                                 "; use --recipe priors");
        }
        const auto passengers = gen.generator.num_passengers;
        const auto trips = gen.generator.trips_mean;
        const auto seed = gen.generator.seed;
        gen.generator = separated_clusters_recipe();
        gen.generator.num_passengers = passengers;
        gen.generator.trips_mean = trips;
        gen.generator.seed = seed;
      } else {
        gen.generator.mode = gen_mode == "dpmm" ? Mode::dpmm : Mode::dmm;
        gen.generator.trip_law = gen_trip_law == "fixed"
                                     ? GeneratorConfig::TripLaw::fixed
                                     : GeneratorConfig::TripLaw::shifted_poisson;
        if (opt_gen_beta->count() > 0) gen.generator.beta = {gen_beta, gen_beta, gen_beta};
      }
      cmd_generate(gen);
    } else if (communities->parsed()) {
      cmd_communities(comm);
    } else if (fit_cmd->parsed()) {
      fit_opts.hyper.mode = fit_mode == "dpmm" ? Mode::dpmm : Mode::dmm;
      cmd_fit(fit_opts);
    } else if (evaluate->parsed()) {
      cmd_evaluate(eval);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return classify_error(e);
  }
  return 0;
}

}  // namespace tripclust::cli
