// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "test_util.hpp"
#include "tripclust/cli.hpp"

using namespace tripclust;
using json = nlohmann::json;

namespace {

int run(std::vector<std::string> args) {
  std::vector<const char*> argv = {"tripclust"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return cli::run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_json(const std::string& path) { return json::parse(slurp(path)); }

// trips realizing the worked metrics fixture: four passengers with 1, 2, 11,
// and 12 copies of the same trip (1-D embedding shifts are immaterial).
void write_toy_inputs(const test::TempDir& tmp) {
  std::ostringstream trips;
  trips << "passenger_id,origin,destination,time\n";
  const int counts[4] = {1, 2, 11, 12};
  for (int u = 0; u < 4; ++u) {
    for (int i = 0; i < counts[u]; ++i) trips << "p" << u << ",A,B,08\n";
  }
  std::ofstream(tmp.file("trips.csv")) << trips.str();
  std::ofstream(tmp.file("assignments.csv"))
      << "passenger_id,cluster\np0,0\np1,0\np2,1\np3,1\n";
}

}  // namespace

TEST_CASE("generate writes its artifacts deterministically") {
  test::TempDir tmp;
  const std::string out_a = tmp.file("a");
  const std::string out_b = tmp.file("b");
  REQUIRE(run({"generate", "--out", out_a, "--passengers", "50", "--seed", "7"}) == 0);
  REQUIRE(run({"generate", "--out", out_b, "--passengers", "50", "--seed", "7"}) == 0);

  for (const char* name : {"trips.csv", "labels.csv", "params.json", "run_manifest.json"}) {
    CHECK(slurp(out_a + "/" + name) == slurp(out_b + "/" + name));
  }

  // labels.csv has one row per passenger plus the header.
  const std::string labels = slurp(out_a + "/labels.csv");
  CHECK(std::count(labels.begin(), labels.end(), '\n') == 51);

  const json params = load_json(out_a + "/params.json");
  CHECK(params["theta"].size() == 4);
  CHECK(params["phi"]["origin"].size() == 4);
}

TEST_CASE("different seeds change the corpus") {
  test::TempDir tmp;
  const std::string out_a = tmp.file("a");
  const std::string out_b = tmp.file("b");
  REQUIRE(run({"generate", "--out", out_a, "--passengers", "50", "--seed", "7"}) == 0);
  REQUIRE(run({"generate", "--out", out_b, "--passengers", "50", "--seed", "8"}) == 0);
  CHECK(slurp(out_a + "/trips.csv") != slurp(out_b + "/trips.csv"));
}

TEST_CASE("fit runs end to end and is byte-reproducible") {
  test::TempDir tmp;
  const std::string data = tmp.file("data");
  REQUIRE(run({"generate", "--out", data, "--passengers", "60", "--seed", "11"}) == 0);

  const std::vector<std::string> fit_args = {
      "fit",     "--trips", data + "/trips.csv", "--mode", "dpmm",  "--alpha",
      "0.01",    "--beta",  "0.1",               "--iters", "6",    "--min-cluster-size",
      "5",       "--seed",  "3"};
  auto with_out = [&](const std::string& out) {
    std::vector<std::string> args = fit_args;
    args.push_back("--out");
    args.push_back(out);
    return args;
  };
  REQUIRE(run(with_out(tmp.file("fit_a"))) == 0);
  REQUIRE(run(with_out(tmp.file("fit_b"))) == 0);

  CHECK(slurp(tmp.file("fit_a") + "/assignments.csv") ==
        slurp(tmp.file("fit_b") + "/assignments.csv"));
  CHECK(slurp(tmp.file("fit_a") + "/result.json") == slurp(tmp.file("fit_b") + "/result.json"));

  const json result = load_json(tmp.file("fit_a") + "/result.json");
  CHECK(result["mode"] == "dpmm");
  CHECK(result["trace"][0]["clusters"] == 1);  // dpmm starts from one cluster
  CHECK(result["K"].get<int>() >= 1);
  const json timing = load_json(tmp.file("fit_a") + "/timing.json");
  CHECK(timing["chains"][0]["seconds_per_iteration"].size() == 6);
}

TEST_CASE("dmm fit reports a non-increasing trace") {
  test::TempDir tmp;
  const std::string data = tmp.file("data");
  REQUIRE(run({"generate", "--out", data, "--passengers", "80", "--seed", "5"}) == 0);
  const std::string out = tmp.file("fit");
  REQUIRE(run({"fit", "--trips", data + "/trips.csv", "--out", out, "--mode", "dmm", "--k0",
               "30", "--alpha", "0.05", "--beta", "0.1", "--iters", "8", "--seed", "2"}) == 0);
  const json result = load_json(out + "/result.json");
  int prev = result["trace"][0]["clusters"].get<int>();
  for (const auto& entry : result["trace"]) {
    const int k = entry["clusters"].get<int>();
    CHECK(k <= prev);
    prev = k;
  }
}

TEST_CASE("multi-chain fit reports every chain and the best one") {
  test::TempDir tmp;
  const std::string data = tmp.file("data");
  REQUIRE(run({"generate", "--out", data, "--passengers", "40", "--seed", "21"}) == 0);
  const std::string out = tmp.file("fit");
  REQUIRE(run({"fit", "--trips", data + "/trips.csv", "--out", out, "--alpha", "0.01",
               "--beta", "0.1", "--iters", "4", "--min-cluster-size", "3", "--seed", "9",
               "--chains", "3"}) == 0);
  const json best = load_json(out + "/result.json");
  CHECK(best.contains("best_chain"));
  for (int c = 0; c < 3; ++c) {
    CHECK(std::ifstream(out + "/result_chain" + std::to_string(c) + ".json").good());
    CHECK(std::ifstream(out + "/assignments_chain" + std::to_string(c) + ".csv").good());
  }
}

TEST_CASE("evaluate reproduces the worked fixture") {
  test::TempDir tmp;
  write_toy_inputs(tmp);
  const std::string out = tmp.file("eval");
  REQUIRE(run({"evaluate", "--trips", tmp.file("trips.csv"), "--assignments",
               tmp.file("assignments.csv"), "--out", out}) == 0);
  const json metrics = load_json(out + "/metrics.json");
  CHECK(metrics["K"] == 2);
  CHECK(metrics["rmsstd"].get<double>() == doctest::Approx(0.70711).epsilon(1e-5));
  CHECK(metrics["rs"].get<double>() == doctest::Approx(0.99010).epsilon(1e-5));
  CHECK(metrics["ch"].get<double>() == doctest::Approx(100.0).epsilon(1e-9));
}

TEST_CASE("evaluate flags undefined ch for a single cluster") {
  test::TempDir tmp;
  write_toy_inputs(tmp);
  std::ofstream(tmp.file("assignments.csv"))
      << "passenger_id,cluster\np0,0\np1,0\np2,0\np3,0\n";
  const std::string out = tmp.file("eval");
  REQUIRE(run({"evaluate", "--trips", tmp.file("trips.csv"), "--assignments",
               tmp.file("assignments.csv"), "--out", out}) == 0);
  const json metrics = load_json(out + "/metrics.json");
  CHECK(metrics["rs"].get<double>() == doctest::Approx(0.0));
  CHECK(metrics["ch"].is_null());
}

TEST_CASE("evaluate scores recovery against true labels") {
  test::TempDir tmp;
  write_toy_inputs(tmp);
  std::ofstream(tmp.file("labels.csv"))
      << "passenger_id,true_cluster\np0,1\np1,1\np2,0\np3,0\n";
  const std::string out = tmp.file("eval");
  REQUIRE(run({"evaluate", "--trips", tmp.file("trips.csv"), "--assignments",
               tmp.file("assignments.csv"), "--labels", tmp.file("labels.csv"), "--out",
               out}) == 0);
  const json metrics = load_json(out + "/metrics.json");
  CHECK(metrics["nmi"].get<double>() == doctest::Approx(1.0));
  CHECK(metrics["ari"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("communities pipeline on the two-triangle fixture") {
  test::TempDir tmp;
  std::ofstream(tmp.file("stations.csv"))
      << "station_a,station_b\nS0,S1\nS1,S2\nS0,S2\nS3,S4\nS4,S5\nS3,S5\nS2,S3\n";
  // POI vectors: two functional groups matching the triangles.
  std::ofstream(tmp.file("poi.csv")) << "station,school,mall\n"
                                        "S0,10,0\nS1,9,1\nS2,10,1\nS3,0,10\nS4,1,9\nS5,0,9\n";
  const std::string out = tmp.file("comm");
  REQUIRE(run({"communities", "--stations", tmp.file("stations.csv"), "--poi",
               tmp.file("poi.csv"), "--out", out, "--hops", "1", "--gamma", "0.9"}) == 0);

  const json report = load_json(out + "/modularity_report.json");
  CHECK(report["adjacency"]["communities"] == 2);
  CHECK(report["adjacency"]["modularity"].get<double>() ==
        doctest::Approx(6.0 / 7.0 - 0.5).epsilon(1e-9));
  CHECK(report["poi"]["communities"] == 2);
  CHECK(report["joint_communities"] == 2);

  const std::string mapping = slurp(out + "/mapping.csv");
  CHECK(mapping.rfind("station,community\n", 0) == 0);
  CHECK(std::count(mapping.begin(), mapping.end(), '\n') == 7);
}

TEST_CASE("fit accepts a community mapping") {
  test::TempDir tmp;
  // Trips over four stations that pair off into two communities.
  std::ostringstream trips;
  trips << "passenger_id,origin,destination,time\n";
  const char* origins[4] = {"S0", "S1", "S2", "S3"};
  for (int u = 0; u < 12; ++u) {
    for (int i = 0; i < 4; ++i)
      trips << "p" << u << "," << origins[(u + i) % 4] << "," << origins[(u + 2 * i) % 4]
            << ",08\n";
  }
  std::ofstream(tmp.file("trips.csv")) << trips.str();
  std::ofstream(tmp.file("mapping.csv")) << "station,community\nS0,0\nS1,0\nS2,1\nS3,1\n";

  const std::string out = tmp.file("fit");
  REQUIRE(run({"fit", "--trips", tmp.file("trips.csv"), "--communities",
               tmp.file("mapping.csv"), "--out", out, "--alpha", "0.5", "--beta", "0.5",
               "--iters", "3", "--min-cluster-size", "2", "--seed", "1"}) == 0);
  const json result = load_json(out + "/result.json");
  CHECK(result["communities"]["origins"] == 2);
  CHECK(result["communities"]["destinations"] == 2);

  // Evaluation over the remapped corpus uses the shrunken vocabulary.
  const std::string eval_out = tmp.file("eval");
  REQUIRE(run({"evaluate", "--trips", tmp.file("trips.csv"), "--assignments",
               out + "/assignments.csv", "--communities", tmp.file("mapping.csv"), "--out",
               eval_out}) == 0);
  const json metrics = load_json(eval_out + "/metrics.json");
  CHECK(metrics.contains("K"));
}

TEST_CASE("sidecar vocabularies pin the label space") {
  test::TempDir tmp;
  std::ofstream(tmp.file("trips.csv"))
      << "passenger_id,origin,destination,time\np0,A,X,08\np1,B,X,09\n";
  std::ofstream(tmp.file("origins.txt")) << "A\nB\nC\n";
  std::ofstream(tmp.file("destinations.txt")) << "X\nY\n";
  std::ofstream(tmp.file("times.txt")) << "08\n09\n";

  const std::string out = tmp.file("fit");
  REQUIRE(run({"fit", "--trips", tmp.file("trips.csv"), "--out", out, "--alpha", "0.5",
               "--beta", "0.5", "--iters", "2", "--min-cluster-size", "0", "--seed", "1",
               "--vocab-origin-file", tmp.file("origins.txt"), "--vocab-destination-file",
               tmp.file("destinations.txt"), "--vocab-time-file", tmp.file("times.txt")}) == 0);
  // The fixed vocabulary (3 origins) shows up in the emission tables.
  const json result = load_json(out + "/result.json");
  CHECK(result["clusters"][0]["top_origins"].size() == 3);

  // A label outside the fixed vocabulary is a validation failure.
  std::ofstream(tmp.file("bad.csv"))
      << "passenger_id,origin,destination,time\np0,Z,X,08\n";
  CHECK(run({"fit", "--trips", tmp.file("bad.csv"), "--out", tmp.file("fit2"), "--iters", "2",
             "--vocab-origin-file", tmp.file("origins.txt"), "--vocab-destination-file",
             tmp.file("destinations.txt"), "--vocab-time-file", tmp.file("times.txt")}) == 2);
}

TEST_CASE("exit codes") {
  test::TempDir tmp;
  SUBCASE("missing input file is a validation failure") {
    CHECK(run({"fit", "--trips", tmp.file("nope.csv"), "--out", tmp.file("out")}) == 2);
  }
  SUBCASE("unknown flag is a parse failure") {
    CHECK(run({"fit", "--no-such-flag"}) == 2);
  }
  SUBCASE("bad hyperparameter is a validation failure") {
    std::ofstream(tmp.file("trips.csv"))
        << "passenger_id,origin,destination,time\np0,A,B,08\n";
    CHECK(run({"fit", "--trips", tmp.file("trips.csv"), "--out", tmp.file("out"), "--alpha",
               "-1"}) == 2);
  }
  SUBCASE("recipe conflicts are rejected") {
    CHECK(run({"generate", "--out", tmp.file("out"), "--components", "7"}) == 2);
  }
  SUBCASE("an edgeless poi graph is a runtime failure") {
    std::ofstream(tmp.file("stations.csv")) << "station_a,station_b\nS0,S1\n";
    std::ofstream(tmp.file("poi.csv")) << "station,school,mall\nS0,10,0\nS1,0,10\n";
    CHECK(run({"communities", "--stations", tmp.file("stations.csv"), "--poi",
               tmp.file("poi.csv"), "--out", tmp.file("out"), "--gamma", "1.0"}) == 1);
  }
}

TEST_CASE("config file values are used and command line wins") {
  test::TempDir tmp;
  std::ofstream(tmp.file("run.cfg")) << "[generate]\npassengers=30\nseed=4\n";

  const std::string out_a = tmp.file("a");
  REQUIRE(run({"--config", tmp.file("run.cfg"), "generate", "--out", out_a}) == 0);
  const std::string labels_a = slurp(out_a + "/labels.csv");
  CHECK(std::count(labels_a.begin(), labels_a.end(), '\n') == 31);

  const std::string out_b = tmp.file("b");
  REQUIRE(run({"--config", tmp.file("run.cfg"), "generate", "--out", out_b, "--passengers",
               "10"}) == 0);
  const std::string labels_b = slurp(out_b + "/labels.csv");
  CHECK(std::count(labels_b.begin(), labels_b.end(), '\n') == 11);
}
