// Apache License, Version 2.0, refer to LICENSE.txt

#include "tripclust/generator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tripclust/errors.hpp"
#include "tripclust/rng.hpp"

namespace tripclust {

namespace {

void check_distribution(const std::vector<double>& p, const std::string& what) {
  double sum = 0.0;
  for (double x : p) {
    if (x < 0.0) throw BadConfigError(what + " has a negative entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw BadConfigError(what + " does not sum to 1");
}

std::vector<double> sample_dirichlet(double concentration, int size, std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<double> out(size);
  double sum = 0.0;
  for (double& x : out) {
    x = gamma(rng);
    sum += x;
  }
  if (sum <= 0.0) {
    // All-zero draws can occur for tiny concentrations; fall back to uniform.
    std::fill(out.begin(), out.end(), 1.0 / size);
    return out;
  }
  for (double& x : out) x /= sum;
  return out;
}

std::size_t sample_categorical(const std::vector<double>& p, std::mt19937_64& rng) {
  const double u = uniform_unit(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  return p.size() - 1;
}

}  // namespace

void GeneratorConfig::validate() const {
  if (num_passengers < 1) throw BadConfigError("num_passengers must be >= 1");
  if (trips_mean < 1.0) throw BadConfigError("trips_mean must be >= 1");
  for (int d = 0; d < kNumDims; ++d) {
    if (vocab_sizes[d] < 1)
      throw BadConfigError(std::string("vocabulary size for ") + dim_name(d) + " must be >= 1");
  }
  if (num_components < 1) throw BadConfigError("num_components must be >= 1");
  if (!(alpha > 0.0)) throw BadConfigError("alpha must be > 0");
  for (double b : beta) {
    if (!(b > 0.0)) throw BadConfigError("beta must be > 0");
  }
  if (explicit_theta) {
    if (static_cast<int>(explicit_theta->size()) != num_components)
      throw BadConfigError("explicit theta length != num_components");
    check_distribution(*explicit_theta, "explicit theta");
  }
  if (explicit_phi) {
    for (int d = 0; d < kNumDims; ++d) {
      const auto& table = (*explicit_phi)[d];
      if (static_cast<int>(table.size()) != num_components)
        throw BadConfigError("explicit phi row count != num_components");
      for (const auto& row : table) {
        if (static_cast<std::int32_t>(row.size()) != vocab_sizes[d])
          throw BadConfigError("explicit phi row length != vocabulary size");
        check_distribution(row, "explicit phi row");
      }
    }
  }
}

std::vector<double> sample_gem_weights(double alpha, int truncation, std::mt19937_64& rng) {
  if (!(alpha > 0.0)) throw BadConfigError("alpha must be > 0");
  if (truncation < 1) throw BadConfigError("truncation must be >= 1");
  std::vector<double> theta(truncation);
  double remaining = 1.0;
  for (int k = 0; k + 1 < truncation; ++k) {
    // Beta(1, alpha) by inversion: 1 - U^(1/alpha).
    const double v = 1.0 - std::pow(uniform_unit(rng), 1.0 / alpha);
    theta[k] = v * remaining;
    remaining *= 1.0 - v;
  }
  theta[truncation - 1] = remaining;  // residual stick
  return theta;
}

SyntheticCorpus sample_corpus(const GeneratorConfig& config, Execution exec) {
  config.validate();

  auto param_rng = make_substream(config.seed, "generator.params");
  SyntheticCorpus out;

  if (config.explicit_theta) {
    out.true_theta = *config.explicit_theta;
  } else if (config.mode == Mode::dpmm) {
    out.true_theta = sample_gem_weights(config.alpha, config.num_components, param_rng);
  } else {
    out.true_theta = sample_dirichlet(config.alpha, config.num_components, param_rng);
  }
  if (config.explicit_phi) {
    out.true_phi = *config.explicit_phi;
  } else {
    for (int d = 0; d < kNumDims; ++d) {
      out.true_phi[d].reserve(config.num_components);
      for (int k = 0; k < config.num_components; ++k)
        out.true_phi[d].push_back(
            sample_dirichlet(config.beta[d], config.vocab_sizes[d], param_rng));
    }
  }

  // Cluster labels and trip counts first, in passenger order, from the
  // params stream; the per-trip draws then use one sub-stream per passenger.
  const std::int64_t m = config.num_passengers;
  out.true_labels.resize(m);
  std::vector<std::int32_t> trip_counts(m);
  for (std::int64_t u = 0; u < m; ++u) {
    out.true_labels[u] =
        static_cast<std::int32_t>(sample_categorical(out.true_theta, param_rng));
    if (config.trip_law == GeneratorConfig::TripLaw::fixed) {
      trip_counts[u] = static_cast<std::int32_t>(std::llround(config.trips_mean));
    } else if (config.trips_mean > 1.0) {
      std::poisson_distribution<std::int32_t> poisson(config.trips_mean - 1.0);
      trip_counts[u] = 1 + poisson(param_rng);
    } else {
      trip_counts[u] = 1;  // poisson_distribution requires a positive mean
    }
  }

  std::array<std::vector<std::string>, kNumDims> labels;
  const char* prefix[kNumDims] = {"o", "d", "t"};
  for (int d = 0; d < kNumDims; ++d) {
    labels[d].reserve(config.vocab_sizes[d]);
    for (std::int32_t w = 0; w < config.vocab_sizes[d]; ++w)
      labels[d].push_back(prefix[d] + std::to_string(w));
  }
  out.corpus.vocab = VocabularySpec::from_labels(std::move(labels));

  int id_width = 1;
  for (std::int64_t v = m; v >= 10; v /= 10) ++id_width;

  out.corpus.docs.resize(m);
  const auto fill_doc = [&](std::int64_t u) {
    PassengerDoc& doc = out.corpus.docs[u];
    std::string id = std::to_string(u + 1);
    doc.passenger_id = "p" + std::string(id_width - id.size(), '0') + id;
    auto rng = make_substream(config.seed, "generator.doc", static_cast<std::uint64_t>(u));
    const std::int32_t k = out.true_labels[u];
    doc.trips.resize(trip_counts[u]);
    for (Trip& trip : doc.trips) {
      trip.origin = static_cast<std::int32_t>(sample_categorical(out.true_phi[kOrigin][k], rng));
      trip.destination =
          static_cast<std::int32_t>(sample_categorical(out.true_phi[kDestination][k], rng));
      trip.time = static_cast<std::int32_t>(sample_categorical(out.true_phi[kTime][k], rng));
    }
    doc.rebuild_counts();
  };

  constexpr std::size_t kParallelThreshold = 512;
  if (run_parallel(exec, static_cast<std::size_t>(m), kParallelThreshold)) {
#pragma omp parallel for schedule(static)
    for (std::int64_t u = 0; u < m; ++u) fill_doc(u);
  } else {
    for (std::int64_t u = 0; u < m; ++u) fill_doc(u);
  }

  out.corpus.total_trips = 0;
  for (const PassengerDoc& doc : out.corpus.docs) out.corpus.total_trips += doc.trip_count();
  return out;
}

GeneratorConfig separated_clusters_recipe() {
  GeneratorConfig config;
  config.num_passengers = 500;
  config.trip_law = GeneratorConfig::TripLaw::fixed;
  config.trips_mean = 20.0;
  config.vocab_sizes = {8, 8, 24};
  config.mode = Mode::dmm;
  config.num_components = 4;
  config.explicit_theta = std::vector<double>(4, 0.25);

  std::array<std::vector<std::vector<double>>, kNumDims> phi;
  for (int d = 0; d < kNumDims; ++d) {
    const std::int32_t v = config.vocab_sizes[d];
    for (int k = 0; k < 4; ++k) {
      std::vector<double> row(v, 0.15 / (v - 2));
      row[2 * k] = 0.425;
      row[2 * k + 1] = 0.425;
      phi[d].push_back(std::move(row));
    }
  }
  config.explicit_phi = std::move(phi);
  return config;
}

}  // namespace tripclust
