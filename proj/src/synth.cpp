#include "genval/synth.hpp"

#include "genval/embedding_store.hpp"
#include "genval/errors.hpp"
#include "genval/rng.hpp"

#include "json.hpp"

#include <cmath>

namespace genval {

void ExperimentSpec::validate() const {
  if (dim < 1) throw ConfigError("dim must be positive");
  if (n_per_split < 1) throw ConfigError("n_per_split must be positive");
  if (mixture_components < 1) throw ConfigError("mixture_components must be positive");
  if (!(component_spread > 0.0) || !std::isfinite(component_spread)) {
    throw ConfigError("component_spread must be positive and finite");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw ConfigError("noise_sigma must be nonnegative and finite");
  }
  if (m_generated < 1) throw ConfigError("m_generated must be positive");
}

EmbeddingMatrix mixture_means(const ExperimentSpec& spec) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(Stream::MixtureMeans)));
  EmbeddingMatrix means(spec.mixture_components, spec.dim);
  const double min_sq = spec.component_spread * spec.component_spread;
  double half_width = spec.component_spread;
  int rejections = 0;
  for (Index c = 0; c < spec.mixture_components;) {
    for (Index d = 0; d < spec.dim; ++d) {
      means(c, d) = static_cast<float>((2.0 * rng.uniform() - 1.0) * half_width);
    }
    bool separated = true;
    for (Index other = 0; other < c && separated; ++other) {
      separated = squared_distance(means.row(c), means.row(other)) >= min_sq;
    }
    if (separated) {
      ++c;
    } else if (++rejections % 64 == 0) {
      // Low dims with many components: widen the box until means fit.
      half_width *= 2.0;
    }
  }
  return means;
}

EmbeddingMatrix sample_mixture(const ExperimentSpec& spec, Index count, std::uint64_t stream) {
  const EmbeddingMatrix means = mixture_means(spec);
  Rng rng(derive_seed(spec.seed, stream));
  EmbeddingMatrix out(count, spec.dim);
  for (Index i = 0; i < count; ++i) {
    const auto component = static_cast<Index>(rng.index(static_cast<std::uint64_t>(spec.mixture_components)));
    for (Index d = 0; d < spec.dim; ++d) {
      out(i, d) = static_cast<float>(static_cast<double>(means(component, d)) + rng.normal());
    }
  }
  return out;
}

EmbeddingMatrix simulate_generated(const EmbeddingMatrix& training_subset, const ExperimentSpec& spec) {
  spec.validate();
  if (training_subset.rows() < 1) throw ValidationError("simulate_generated needs a nonempty training subset");
  Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(Stream::Generator)));
  EmbeddingMatrix out(spec.m_generated, training_subset.cols());
  for (Index j = 0; j < spec.m_generated; ++j) {
    const auto source = static_cast<Index>(rng.index(static_cast<std::uint64_t>(training_subset.rows())));
    out.row(j) = training_subset.row(source);
    if (spec.noise_sigma > 0.0) {
      for (Index d = 0; d < out.cols(); ++d) {
        out(j, d) = static_cast<float>(static_cast<double>(out(j, d)) + spec.noise_sigma * rng.normal());
      }
    }
  }
  return out;
}

ExperimentData build_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentData data;
  data.x_v1 = sample_mixture(spec, spec.n_per_split, static_cast<std::uint64_t>(Stream::SplitV1));
  data.x_v2 = sample_mixture(spec, spec.n_per_split, static_cast<std::uint64_t>(Stream::SplitV2));
  data.train.resize(data.x_v1.rows() + data.x_v2.rows(), spec.dim);
  data.train << data.x_v1, data.x_v2;
  data.generated = simulate_generated(data.x_v1, spec);
  return data;
}

std::string format_partition_json(Index n_a, Index n_b, const std::string& name_a, const std::string& name_b) {
  nlohmann::ordered_json doc;
  auto a = nlohmann::ordered_json::array();
  auto b = nlohmann::ordered_json::array();
  for (Index i = 0; i < n_a; ++i) a.push_back(i);
  for (Index i = 0; i < n_b; ++i) b.push_back(n_a + i);
  doc["a_name"] = name_a;
  doc["b_name"] = name_b;
  doc["a"] = a;
  doc["b"] = b;
  return doc.dump() + "\n";
}

ExperimentFiles write_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir) {
  const ExperimentData data = build_experiment(spec);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create directory '" + out_dir.string() + "': " + ec.message());

  ExperimentFiles manifest;
  manifest.dir = out_dir;
  save_embeddings(data.x_v1, manifest.path(manifest.x_v1), EmbeddingFormat::Binary);
  save_embeddings(data.x_v2, manifest.path(manifest.x_v2), EmbeddingFormat::Binary);
  save_embeddings(data.train, manifest.path(manifest.train), EmbeddingFormat::Binary);
  save_embeddings(data.generated, manifest.path(manifest.generated), EmbeddingFormat::Binary);
  write_file(manifest.path(manifest.partition), format_partition_json(data.x_v1.rows(), data.x_v2.rows()));

  nlohmann::ordered_json doc;
  doc["spec"] = {
      {"dim", spec.dim},
      {"n_per_split", spec.n_per_split},
      {"mixture_components", spec.mixture_components},
      {"component_spread", spec.component_spread},
      {"noise_sigma", spec.noise_sigma},
      {"m_generated", spec.m_generated},
      {"seed", spec.seed},
  };
  doc["prng"] = "splitmix64";
  doc["files"] = {
      {"x_v1", manifest.x_v1},
      {"x_v2", manifest.x_v2},
      {"train", manifest.train},
      {"generated", manifest.generated},
      {"partition", manifest.partition},
  };
  write_file(manifest.path(manifest.manifest), doc.dump(2) + "\n");
  return manifest;
}

}  // namespace genval
