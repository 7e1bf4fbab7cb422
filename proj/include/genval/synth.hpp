#ifndef GENVAL_SYNTH_HPP
#define GENVAL_SYNTH_HPP

#include "genval/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace genval {

/// Desk-scale stand-in for a trained generative model: two disjoint splits
/// drawn from one Gaussian mixture, and a generator that memorizes split v1
/// with additive noise.
struct ExperimentSpec {
  Index dim = 64;
  Index n_per_split = 500;
  Index mixture_components = 4;
  double component_spread = 8.0;
  double noise_sigma = 0.3;
  Index m_generated = 500;
  std::uint64_t seed = 42;

  void validate() const;
};

/// Random streams. Each draw is a pure function of (spec.seed, stream).
enum class Stream : std::uint64_t {
  MixtureMeans = 0,
  SplitV1 = 1,
  SplitV2 = 2,
  Generator = 3,
  Queries = 4,
};

/// Component means, one per row, pairwise at least component_spread apart.
EmbeddingMatrix mixture_means(const ExperimentSpec& spec);

/// `count` draws from the isotropic unit-variance mixture, on stream `stream`.
EmbeddingMatrix sample_mixture(const ExperimentSpec& spec, Index count, std::uint64_t stream);

/// m_generated rows: uniform-with-replacement picks from `training_subset`
/// plus N(0, noise_sigma^2) noise per coordinate.
EmbeddingMatrix simulate_generated(const EmbeddingMatrix& training_subset, const ExperimentSpec& spec);

/// Files written by write_experiment, relative to out_dir.
struct ExperimentFiles {
  std::filesystem::path dir;
  std::string x_v1 = "x_v1.embx";
  std::string x_v2 = "x_v2.embx";
  std::string train = "train.embx";  // x_v1 rows then x_v2 rows
  std::string generated = "generated.embx";
  std::string partition = "partition.json";
  std::string manifest = "experiment.json";

  std::filesystem::path path(const std::string& name) const { return dir / name; }
};

/// In-memory experiment, as written by write_experiment.
struct ExperimentData {
  EmbeddingMatrix x_v1;
  EmbeddingMatrix x_v2;
  EmbeddingMatrix train;
  EmbeddingMatrix generated;
};

ExperimentData build_experiment(const ExperimentSpec& spec);

/// Writes both splits, their union, the generated set (from x_v1 only), an
/// index partition {"a": [...], "b": [...]} of the union, and experiment.json.
ExperimentFiles write_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir);

/// Partition JSON for the union: group a = [0, n_a), group b = [n_a, n_a + n_b).
std::string format_partition_json(Index n_a, Index n_b, const std::string& name_a = "x_v1",
                                  const std::string& name_b = "x_v2");

}  // namespace genval

#endif  // GENVAL_SYNTH_HPP
