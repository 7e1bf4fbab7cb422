#include "genval/embedding_store.hpp"
#include "genval/errors.hpp"
#include "genval/search.hpp"
#include "genval/synth.hpp"
#include "oracles.hpp"

#include "json.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace genval;

namespace {

ExperimentSpec small_spec(std::uint64_t seed = 42) {
  ExperimentSpec spec;
  spec.dim = 8;
  spec.n_per_split = 40;
  spec.m_generated = 30;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST(Synth, SingleDraw) {
  const EmbeddingMatrix x = sample_mixture(small_spec(), 1, 1);
  EXPECT_EQ(x.rows(), 1);
  EXPECT_EQ(x.cols(), 8);
  EXPECT_TRUE(x.allFinite());
}

TEST(Synth, SameSeedSameBits) {
  const ExperimentSpec spec = small_spec(9);
  EXPECT_EQ(sample_mixture(spec, 50, 1), sample_mixture(spec, 50, 1));
  EXPECT_NE(sample_mixture(spec, 50, 1), sample_mixture(spec, 50, 2));
  EXPECT_NE(sample_mixture(spec, 50, 1), sample_mixture(small_spec(10), 50, 1));
}

TEST(Synth, SingleComponentSampleMeanConverges) {
  ExperimentSpec spec = small_spec(3);
  spec.mixture_components = 1;
  const EmbeddingMatrix mu = mixture_means(spec);
  const EmbeddingMatrix x = sample_mixture(spec, 10000, 1);
  const Eigen::RowVectorXd mean = x.cast<double>().colwise().mean();
  for (Index d = 0; d < spec.dim; ++d) EXPECT_NEAR(mean[d], mu(0, d), 0.05) << "coordinate " << d;
  const double var = (x.cast<double>().rowwise() - mean).array().square().mean();
  EXPECT_NEAR(var, 1.0, 0.05);
}

TEST(Synth, MeansAreSeparated) {
  for (Index dim : {Index{1}, Index{2}, Index{64}}) {
    ExperimentSpec spec = small_spec();
    spec.dim = dim;
    spec.mixture_components = dim == 1 ? 12 : 6;
    const EmbeddingMatrix mu = mixture_means(spec);
    ASSERT_EQ(mu.rows(), spec.mixture_components);
    for (Index a = 0; a < mu.rows(); ++a) {
      for (Index b = a + 1; b < mu.rows(); ++b) {
        EXPECT_GE(std::sqrt(squared_distance(mu.row(a), mu.row(b))), spec.component_spread);
      }
    }
  }
}

TEST(Synth, NoiselessGeneratorCopiesTrainingRows) {
  ExperimentSpec spec = small_spec();
  spec.noise_sigma = 0.0;
  const EmbeddingMatrix train = sample_mixture(spec, spec.n_per_split, 1);
  const EmbeddingMatrix gen = simulate_generated(train, spec);
  ASSERT_EQ(gen.rows(), spec.m_generated);
  const MatchTables t = batch_match(train, gen, 1);
  for (Index j = 0; j < gen.rows(); ++j) {
    EXPECT_EQ(t.distances(j, 0), 0.0);
    EXPECT_EQ(gen.row(j), train.row(t.indices(j, 0)));
  }
}

TEST(Synth, WritesExperimentFiles) {
  const ExperimentSpec spec = small_spec(5);
  const auto dir = oracle::scratch_dir("synth_files");
  const ExperimentFiles manifest = write_experiment(spec, dir);
  const EmbeddingMatrix v1 = load_embeddings(manifest.path(manifest.x_v1));
  const EmbeddingMatrix v2 = load_embeddings(manifest.path(manifest.x_v2));
  const EmbeddingMatrix train = load_embeddings(manifest.path(manifest.train));
  const EmbeddingMatrix gen = load_embeddings(manifest.path(manifest.generated));
  EXPECT_EQ(v1.rows(), spec.n_per_split);
  EXPECT_EQ(v2.rows(), spec.n_per_split);
  EXPECT_EQ(train.rows(), 2 * spec.n_per_split);
  EXPECT_EQ(gen.rows(), spec.m_generated);
  EXPECT_EQ(train.topRows(spec.n_per_split), v1);
  EXPECT_EQ(train.bottomRows(spec.n_per_split), v2);

  std::set<std::vector<float>> rows;
  for (Index i = 0; i < v1.rows(); ++i) rows.insert({v1.row(i).data(), v1.row(i).data() + v1.cols()});
  for (Index i = 0; i < v2.rows(); ++i) EXPECT_FALSE(rows.count({v2.row(i).data(), v2.row(i).data() + v2.cols()}));

  const auto part = nlohmann::json::parse(read_file(manifest.path(manifest.partition)));
  EXPECT_EQ(part["a"].size(), static_cast<std::size_t>(spec.n_per_split));
  EXPECT_EQ(part["b"][0], spec.n_per_split);
  const auto exp = nlohmann::json::parse(read_file(manifest.path(manifest.manifest)));
  EXPECT_EQ(exp["spec"]["seed"], 5);

  const auto again = oracle::scratch_dir("synth_files_again");
  write_experiment(spec, again);
  for (const auto& name : {manifest.x_v1, manifest.x_v2, manifest.train, manifest.generated, manifest.partition,
                           manifest.manifest}) {
    EXPECT_EQ(read_file(dir / name), read_file(again / name)) << name;
  }
}

TEST(Synth, InMemoryMatchesFiles) {
  const ExperimentSpec spec = small_spec(6);
  const ExperimentData data = build_experiment(spec);
  const auto dir = oracle::scratch_dir("synth_mem");
  const ExperimentFiles manifest = write_experiment(spec, dir);
  EXPECT_EQ(load_embeddings(manifest.path(manifest.generated)), data.generated);
}

TEST(Synth, InvalidSpecs) {
  ExperimentSpec spec = small_spec();
  spec.m_generated = 0;
  EXPECT_THROW(spec.validate(), ConfigError);
  EXPECT_THROW(build_experiment(spec), ConfigError);
  spec = small_spec();
  spec.noise_sigma = -1;
  EXPECT_THROW(spec.validate(), ConfigError);
  spec = small_spec();
  spec.dim = 0;
  EXPECT_THROW(spec.validate(), ConfigError);
  spec = small_spec();
  spec.mixture_components = 0;
  EXPECT_THROW(spec.validate(), ConfigError);
}
