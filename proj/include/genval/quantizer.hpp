#ifndef GENVAL_QUANTIZER_HPP
#define GENVAL_QUANTIZER_HPP

#include "genval/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace genval {

/// Product-quantizer training parameters.
struct PQConfig {
  Index num_subspaces = 8;
  Index codebook_size = 256;
  int kmeans_iters = 25;
  std::uint64_t seed = 0;

  /// Throws ConfigError unless M divides dim, 1 <= Ks <= min(count, 65536) and iters >= 1.
  void validate(Index dim, Index count) const;
};

/// Per-subspace centroid tables. centroids[s] is Ks x subspace_dim.
struct Codebook {
  std::vector<RowMatrix<float>> centroids;

  Index num_subspaces() const { return static_cast<Index>(centroids.size()); }
  Index codebook_size() const { return centroids.empty() ? 0 : centroids.front().rows(); }
  Index subspace_dim() const { return centroids.empty() ? 0 : centroids.front().cols(); }
  Index dim() const { return num_subspaces() * subspace_dim(); }
};

/// n x M code matrix; every entry addresses a centroid of its subspace.
using PQCodes = RowMatrix<std::uint16_t>;

/// Codebook plus the codes of the database it was built for.
struct PQIndex {
  Codebook codebook;
  PQCodes codes;

  Index count() const { return codes.rows(); }
};

/// Per-subspace k-means diagnostics: objective (total within-cluster squared
/// error) after each assignment step, and the number of Lloyd iterations run.
struct KMeansTrace {
  std::vector<std::vector<double>> objective;
  std::vector<int> iterations;
};

/// Lloyd's k-means with k-means++ seeding on one subspace. Deterministic in
/// (data, k, iters, seed). Throws InternalError if the objective increases.
RowMatrix<float> kmeans(const RowMatrix<float>& data, Index k, int iters, std::uint64_t seed,
                        std::vector<double>* objective = nullptr);

/// Trains M independent codebooks. Subspace s is seeded from (cfg.seed, s), so
/// the result does not depend on `threads`.
Codebook train_codebooks(const EmbeddingMatrix& data, const PQConfig& cfg, int threads = 1,
                         KMeansTrace* trace = nullptr);

/// Nearest centroid per subspace, ties to the lowest centroid index.
PQCodes encode(const EmbeddingMatrix& data, const Codebook& codebook);

/// Concatenates the addressed centroids. CorruptionError on out-of-range codes.
EmbeddingMatrix decode(const PQCodes& codes, const Codebook& codebook);

/// Mean squared reconstruction error over rows.
double quantization_error(const EmbeddingMatrix& data, const Codebook& codebook);

/// Throws CorruptionError if any code is >= Ks or the code width differs from M.
void validate_codes(const PQCodes& codes, const Codebook& codebook);

// GMVI v1 layout (little-endian):
//   magic "GMVI" | u32 version=1 | u32 M | u32 subspace_dim | u32 Ks | u64 count
//   | M*Ks*subspace_dim f32 centroids | count*M codes (u8 if Ks <= 256, else u16)
inline constexpr char kGmviMagic[4] = {'G', 'M', 'V', 'I'};
inline constexpr std::uint32_t kGmviVersion = 1;
inline constexpr std::size_t kGmviHeaderBytes = 28;

std::string encode_index(const PQIndex& index);
PQIndex decode_index(const std::string& bytes);
void save_index(const PQIndex& index, const std::filesystem::path& path);
PQIndex load_index(const std::filesystem::path& path);

}  // namespace genval

#endif  // GENVAL_QUANTIZER_HPP
