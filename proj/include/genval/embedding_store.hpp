#ifndef GENVAL_EMBEDDING_STORE_HPP
#define GENVAL_EMBEDDING_STORE_HPP

#include "genval/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace genval {

enum class EmbeddingFormat { Binary, Csv };

/// Parses "binary"/"embx" or "csv"; anything else is a ConfigError.
EmbeddingFormat parse_embedding_format(const std::string& name);

/// Picks the format from the file extension: ".csv" is CSV, everything else EMBX.
EmbeddingFormat format_from_extension(const std::filesystem::path& path);

struct CsvOptions {
  bool header = false;  // skip line 1
};

// EMBX v1 layout (little-endian):
//   magic "EMBX" | u32 version=1 | u64 count | u32 dim | u32 dtype=1 (f32) | count*dim f32
inline constexpr char kEmbxMagic[4] = {'E', 'M', 'B', 'X'};
inline constexpr std::uint32_t kEmbxVersion = 1;
inline constexpr std::uint32_t kEmbxDtypeF32 = 1;
inline constexpr std::size_t kEmbxHeaderBytes = 24;

EmbeddingMatrix load_embeddings(const std::filesystem::path& path, EmbeddingFormat format,
                                const CsvOptions& csv = {});
EmbeddingMatrix load_embeddings(const std::filesystem::path& path);

void save_embeddings(const EmbeddingMatrix& matrix, const std::filesystem::path& path,
                     EmbeddingFormat format);

/// In-memory codecs behind load/save, exposed for tests and streaming callers.
EmbeddingMatrix decode_embx(const std::string& bytes);
std::string encode_embx(const EmbeddingMatrix& matrix);
EmbeddingMatrix parse_csv(const std::string& text, const CsvOptions& csv = {});
std::string format_csv(const EmbeddingMatrix& matrix);

/// Throws ValidationError naming (row, column) of the first non-finite value,
/// or if the matrix has zero columns.
void validate_embeddings(const EmbeddingMatrix& matrix);

/// Training and generated sets must share a dimension and both be nonempty.
void validate_pair(const EmbeddingMatrix& training, const EmbeddingMatrix& generated);

struct ManifestEntry {
  Index index = 0;
  std::string external_id;
};

/// Maps matrix rows to opaque user-facing identifiers. Stored as a JSON array
/// of {"index": int, "id": string}.
struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  /// Indices must be exactly 0..count-1, each once.
  void validate(Index count) const;
};

DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

/// Reads a whole file; IoError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);
/// Writes a whole file; IoError if it cannot be written.
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace genval

#endif  // GENVAL_EMBEDDING_STORE_HPP
