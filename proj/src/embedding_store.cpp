#include "genval/embedding_store.hpp"

#include "genval/errors.hpp"

#include "json.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace genval {

static_assert(std::endian::native == std::endian::little, "EMBX codec assumes a little-endian host");

namespace {

template <typename T>
void put_le(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get_le(const std::string& bytes, std::size_t offset) {
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  return value;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

EmbeddingFormat parse_embedding_format(const std::string& name) {
  if (name == "binary" || name == "embx") return EmbeddingFormat::Binary;
  if (name == "csv") return EmbeddingFormat::Csv;
  throw ConfigError("unknown embedding format '" + name + "' (expected binary or csv)");
}

EmbeddingFormat format_from_extension(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? EmbeddingFormat::Csv : EmbeddingFormat::Binary;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed on '" + path.string() + "'");
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("write failed on '" + path.string() + "'");
}

void validate_embeddings(const EmbeddingMatrix& matrix) {
  if (matrix.cols() < 1) throw ValidationError("embedding dim must be positive");
  for (Index r = 0; r < matrix.rows(); ++r) {
    for (Index c = 0; c < matrix.cols(); ++c) {
      if (!std::isfinite(matrix(r, c))) {
        throw ValidationError("non-finite value at (row " + std::to_string(r) + ", column " +
                              std::to_string(c) + ")");
      }
    }
  }
}

void validate_pair(const EmbeddingMatrix& training, const EmbeddingMatrix& generated) {
  if (training.cols() != generated.cols()) {
    throw ValidationError("dimension mismatch: training dim " + std::to_string(training.cols()) +
                          " vs generated dim " + std::to_string(generated.cols()));
  }
  if (training.rows() < 1) throw ValidationError("empty set: training has no vectors");
  if (generated.rows() < 1) throw ValidationError("empty set: generated has no vectors");
}

std::string encode_embx(const EmbeddingMatrix& matrix) {
  validate_embeddings(matrix);
  std::string out;
  out.reserve(kEmbxHeaderBytes + static_cast<std::size_t>(matrix.size()) * sizeof(float));
  out.append(kEmbxMagic, 4);
  put_le<std::uint32_t>(out, kEmbxVersion);
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(matrix.rows()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(matrix.cols()));
  put_le<std::uint32_t>(out, kEmbxDtypeF32);
  out.append(reinterpret_cast<const char*>(matrix.data()),
             static_cast<std::size_t>(matrix.size()) * sizeof(float));
  return out;
}

EmbeddingMatrix decode_embx(const std::string& bytes) {
  if (bytes.size() < kEmbxHeaderBytes) {
    throw FormatError("EMBX header truncated at byte offset " + std::to_string(bytes.size()));
  }
  for (std::size_t i = 0; i < 4; ++i) {
    if (bytes[i] != kEmbxMagic[i]) throw FormatError("bad EMBX magic at byte offset " + std::to_string(i));
  }
  if (get_le<std::uint32_t>(bytes, 4) != kEmbxVersion) {
    throw FormatError("unsupported EMBX version at byte offset 4");
  }
  const auto count = get_le<std::uint64_t>(bytes, 8);
  const auto dim = get_le<std::uint32_t>(bytes, 16);
  if (dim == 0) throw FormatError("EMBX dim is zero at byte offset 16");
  if (get_le<std::uint32_t>(bytes, 20) != kEmbxDtypeF32) {
    throw FormatError("unsupported EMBX dtype tag at byte offset 20");
  }
  const std::uint64_t payload = bytes.size() - kEmbxHeaderBytes;
  const bool overflow = count > std::numeric_limits<std::uint64_t>::max() / dim / sizeof(float);
  const std::uint64_t expected = overflow ? 0 : count * dim * sizeof(float);
  if (overflow || expected != payload) {
    // Truncated: first missing byte. Oversized: first surplus byte.
    const std::uint64_t offset = (overflow || payload < expected) ? bytes.size() : kEmbxHeaderBytes + expected;
    throw FormatError("EMBX payload of " + std::to_string(payload) + " bytes does not match count " +
                      std::to_string(count) + " x dim " + std::to_string(dim) +
                      " (first bad byte offset " + std::to_string(offset) + ")");
  }
  EmbeddingMatrix matrix(static_cast<Index>(count), static_cast<Index>(dim));
  std::memcpy(matrix.data(), bytes.data() + kEmbxHeaderBytes, payload);
  validate_embeddings(matrix);
  return matrix;
}

EmbeddingMatrix parse_csv(const std::string& text, const CsvOptions& csv) {
  std::vector<float> values;
  std::size_t dim = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (csv.header && line_no == 1) continue;
    if (trim(line).empty()) continue;

    std::size_t fields = 0;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      std::string field = trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
      float v = 0.0f;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        throw FormatError("unparseable number '" + field + "' at line " + std::to_string(line_no));
      }
      if (!std::isfinite(v)) {
        throw ValidationError("non-finite value at (row " + std::to_string(rows) + ", column " +
                              std::to_string(fields) + ")");
      }
      values.push_back(v);
      ++fields;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      dim = fields;
    } else if (fields != dim) {
      throw FormatError("ragged CSV row at line " + std::to_string(line_no) + ": expected " +
                        std::to_string(dim) + " fields, got " + std::to_string(fields));
    }
    ++rows;
  }
  if (rows == 0) throw FormatError("CSV contains no rows; dim cannot be inferred");
  EmbeddingMatrix matrix(static_cast<Index>(rows), static_cast<Index>(dim));
  std::copy(values.begin(), values.end(), matrix.data());
  return matrix;
}

std::string format_csv(const EmbeddingMatrix& matrix) {
  validate_embeddings(matrix);
  std::string out;
  char buf[32];
  for (Index r = 0; r < matrix.rows(); ++r) {
    for (Index c = 0; c < matrix.cols(); ++c) {
      if (c > 0) out.push_back(',');
      // Shortest representation that round-trips the float exactly.
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), matrix(r, c));
      out.append(buf, ptr);
    }
    out.push_back('\n');
  }
  return out;
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path, EmbeddingFormat format,
                                const CsvOptions& csv) {
  const std::string bytes = read_file(path);
  try {
    return format == EmbeddingFormat::Binary ? decode_embx(bytes) : parse_csv(bytes, csv);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  return load_embeddings(path, format_from_extension(path));
}

void save_embeddings(const EmbeddingMatrix& matrix, const std::filesystem::path& path,
                     EmbeddingFormat format) {
  write_file(path, format == EmbeddingFormat::Binary ? encode_embx(matrix) : format_csv(matrix));
}

void DatasetManifest::validate(Index count) const {
  if (static_cast<Index>(entries.size()) != count) {
    throw ValidationError("manifest has " + std::to_string(entries.size()) + " entries, expected " +
                          std::to_string(count));
  }
  std::vector<bool> seen(entries.size(), false);
  for (const auto& entry : entries) {
    if (entry.index < 0 || entry.index >= count) {
      throw ValidationError("manifest index " + std::to_string(entry.index) + " out of range");
    }
    if (seen[static_cast<std::size_t>(entry.index)]) {
      throw ValidationError("manifest index " + std::to_string(entry.index) + " appears twice");
    }
    seen[static_cast<std::size_t>(entry.index)] = true;
  }
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (!doc.is_array()) throw FormatError(path.string() + ": manifest must be a JSON array");
  DatasetManifest manifest;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("index") || !item.contains("id") ||
        !item["index"].is_number_integer() || !item["id"].is_string()) {
      throw FormatError(path.string() + ": manifest entries must be {\"index\": int, \"id\": string}");
    }
    manifest.entries.push_back({item["index"].get<Index>(), item["id"].get<std::string>()});
  }
  return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& entry : manifest.entries) {
    doc.push_back({{"index", entry.index}, {"id", entry.external_id}});
  }
  write_file(path, doc.dump(2) + "\n");
}

}  // namespace genval
