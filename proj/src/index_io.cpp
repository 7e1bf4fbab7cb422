#include "genval/embedding_store.hpp"
#include "genval/errors.hpp"
#include "genval/quantizer.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

namespace genval {

static_assert(std::endian::native == std::endian::little, "GMVI codec assumes a little-endian host");

namespace {

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get(const std::string& bytes, std::size_t offset) {
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  return value;
}

}  // namespace

std::string encode_index(const PQIndex& index) {
  const Codebook& cb = index.codebook;
  validate_codes(index.codes, cb);
  const Index ks = cb.codebook_size();
  std::string out;
  out.append(kGmviMagic, 4);
  put<std::uint32_t>(out, kGmviVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(cb.num_subspaces()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(cb.subspace_dim()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ks));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(index.codes.rows()));
  for (const auto& table : cb.centroids) {
    out.append(reinterpret_cast<const char*>(table.data()), static_cast<std::size_t>(table.size()) * sizeof(float));
  }
  const bool wide = ks > 256;
  for (Index i = 0; i < index.codes.rows(); ++i) {
    for (Index s = 0; s < index.codes.cols(); ++s) {
      if (wide) {
        put<std::uint16_t>(out, index.codes(i, s));
      } else {
        out.push_back(static_cast<char>(static_cast<std::uint8_t>(index.codes(i, s))));
      }
    }
  }
  return out;
}

PQIndex decode_index(const std::string& bytes) {
  if (bytes.size() < kGmviHeaderBytes) {
    throw FormatError("GMVI header truncated at byte offset " + std::to_string(bytes.size()));
  }
  for (std::size_t i = 0; i < 4; ++i) {
    if (bytes[i] != kGmviMagic[i]) throw FormatError("bad GMVI magic at byte offset " + std::to_string(i));
  }
  if (get<std::uint32_t>(bytes, 4) != kGmviVersion) throw FormatError("unsupported GMVI version at byte offset 4");
  const std::uint64_t m = get<std::uint32_t>(bytes, 8);
  const std::uint64_t dsub = get<std::uint32_t>(bytes, 12);
  const std::uint64_t ks = get<std::uint32_t>(bytes, 16);
  const std::uint64_t count = get<std::uint64_t>(bytes, 20);
  if (m == 0) throw FormatError("GMVI num_subspaces is zero at byte offset 8");
  if (dsub == 0) throw FormatError("GMVI subspace_dim is zero at byte offset 12");
  if (ks == 0 || ks > 65536) throw FormatError("GMVI codebook size out of range at byte offset 16");

  const std::uint64_t code_width = ks > 256 ? 2 : 1;
  const std::uint64_t available = bytes.size() - kGmviHeaderBytes;
  const std::uint64_t table_row_bytes = m * ks * sizeof(float);
  if (table_row_bytes > available || dsub > available / table_row_bytes) {
    throw FormatError("GMVI centroid tables truncated (first bad byte offset " + std::to_string(bytes.size()) + ")");
  }
  const std::uint64_t centroid_bytes = table_row_bytes * dsub;
  const std::uint64_t code_space = available - centroid_bytes;
  if (count > code_space / (m * code_width) || count * m * code_width != code_space) {
    const bool short_payload = count > code_space / (m * code_width);
    const std::uint64_t offset =
        short_payload ? bytes.size() : kGmviHeaderBytes + centroid_bytes + count * m * code_width;
    throw FormatError("GMVI code payload does not match count " + std::to_string(count) +
                      " (first bad byte offset " + std::to_string(offset) + ")");
  }

  PQIndex index;
  std::size_t offset = kGmviHeaderBytes;
  index.codebook.centroids.resize(m);
  for (auto& table : index.codebook.centroids) {
    table.resize(static_cast<Index>(ks), static_cast<Index>(dsub));
    std::memcpy(table.data(), bytes.data() + offset, static_cast<std::size_t>(table.size()) * sizeof(float));
    offset += static_cast<std::size_t>(table.size()) * sizeof(float);
    if (!table.allFinite()) throw ValidationError("GMVI centroid table contains a non-finite value");
  }
  index.codes.resize(static_cast<Index>(count), static_cast<Index>(m));
  for (Index i = 0; i < index.codes.rows(); ++i) {
    for (Index s = 0; s < index.codes.cols(); ++s) {
      if (code_width == 2) {
        index.codes(i, s) = get<std::uint16_t>(bytes, offset);
      } else {
        index.codes(i, s) = static_cast<std::uint8_t>(bytes[offset]);
      }
      offset += code_width;
    }
  }
  validate_codes(index.codes, index.codebook);
  return index;
}

void save_index(const PQIndex& index, const std::filesystem::path& path) {
  write_file(path, encode_index(index));
}

PQIndex load_index(const std::filesystem::path& path) {
  try {
    return decode_index(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace genval
