#include "genval/embedding_store.hpp"
#include "genval/errors.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <limits>

using namespace genval;

namespace {

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(EmbeddingStore, BinaryRoundTripIsBitwise) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    const Index rows = static_cast<Index>(rng.index(40));
    const Index cols = 1 + static_cast<Index>(rng.index(17));
    const EmbeddingMatrix m = oracle::random_matrix(rows, cols, seed, 1e3);
    const EmbeddingMatrix back = decode_embx(encode_embx(m));
    ASSERT_EQ(back.rows(), rows);
    ASSERT_EQ(back.cols(), cols);
    EXPECT_EQ(std::memcmp(back.data(), m.data(), static_cast<std::size_t>(m.size()) * sizeof(float)), 0);
  }
}

TEST(EmbeddingStore, BinaryHeaderLayout) {
  EmbeddingMatrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  const std::string bytes = encode_embx(m);
  ASSERT_EQ(bytes.size(), 24u + 6 * 4);
  EXPECT_EQ(bytes.substr(0, 4), "EMBX");
  const unsigned char header[24] = {'E', 'M', 'B', 'X', 1, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 3, 0, 0, 0, 1, 0, 0, 0};
  EXPECT_EQ(std::memcmp(bytes.data(), header, 24), 0);
  const EmbeddingMatrix back = decode_embx(bytes);
  EXPECT_EQ(back, m);
}

TEST(EmbeddingStore, FileRoundTripBothFormats) {
  const auto dir = oracle::scratch_dir("store_roundtrip");
  EmbeddingMatrix m(1, 2);
  m << 1.5f, -2.25f;
  save_embeddings(m, dir / "m.embx", EmbeddingFormat::Binary);
  save_embeddings(m, dir / "m.csv", EmbeddingFormat::Csv);
  EXPECT_EQ(load_embeddings(dir / "m.embx"), m);
  EXPECT_EQ(load_embeddings(dir / "m.csv"), m);
  EXPECT_EQ(read_file(dir / "m.csv"), "1.5,-2.25\n");
}

TEST(EmbeddingStore, CsvShortestRepresentationRoundTrips) {
  const EmbeddingMatrix m = oracle::random_matrix(25, 7, 99, 123.456);
  EXPECT_EQ(parse_csv(format_csv(m)), m);
}

TEST(EmbeddingStore, CsvParse) {
  const EmbeddingMatrix m = parse_csv("1.0,2.0\n3.0,4.0");
  ASSERT_EQ(m.rows(), 2);
  ASSERT_EQ(m.cols(), 2);
  EXPECT_FLOAT_EQ(m(1, 0), 3.0f);
  EXPECT_EQ(parse_csv("a,b\n1,2\n", CsvOptions{true}).rows(), 1);
  EXPECT_EQ(parse_csv(" 1 , 2 \r\n3,4\n\n").rows(), 2);
}

TEST(EmbeddingStore, CsvRaggedRowNamesLine) {
  EXPECT_THROW(parse_csv("1.0,2.0\n3.0"), FormatError);
  EXPECT_NE(message_of([] { parse_csv("1.0,2.0\n3.0"); }).find("line 2"), std::string::npos);
  EXPECT_NE(message_of([] { parse_csv("1,2\n3,4\n5,6,7\n"); }).find("line 3"), std::string::npos);
}

TEST(EmbeddingStore, CsvRejectsGarbageAndNonFinite) {
  EXPECT_THROW(parse_csv("1,x\n"), FormatError);
  EXPECT_THROW(parse_csv(""), FormatError);
  const std::string msg = message_of([] { parse_csv("1,2\n3,inf\n"); });
  EXPECT_NE(msg.find("row 1, column 1"), std::string::npos) << msg;
}

TEST(EmbeddingStore, MalformedBinaryNamesOffset) {
  EmbeddingMatrix m(2, 2);
  m << 1, 2, 3, 4;
  std::string bytes = encode_embx(m);

  std::string bad_magic = bytes;
  bad_magic[2] = 'Z';
  EXPECT_NE(message_of([&] { decode_embx(bad_magic); }).find("byte offset 2"), std::string::npos);

  EXPECT_NE(message_of([&] { decode_embx(bytes.substr(0, 10)); }).find("byte offset 10"), std::string::npos);

  const std::string truncated = bytes.substr(0, bytes.size() - 3);
  EXPECT_NE(message_of([&] { decode_embx(truncated); }).find("offset " + std::to_string(truncated.size())),
            std::string::npos);

  const std::string oversized = bytes + "xx";
  EXPECT_NE(message_of([&] { decode_embx(oversized); }).find("offset 40"), std::string::npos);

  std::string bad_dtype = bytes;
  bad_dtype[20] = 2;
  EXPECT_NE(message_of([&] { decode_embx(bad_dtype); }).find("byte offset 20"), std::string::npos);

  // A huge declared count must not overflow the length check.
  std::string huge = bytes;
  for (int i = 8; i < 16; ++i) huge[i] = static_cast<char>(0xFF);
  EXPECT_THROW(decode_embx(huge), FormatError);
}

TEST(EmbeddingStore, NonFiniteBinaryNamesRowAndColumn) {
  EmbeddingMatrix m(3, 2);
  m.setZero();
  std::string bytes = encode_embx(m);
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(bytes.data() + 24 + (2 * 2 + 1) * 4, &nan, 4);
  EXPECT_THROW(decode_embx(bytes), ValidationError);
  EXPECT_NE(message_of([&] { decode_embx(bytes); }).find("row 2, column 1"), std::string::npos);
}

TEST(EmbeddingStore, EmptyMatrixIsValid) {
  const EmbeddingMatrix m(0, 5);
  const EmbeddingMatrix back = decode_embx(encode_embx(m));
  EXPECT_EQ(back.rows(), 0);
  EXPECT_EQ(back.cols(), 5);
}

TEST(EmbeddingStore, UnwritablePathIsIoError) {
  EmbeddingMatrix m(1, 1);
  m << 1;
  EXPECT_THROW(save_embeddings(m, "/nonexistent-dir/sub/x.embx", EmbeddingFormat::Binary), IoError);
  EXPECT_THROW(load_embeddings("/nonexistent-dir/x.embx"), IoError);
}

TEST(EmbeddingStore, ValidatePair) {
  const EmbeddingMatrix a = oracle::random_matrix(100, 64, 1);
  const EmbeddingMatrix b = oracle::random_matrix(50, 64, 2);
  EXPECT_NO_THROW(validate_pair(a, b));
  const std::string msg = message_of([&] { validate_pair(a, oracle::random_matrix(50, 32, 3)); });
  EXPECT_NE(msg.find("64"), std::string::npos);
  EXPECT_NE(msg.find("32"), std::string::npos);
  EXPECT_NE(message_of([&] { validate_pair(EmbeddingMatrix(0, 64), b); }).find("training"), std::string::npos);
  EXPECT_NE(message_of([&] { validate_pair(a, EmbeddingMatrix(0, 64)); }).find("generated"), std::string::npos);
}

TEST(EmbeddingStore, ManifestRoundTripAndValidation) {
  const auto dir = oracle::scratch_dir("manifest");
  DatasetManifest manifest{{{0, "img/a.png"}, {1, "img/b.png"}, {2, "img/c.png"}}};
  save_manifest(manifest, dir / "manifest.json");
  const DatasetManifest back = load_manifest(dir / "manifest.json");
  ASSERT_EQ(back.entries.size(), 3u);
  EXPECT_EQ(back.entries[1].external_id, "img/b.png");
  EXPECT_NO_THROW(back.validate(3));
  EXPECT_THROW(back.validate(4), ValidationError);

  DatasetManifest dup{{{0, "a"}, {0, "b"}}};
  EXPECT_THROW(dup.validate(2), ValidationError);
  DatasetManifest out_of_range{{{0, "a"}, {2, "b"}}};
  EXPECT_THROW(out_of_range.validate(2), ValidationError);

  write_file(dir / "bad.json", "{\"index\": 0}");
  EXPECT_THROW(load_manifest(dir / "bad.json"), FormatError);
}

TEST(EmbeddingStore, FormatNames) {
  EXPECT_EQ(parse_embedding_format("csv"), EmbeddingFormat::Csv);
  EXPECT_EQ(parse_embedding_format("binary"), EmbeddingFormat::Binary);
  EXPECT_THROW(parse_embedding_format("npy"), ConfigError);
  EXPECT_EQ(format_from_extension("x/y.csv"), EmbeddingFormat::Csv);
  EXPECT_EQ(format_from_extension("x/y.embx"), EmbeddingFormat::Binary);
}
