#ifndef GENVAL_SEARCH_HPP
#define GENVAL_SEARCH_HPP

#include "genval/quantizer.hpp"
#include "genval/types.hpp"

#include <string>
#include <vector>

namespace genval {

struct Neighbor {
  Index train_index = 0;
  double distance = 0.0;  // Euclidean, not squared

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Top-k neighbors sorted by ascending distance, ties by ascending train_index.
struct MatchResult {
  std::vector<Neighbor> neighbors;
};

/// Distance table and index table: row j holds the matches of generated point j.
struct MatchTables {
  RowMatrix<double> distances;
  RowMatrix<Index> indices;

  Index m() const { return indices.rows(); }
  Index k() const { return indices.cols(); }

  MatchResult row(Index j) const;
};

/// Full-scan exact search with 64-bit accumulation. Returns min(k, n) neighbors.
MatchResult exact_topk(const EmbeddingMatrix& training, const Eigen::Ref<const Vector<float>>& query, Index k);

/// Per-query lookup table (M x Ks, squared distances to centroids) for ADC.
RowMatrix<float> adc_lookup_table(const Codebook& codebook, const Eigen::Ref<const Vector<float>>& query);

/// Asymmetric distance computation over PQ codes. Distances are the square
/// root of the 64-bit sum of M lookup-table entries.
MatchResult adc_topk(const Codebook& codebook, const PQCodes& codes, const Eigen::Ref<const Vector<float>>& query,
                     Index k);

/// Matches every generated row against the training set. Rows are independent;
/// the output does not depend on `threads`.
MatchTables batch_match(const EmbeddingMatrix& training, const EmbeddingMatrix& generated, Index k, int threads = 1);
MatchTables batch_match(const PQIndex& index, const EmbeddingMatrix& generated, Index k, int threads = 1);

/// Mean over rows of |approx_j ∩ exact_j| / k.
double recall_at_k(const MatchTables& approx, const MatchTables& exact);

/// Recall computed on the first `k` columns of both tables.
double recall_at_k(const MatchTables& approx, const MatchTables& exact, Index k);

/// Throws ValidationError unless both tables have equal shape and all indices lie in [0, n).
void validate_tables(const MatchTables& tables, Index n);

// JSON-lines export: one object per generated point,
//   {"gen_index": j, "matches": [{"train_index": i, "distance": d}, ...]}
// with distances printed to 9 significant digits.
std::string format_match_line(const MatchTables& tables, Index j);
std::string format_matches(const MatchTables& tables);
MatchTables parse_matches(const std::string& text);

/// Rounds every distance to the value a JSON-lines round trip would yield, so
/// in-process pipelines match file-based ones bit for bit.
void round_to_export_precision(MatchTables& tables);

/// "%.9g" formatting shared by all text exports.
std::string format_sig9(double value);

}  // namespace genval

#endif  // GENVAL_SEARCH_HPP
