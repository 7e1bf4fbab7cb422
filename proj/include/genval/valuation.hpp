#ifndef GENVAL_VALUATION_HPP
#define GENVAL_VALUATION_HPP

#include "genval/search.hpp"
#include "genval/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace genval {

struct ScoredMatch {
  Index train_index = 0;
  double score = 0.0;
};

/// Scores of one generated point's matches, in ascending-distance order.
struct ScoreRow {
  Index gen_index = 0;
  std::vector<ScoredMatch> entries;
};

/// Per-training-point values and their ranking (descending value, ties by
/// ascending index). Values are absolute masses: they sum to m.
struct ValuationResult {
  Index n = 0;
  Index m = 0;
  Index k = 0;
  double temperature = 1.0;
  Vector<double> values;
  std::vector<Index> ranking;
};

/// Softmax of -temperature * d over one match row:
///   score_i = exp(-beta d_i) / sum_t exp(-beta d_t)
/// evaluated after subtracting min(d), which leaves the result unchanged.
/// Distances must be finite and >= 0; zero is a legal perfect match.
Vector<double> discount_scores(const Eigen::Ref<const Vector<double>>& distances, double temperature = 1.0);

/// phi_i = sum_j V(x_i, x_hat_j), accumulated over j in ascending order.
/// A training point that appears in no row keeps value 0.
ValuationResult aggregate_values(const MatchTables& tables, Index n, double temperature = 1.0, int threads = 1);

struct RankedValue {
  Index train_index = 0;
  double value = 0.0;

  friend bool operator==(const RankedValue&, const RankedValue&) = default;
};

std::vector<Index> rank_indices(const Eigen::Ref<const Vector<double>>& values);
std::vector<RankedValue> rank_training_points(const ValuationResult& result, std::optional<Index> top = std::nullopt);

/// Provenance of generated point `gen_index`: its matches with their scores.
ScoreRow top_contributors(const MatchTables& tables, Index gen_index, double temperature = 1.0);

/// CSV "train_index,value,rank" (header line, rows by train_index, rank 1 = highest value).
std::string format_values_csv(const ValuationResult& result);

/// Reads the value column of a value CSV, indexed by train_index.
Vector<double> parse_values_csv(const std::string& text);

/// JSON summary {n, m, k, temperature, sum_values, top_indices}.
std::string format_summary_json(const ValuationResult& result, Index top = 10);

}  // namespace genval

#endif  // GENVAL_VALUATION_HPP
