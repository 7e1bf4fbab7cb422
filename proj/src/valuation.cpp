#include "genval/valuation.hpp"

#include "genval/errors.hpp"
#include "genval/parallel.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

namespace genval {

Vector<double> discount_scores(const Eigen::Ref<const Vector<double>>& distances, double temperature) {
  if (distances.size() == 0) throw ValidationError("discount_scores needs at least one distance");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ValidationError("temperature must be a positive finite number");
  }
  for (Index i = 0; i < distances.size(); ++i) {
    if (!std::isfinite(distances[i]) || distances[i] < 0.0) {
      throw ValidationError("distance " + std::to_string(i) + " is negative or non-finite");
    }
  }
  const double shift = distances.minCoeff();
  Vector<double> weights = (-temperature * (distances.array() - shift)).exp().matrix();
  return weights / weights.sum();
}

ValuationResult aggregate_values(const MatchTables& tables, Index n, double temperature, int threads) {
  validate_tables(tables, n);
  ValuationResult result;
  result.n = n;
  result.m = tables.m();
  result.k = tables.k();
  result.temperature = temperature;

  // Rows are scored independently; the merge below runs in ascending j so the
  // sums do not depend on the worker count.
  RowMatrix<double> scores(tables.m(), tables.k());
  parallel_for(tables.m(), threads, [&](Index j) {
    scores.row(j) = discount_scores(tables.distances.row(j).transpose(), temperature).transpose();
  });
  result.values = Vector<double>::Zero(n);
  for (Index j = 0; j < tables.m(); ++j) {
    for (Index c = 0; c < tables.k(); ++c) result.values[tables.indices(j, c)] += scores(j, c);
  }
  result.ranking = rank_indices(result.values);
  return result;
}

std::vector<Index> rank_indices(const Eigen::Ref<const Vector<double>>& values) {
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return values[a] > values[b]; });
  return order;
}

std::vector<RankedValue> rank_training_points(const ValuationResult& result, std::optional<Index> top) {
  const auto& order = result.ranking.size() == static_cast<std::size_t>(result.values.size())
                          ? result.ranking
                          : rank_indices(result.values);
  const auto limit = static_cast<std::size_t>(top ? std::clamp<Index>(*top, 0, result.values.size())
                                                  : result.values.size());
  std::vector<RankedValue> ranked;
  ranked.reserve(limit);
  for (std::size_t r = 0; r < limit; ++r) ranked.push_back({order[r], result.values[order[r]]});
  return ranked;
}

ScoreRow top_contributors(const MatchTables& tables, Index gen_index, double temperature) {
  if (gen_index < 0 || gen_index >= tables.m()) {
    throw ValidationError("gen_index " + std::to_string(gen_index) + " outside [0, " + std::to_string(tables.m()) +
                          ")");
  }
  const Vector<double> scores = discount_scores(tables.distances.row(gen_index).transpose(), temperature);
  ScoreRow row;
  row.gen_index = gen_index;
  for (Index c = 0; c < tables.k(); ++c) row.entries.push_back({tables.indices(gen_index, c), scores[c]});
  return row;
}

std::string format_values_csv(const ValuationResult& result) {
  std::vector<Index> rank(static_cast<std::size_t>(result.n));
  for (std::size_t r = 0; r < result.ranking.size(); ++r) rank[result.ranking[r]] = static_cast<Index>(r) + 1;
  std::string out = "train_index,value,rank\n";
  for (Index i = 0; i < result.n; ++i) {
    out += std::to_string(i) + "," + format_sig9(result.values[i]) + "," + std::to_string(rank[i]) + "\n";
  }
  return out;
}

Vector<double> parse_values_csv(const std::string& text) {
  std::vector<double> values;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line.rfind("train_index,value", 0) != 0) {
        throw FormatError("value CSV must start with header 'train_index,value,rank'");
      }
      continue;
    }
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c1 == std::string::npos) throw FormatError("value CSV line " + std::to_string(line_no) + " has no value");
    Index index = -1;
    double value = 0.0;
    auto r1 = std::from_chars(line.data(), line.data() + c1, index);
    const char* vend = c2 == std::string::npos ? line.data() + line.size() : line.data() + c2;
    auto r2 = std::from_chars(line.data() + c1 + 1, vend, value);
    if (r1.ec != std::errc() || r1.ptr != line.data() + c1 || r2.ec != std::errc() || r2.ptr != vend ||
        !std::isfinite(value)) {
      throw FormatError("unparseable value CSV line " + std::to_string(line_no));
    }
    if (index != static_cast<Index>(values.size())) {
      throw FormatError("value CSV line " + std::to_string(line_no) + ": train_index " + std::to_string(index) +
                        " out of sequence");
    }
    values.push_back(value);
  }
  return Eigen::Map<const Vector<double>>(values.data(), static_cast<Index>(values.size()));
}

std::string format_summary_json(const ValuationResult& result, Index top) {
  nlohmann::ordered_json doc;
  doc["n"] = result.n;
  doc["m"] = result.m;
  doc["k"] = result.k;
  doc["temperature"] = result.temperature;
  doc["sum_values"] = result.values.sum();
  auto tops = nlohmann::ordered_json::array();
  for (const auto& rv : rank_training_points(result, top)) tops.push_back(rv.train_index);
  doc["top_indices"] = tops;
  return doc.dump(2) + "\n";
}

}  // namespace genval
