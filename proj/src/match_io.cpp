#include "genval/errors.hpp"
#include "genval/search.hpp"

#include "json.hpp"

#include <cstdio>
#include <cstdlib>

namespace genval {

std::string format_sig9(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

std::string format_match_line(const MatchTables& tables, Index j) {
  std::string line = "{\"gen_index\": " + std::to_string(j) + ", \"matches\": [";
  for (Index c = 0; c < tables.k(); ++c) {
    if (c > 0) line += ", ";
    line += "{\"train_index\": " + std::to_string(tables.indices(j, c)) +
            ", \"distance\": " + format_sig9(tables.distances(j, c)) + "}";
  }
  line += "]}\n";
  return line;
}

std::string format_matches(const MatchTables& tables) {
  std::string out;
  for (Index j = 0; j < tables.m(); ++j) out += format_match_line(tables, j);
  return out;
}

MatchTables parse_matches(const std::string& text) {
  std::vector<std::vector<std::pair<Index, double>>> rows;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "match line " + std::to_string(line_no);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
    if (!obj.is_object() || !obj.contains("gen_index") || !obj.contains("matches") ||
        !obj["gen_index"].is_number_integer() || !obj["matches"].is_array()) {
      throw FormatError(where + ": expected {\"gen_index\": int, \"matches\": [...]}");
    }
    if (obj["gen_index"].get<Index>() != static_cast<Index>(rows.size())) {
      throw FormatError(where + ": gen_index " + std::to_string(obj["gen_index"].get<Index>()) + " out of sequence");
    }
    auto& row = rows.emplace_back();
    for (const auto& match : obj["matches"]) {
      if (!match.is_object() || !match.contains("train_index") || !match.contains("distance") ||
          !match["train_index"].is_number_integer() || !match["distance"].is_number()) {
        throw FormatError(where + ": matches must be {\"train_index\": int, \"distance\": number}");
      }
      row.emplace_back(match["train_index"].get<Index>(), match["distance"].get<double>());
    }
    if (row.empty()) throw FormatError(where + ": empty match list");
    if (row.size() != rows.front().size()) {
      throw FormatError(where + ": expected " + std::to_string(rows.front().size()) + " matches, got " +
                        std::to_string(row.size()));
    }
  }
  MatchTables tables;
  const Index k = rows.empty() ? 0 : static_cast<Index>(rows.front().size());
  tables.distances.resize(static_cast<Index>(rows.size()), k);
  tables.indices.resize(static_cast<Index>(rows.size()), k);
  for (Index j = 0; j < tables.m(); ++j) {
    for (Index c = 0; c < k; ++c) {
      tables.indices(j, c) = rows[j][c].first;
      tables.distances(j, c) = rows[j][c].second;
    }
  }
  return tables;
}

void round_to_export_precision(MatchTables& tables) {
  tables.distances = tables.distances.unaryExpr([](double d) { return std::strtod(format_sig9(d).c_str(), nullptr); });
}

}  // namespace genval
