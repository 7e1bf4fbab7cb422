#include "genval/search.hpp"

#include "genval/embedding_store.hpp"
#include "genval/errors.hpp"
#include "genval/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace genval {

namespace {

struct Candidate {
  double key;  // squared distance
  Index index;
};

inline bool closer(const Candidate& a, const Candidate& b) {
  return a.key < b.key || (a.key == b.key && a.index < b.index);
}

// Keeps the k best (key, index) pairs with a bounded max-heap.
MatchResult select_topk(Index n, Index k, auto&& squared_distance_of) {
  if (k < 1) throw ValidationError("k must be positive");
  const auto keep = static_cast<std::size_t>(std::min(k, n));
  std::vector<Candidate> heap;
  heap.reserve(keep + 1);
  for (Index i = 0; i < n; ++i) {
    Candidate c{squared_distance_of(i), i};
    if (heap.size() < keep) {
      heap.push_back(c);
      std::push_heap(heap.begin(), heap.end(), closer);
    } else if (closer(c, heap.front())) {
      std::pop_heap(heap.begin(), heap.end(), closer);
      heap.back() = c;
      std::push_heap(heap.begin(), heap.end(), closer);
    }
  }
  std::sort_heap(heap.begin(), heap.end(), closer);
  MatchResult result;
  result.neighbors.reserve(heap.size());
  for (const auto& c : heap) result.neighbors.push_back({c.index, std::sqrt(c.key)});
  return result;
}

void store_row(MatchTables& tables, Index j, const MatchResult& result) {
  for (Index c = 0; c < tables.k(); ++c) {
    tables.indices(j, c) = result.neighbors[c].train_index;
    tables.distances(j, c) = result.neighbors[c].distance;
  }
}

MatchTables allocate(Index m, Index k, Index n) {
  if (k < 1) throw ValidationError("k must be positive");
  MatchTables tables;
  const Index width = std::min(k, n);
  tables.distances.resize(m, width);
  tables.indices.resize(m, width);
  return tables;
}

}  // namespace

MatchResult MatchTables::row(Index j) const {
  MatchResult result;
  for (Index c = 0; c < k(); ++c) result.neighbors.push_back({indices(j, c), distances(j, c)});
  return result;
}

MatchResult exact_topk(const EmbeddingMatrix& training, const Eigen::Ref<const Vector<float>>& query, Index k) {
  if (query.size() != training.cols()) {
    throw ValidationError("dimension mismatch: query dim " + std::to_string(query.size()) + " vs training dim " +
                          std::to_string(training.cols()));
  }
  return select_topk(training.rows(), k, [&](Index i) { return squared_distance(training.row(i), query); });
}

RowMatrix<float> adc_lookup_table(const Codebook& codebook, const Eigen::Ref<const Vector<float>>& query) {
  if (query.size() != codebook.dim()) {
    throw ValidationError("dimension mismatch: query dim " + std::to_string(query.size()) + " vs codebook dim " +
                          std::to_string(codebook.dim()));
  }
  const Index dsub = codebook.subspace_dim();
  RowMatrix<float> table(codebook.num_subspaces(), codebook.codebook_size());
  for (Index s = 0; s < codebook.num_subspaces(); ++s) {
    const auto sub = query.segment(s * dsub, dsub);
    for (Index c = 0; c < codebook.codebook_size(); ++c) {
      table(s, c) = static_cast<float>(squared_distance(codebook.centroids[s].row(c), sub));
    }
  }
  return table;
}

MatchResult adc_topk(const Codebook& codebook, const PQCodes& codes, const Eigen::Ref<const Vector<float>>& query,
                     Index k) {
  if (codes.cols() != codebook.num_subspaces()) {
    throw ValidationError("code width " + std::to_string(codes.cols()) + " does not match codebook");
  }
  const RowMatrix<float> table = adc_lookup_table(codebook, query);
  const Index m = codes.cols();
  return select_topk(codes.rows(), k, [&](Index i) {
    double acc = 0.0;
    for (Index s = 0; s < m; ++s) acc += static_cast<double>(table(s, codes(i, s)));
    return acc;
  });
}

MatchTables batch_match(const EmbeddingMatrix& training, const EmbeddingMatrix& generated, Index k, int threads) {
  validate_pair(training, generated);
  MatchTables tables = allocate(generated.rows(), k, training.rows());
  parallel_for(generated.rows(), threads, [&](Index j) {
    store_row(tables, j, exact_topk(training, generated.row(j).transpose(), k));
  });
  return tables;
}

MatchTables batch_match(const PQIndex& index, const EmbeddingMatrix& generated, Index k, int threads) {
  validate_codes(index.codes, index.codebook);
  if (generated.cols() != index.codebook.dim()) {
    throw ValidationError("dimension mismatch: index dim " + std::to_string(index.codebook.dim()) +
                          " vs generated dim " + std::to_string(generated.cols()));
  }
  if (index.count() < 1) throw ValidationError("empty set: index has no vectors");
  if (generated.rows() < 1) throw ValidationError("empty set: generated has no vectors");
  MatchTables tables = allocate(generated.rows(), k, index.count());
  parallel_for(generated.rows(), threads, [&](Index j) {
    store_row(tables, j, adc_topk(index.codebook, index.codes, generated.row(j).transpose(), k));
  });
  return tables;
}

double recall_at_k(const MatchTables& approx, const MatchTables& exact, Index k) {
  if (approx.m() != exact.m() || approx.k() != exact.k()) {
    throw ValidationError("table shape mismatch: " + std::to_string(approx.m()) + "x" + std::to_string(approx.k()) +
                          " vs " + std::to_string(exact.m()) + "x" + std::to_string(exact.k()));
  }
  if (k < 1 || k > approx.k()) {
    throw ValidationError("recall depth " + std::to_string(k) + " outside [1, " + std::to_string(approx.k()) + "]");
  }
  if (approx.m() == 0) return 1.0;
  double total = 0.0;
  for (Index j = 0; j < approx.m(); ++j) {
    Index hits = 0;
    for (Index a = 0; a < k; ++a) {
      for (Index e = 0; e < k; ++e) {
        if (approx.indices(j, a) == exact.indices(j, e)) {
          ++hits;
          break;
        }
      }
    }
    total += static_cast<double>(hits) / static_cast<double>(k);
  }
  return total / static_cast<double>(approx.m());
}

double recall_at_k(const MatchTables& approx, const MatchTables& exact) {
  return recall_at_k(approx, exact, approx.k());
}

void validate_tables(const MatchTables& tables, Index n) {
  if (tables.distances.rows() != tables.indices.rows() || tables.distances.cols() != tables.indices.cols()) {
    throw ValidationError("distance and index tables differ in shape");
  }
  for (Index j = 0; j < tables.m(); ++j) {
    for (Index c = 0; c < tables.k(); ++c) {
      const Index i = tables.indices(j, c);
      if (i < 0 || i >= n) {
        throw CorruptionError("match index " + std::to_string(i) + " at row " + std::to_string(j) +
                              " outside training range [0, " + std::to_string(n) + ")");
      }
      const double d = tables.distances(j, c);
      if (!std::isfinite(d) || d < 0.0) {
        throw ValidationError("invalid distance at row " + std::to_string(j) + ", column " + std::to_string(c));
      }
    }
  }
}

}  // namespace genval
