#include "genval/errors.hpp"
#include "genval/stats.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace genval {

std::vector<Index> min_cost_assignment(const RowMatrix<double>& cost) {
  if (cost.rows() != cost.cols()) throw ValidationError("assignment needs a square cost matrix");
  const Index n = cost.rows();
  const double inf = std::numeric_limits<double>::infinity();
  // Potentials u (rows), v (columns); way[] records the augmenting path.
  // Index 0 is a virtual column used as the path root.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<Index> owner(n + 1, 0), way(n + 1, 0);
  for (Index row = 1; row <= n; ++row) {
    owner[0] = row;
    Index col0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const Index row0 = owner[col0];
      double delta = inf;
      Index col1 = 0;
      for (Index col = 1; col <= n; ++col) {
        if (used[col]) continue;
        const double reduced = cost(row0 - 1, col - 1) - u[row0] - v[col];
        if (reduced < minv[col]) {
          minv[col] = reduced;
          way[col] = col0;
        }
        if (minv[col] < delta) {
          delta = minv[col];
          col1 = col;
        }
      }
      for (Index col = 0; col <= n; ++col) {
        if (used[col]) {
          u[owner[col]] += delta;
          v[col] -= delta;
        } else {
          minv[col] -= delta;
        }
      }
      col0 = col1;
    } while (owner[col0] != 0);
    do {
      const Index col1 = way[col0];
      owner[col0] = owner[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<Index> assignment(static_cast<std::size_t>(n));
  for (Index col = 1; col <= n; ++col) assignment[owner[col] - 1] = col - 1;
  return assignment;
}

TransportResult exact_wasserstein(const EmbeddingMatrix& source, const EmbeddingMatrix& target, int p) {
  if (p != 1 && p != 2) throw ConfigError("Wasserstein exponent must be 1 or 2");
  if (source.cols() != target.cols()) {
    throw ValidationError("dimension mismatch: source dim " + std::to_string(source.cols()) + " vs target dim " +
                          std::to_string(target.cols()));
  }
  if (source.rows() != target.rows()) {
    throw ValidationError("unequal counts " + std::to_string(source.rows()) + " vs " + std::to_string(target.rows()) +
                          ": only equal-mass empirical measures are supported");
  }
  const Index n = source.rows();
  if (n < 1) throw ValidationError("empty point sets");
  if (n > kMaxTransportSize) {
    throw ValidationError("exact transport is limited to n <= " + std::to_string(kMaxTransportSize) + ", got " +
                          std::to_string(n));
  }
  RowMatrix<double> cost(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double sq = squared_distance(source.row(i), target.row(j));
      cost(i, j) = p == 2 ? sq : std::sqrt(sq);
    }
  }
  TransportResult result;
  result.p = p;
  result.assignment = min_cost_assignment(cost);
  double total = 0.0;
  for (Index i = 0; i < n; ++i) total += cost(i, result.assignment[i]);
  const double mean = total / static_cast<double>(n);
  result.cost = p == 2 ? std::sqrt(mean) : mean;
  return result;
}

}  // namespace genval
