#include "genval/errors.hpp"
#include "genval/stats.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace genval;

namespace {

RowMatrix<double> cost_matrix(const EmbeddingMatrix& a, const EmbeddingMatrix& b, int p) {
  RowMatrix<double> c(a.rows(), b.rows());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.rows(); ++j) {
      const double sq = squared_distance(a.row(i), b.row(j));
      c(i, j) = p == 2 ? sq : std::sqrt(sq);
    }
  }
  return c;
}

}  // namespace

TEST(Transport, IdenticalSetsCostNothing) {
  const EmbeddingMatrix a = oracle::random_matrix(9, 3, 1);
  for (int p : {1, 2}) {
    const TransportResult r = exact_wasserstein(a, a, p);
    EXPECT_EQ(r.cost, 0.0);
    EXPECT_EQ(r.p, p);
  }
}

TEST(Transport, OneDimensionalSortedMatching) {
  EmbeddingMatrix a(2, 1), b(2, 1);
  a << 0, 1;
  b << 1, 2;
  // identity: (1 + 1) / 2 = 1; swap: (2 + 0) / 2 = 1. Both permutations cost 1.
  EXPECT_DOUBLE_EQ(exact_wasserstein(a, b, 1).cost, 1.0);
  // p = 2: identity sqrt((1 + 1) / 2) = 1 beats swap sqrt((4 + 0) / 2).
  const TransportResult r2 = exact_wasserstein(a, b, 2);
  EXPECT_DOUBLE_EQ(r2.cost, 1.0);
  EXPECT_EQ(r2.assignment, (std::vector<Index>{0, 1}));
}

TEST(Transport, HungarianMatchesPermutationBruteForce) {
  Rng rng(31);
  for (int trial = 0; trial < 120; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.index(7));
    const Index d = 1 + static_cast<Index>(rng.index(4));
    const EmbeddingMatrix a = oracle::random_matrix(n, d, rng());
    const EmbeddingMatrix b = oracle::random_matrix(n, d, rng());
    for (int p : {1, 2}) {
      const RowMatrix<double> cost = cost_matrix(a, b, p);
      const TransportResult r = exact_wasserstein(a, b, p);
      std::set<Index> targets(r.assignment.begin(), r.assignment.end());
      EXPECT_EQ(targets.size(), static_cast<std::size_t>(n));
      double total = 0.0;
      for (Index i = 0; i < n; ++i) total += cost(i, r.assignment[i]);
      EXPECT_EQ(total, oracle::brute_assignment_cost(cost));
      const double mean = total / static_cast<double>(n);
      EXPECT_DOUBLE_EQ(r.cost, p == 2 ? std::sqrt(mean) : mean);
    }
  }
}

TEST(Transport, AssignmentOnIntegerCostMatrix) {
  RowMatrix<double> cost(3, 3);
  cost << 4, 1, 3,
          2, 0, 5,
          3, 2, 2;
  const auto assignment = min_cost_assignment(cost);
  EXPECT_EQ(assignment, (std::vector<Index>{1, 0, 2}));
  EXPECT_THROW(min_cost_assignment(RowMatrix<double>(2, 3)), ValidationError);
}

TEST(Transport, MetricAxioms) {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.index(6));
    const EmbeddingMatrix a = oracle::random_matrix(n, 3, rng());
    const EmbeddingMatrix b = oracle::random_matrix(n, 3, rng());
    const EmbeddingMatrix c = oracle::random_matrix(n, 3, rng());
    for (int p : {1, 2}) {
      const double ab = exact_wasserstein(a, b, p).cost;
      const double ba = exact_wasserstein(b, a, p).cost;
      const double bc = exact_wasserstein(b, c, p).cost;
      const double ac = exact_wasserstein(a, c, p).cost;
      EXPECT_GE(ab, 0.0);
      EXPECT_NEAR(ab, ba, 1e-9);
      EXPECT_LE(ac, ab + bc + 1e-9);
    }
  }
}

TEST(Transport, Errors) {
  const EmbeddingMatrix a = oracle::random_matrix(3, 2, 1);
  EXPECT_THROW(exact_wasserstein(a, oracle::random_matrix(4, 2, 2), 1), ValidationError);
  EXPECT_THROW(exact_wasserstein(a, oracle::random_matrix(3, 3, 2), 1), ValidationError);
  EXPECT_THROW(exact_wasserstein(a, a, 3), ConfigError);
  const EmbeddingMatrix big = oracle::random_matrix(257, 1, 3);
  EXPECT_THROW(exact_wasserstein(big, big, 1), ValidationError);
}
