#ifndef GENVAL_STATS_HPP
#define GENVAL_STATS_HPP

#include "genval/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace genval {

/// Regularized incomplete beta I_x(a, b), continued fraction (modified Lentz)
/// with a 1e-12 convergence threshold and at most 300 iterations.
double regularized_incomplete_beta(double a, double b, double x);

/// Upper tail P(T >= t) of Student's t with `df` (real, > 0) degrees of freedom.
double student_t_sf(double t, double df);

struct GroupSummary {
  double mean = 0.0;
  std::optional<double> variance;  // unbiased; absent for a single observation
  Index count = 0;
};

GroupSummary group_summary(std::span<const double> values);

enum class Alternative { Greater };

struct TTestResult {
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_one_sided = 0.5;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
  Index n_a = 0;
  Index n_b = 0;
};

/// Welch's unequal-variance t-test, H1: mean(a) > mean(b).
TTestResult welch_t_test(std::span<const double> a, std::span<const double> b,
                         Alternative alternative = Alternative::Greater);

struct TransportResult {
  double cost = 0.0;
  int p = 1;
  std::vector<Index> assignment;  // source row i -> target row assignment[i]
};

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian method
/// with potentials, O(n^3)). Returns the column assigned to each row.
std::vector<Index> min_cost_assignment(const RowMatrix<double>& cost);

inline constexpr Index kMaxTransportSize = 256;

/// Exact W_p between two equal-size empirical measures:
///   (min_sigma (1/n) sum_i |x_i - y_sigma(i)|^p)^(1/p).
TransportResult exact_wasserstein(const EmbeddingMatrix& source, const EmbeddingMatrix& target, int p);

}  // namespace genval

#endif  // GENVAL_STATS_HPP
