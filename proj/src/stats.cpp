#include "genval/stats.hpp"

#include "genval/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace genval {

namespace {

constexpr double kBetaEpsilon = 1e-12;
constexpr int kBetaMaxIterations = 300;
constexpr double kTiny = 1e-300;

// Continued fraction for I_x(a, b), valid (fast) for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kBetaMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kBetaEpsilon) return h;
  }
  throw InternalError("incomplete beta continued fraction did not converge (a=" + std::to_string(a) +
                      ", b=" + std::to_string(b) + ", x=" + std::to_string(x) + ")");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("incomplete beta needs a > 0 and b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("incomplete beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_sf(double t, double df) {
  if (!(df > 0.0)) throw ValidationError("degrees of freedom must be positive");
  if (std::isnan(t)) throw ValidationError("t statistic is NaN");
  if (t == 0.0) return 0.5;
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  // P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2); each tail carries half of it.
  const double x = df / (df + t * t);
  const double two_tail = regularized_incomplete_beta(0.5 * df, 0.5, x);
  return t > 0.0 ? 0.5 * two_tail : 1.0 - 0.5 * two_tail;
}

GroupSummary group_summary(std::span<const double> values) {
  if (values.empty()) throw ValidationError("group_summary of an empty sample");
  GroupSummary summary;
  summary.count = static_cast<Index>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  summary.mean = sum / static_cast<double>(values.size());
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - summary.mean) * (v - summary.mean);
    summary.variance = ss / static_cast<double>(values.size() - 1);
  }
  return summary;
}

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b, Alternative) {
  if (a.size() < 2 || b.size() < 2) {
    throw ValidationError("sample too small: Welch test needs at least 2 observations per group (got " +
                          std::to_string(a.size()) + " and " + std::to_string(b.size()) + ")");
  }
  const GroupSummary sa = group_summary(a);
  const GroupSummary sb = group_summary(b);
  TTestResult r;
  r.mean_a = sa.mean;
  r.mean_b = sb.mean;
  r.var_a = *sa.variance;
  r.var_b = *sb.variance;
  r.n_a = sa.count;
  r.n_b = sb.count;
  if (r.var_a == 0.0 && r.var_b == 0.0) {
    throw ValidationError("degenerate samples: both groups have zero variance");
  }
  const double qa = r.var_a / static_cast<double>(r.n_a);
  const double qb = r.var_b / static_cast<double>(r.n_b);
  r.t_statistic = (r.mean_a - r.mean_b) / std::sqrt(qa + qb);
  r.degrees_of_freedom = (qa + qb) * (qa + qb) /
                         (qa * qa / static_cast<double>(r.n_a - 1) + qb * qb / static_cast<double>(r.n_b - 1));
  r.p_one_sided = student_t_sf(r.t_statistic, r.degrees_of_freedom);
  return r;
}

}  // namespace genval
