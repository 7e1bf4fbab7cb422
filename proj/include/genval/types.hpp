#ifndef GENVAL_TYPES_HPP
#define GENVAL_TYPES_HPP

#include <Eigen/Core>

#include <cstdint>

namespace genval {

using Index = Eigen::Index;

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Row-major n x d matrix of 32-bit features. Row i is the identity of vector i.
using EmbeddingMatrix = RowMatrix<float>;

/// Squared Euclidean distance with 64-bit accumulation.
template <typename DerivedA, typename DerivedB>
double squared_distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  eigen_assert(a.size() == b.size());
  double acc = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    const double diff = static_cast<double>(a.coeff(i)) - static_cast<double>(b.coeff(i));
    acc += diff * diff;
  }
  return acc;
}

}  // namespace genval

#endif  // GENVAL_TYPES_HPP
