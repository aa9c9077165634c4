#pragma once

// Dense 3x3 / 3-vector kernel. Everything is a free function over Eigen
// fixed-size types, templated on the scalar.

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "fracrot/errors.hpp"

namespace fracrot {

/// A column vector of size 3, templated on scalar type.
template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

/// A dense 3x3 matrix, templated on scalar type. Row-major so that the
/// documented (row, column) order matches the memory order.
template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3, Eigen::RowMajor>;

using Vec3d = Vec3<double>;
using Mat3d = Mat3<double>;

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

template <typename Scalar>
Mat3<Scalar> mat_mul(const Mat3<Scalar>& a, const Mat3<Scalar>& b) {
  return a * b;
}

template <typename Scalar>
Vec3<Scalar> cross(const Vec3<Scalar>& a, const Vec3<Scalar>& b) {
  return {a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2),
          a(0) * b(1) - a(1) * b(0)};
}

/// Determinant by cofactor expansion along the first row.
template <typename Scalar>
Scalar det3(const Mat3<Scalar>& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

/// Transpose of the cofactor matrix.
template <typename Scalar>
Mat3<Scalar> adjugate(const Mat3<Scalar>& m) {
  Mat3<Scalar> adj;
  adj(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  adj(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
  adj(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
  adj(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
  adj(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
  adj(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
  adj(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
  adj(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
  adj(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return adj;
}

/// Inverse as adjugate over determinant. Throws SingularMatrix when
/// |det| < 1e-12 * max(1, |m|_F^3).
template <typename Scalar>
Mat3<Scalar> inverse3(const Mat3<Scalar>& m) {
  using std::abs;
  using std::max;
  const Scalar det = det3(m);
  const Scalar norm = m.norm();
  const Scalar threshold =
      Scalar(1e-12) * max(Scalar(1), norm * norm * norm);
  if (!(abs(det) >= threshold)) {
    std::ostringstream os;
    os << "inverse3: |det| = " << abs(det) << " below threshold " << threshold;
    throw SingularMatrix(os.str());
  }
  return adjugate(m) / det;
}

/// Matrix exponential: scale so that |m / 2^s|_F <= 1/2, sum the Taylor
/// series through order 12, then square s times.
template <typename Scalar>
Mat3<Scalar> mat_exp(const Mat3<Scalar>& m) {
  constexpr int kOrder = 12;
  int squarings = 0;
  Scalar norm = m.norm();
  while (norm > Scalar(0.5)) {
    norm /= Scalar(2);
    ++squarings;
  }
  const Mat3<Scalar> scaled = m / std::ldexp(Scalar(1), squarings);

  // Horner form of sum_{k=0}^{12} X^k / k!
  Mat3<Scalar> result = Mat3<Scalar>::Identity();
  for (int k = kOrder; k >= 1; --k) {
    result = Mat3<Scalar>::Identity() + (scaled * result) / Scalar(k);
  }
  for (int i = 0; i < squarings; ++i) {
    result = (result * result).eval();
  }
  return result;
}

template <typename Scalar>
Scalar frobenius_distance(const Mat3<Scalar>& a, const Mat3<Scalar>& b) {
  return (a - b).norm();
}

}  // namespace fracrot
