#pragma once

// Closed-form rotations built from the quarter turn about a unit axis:
// the quarter-turn matrix itself, the Euler-Rodrigues entries, the
// closed-form fractional powers A^alpha(n, pi/2), the theta-parameterized
// rotation, the semigroup exp(t A), the generator and the principal log.

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "fracrot/errors.hpp"
#include "fracrot/linalg3.hpp"

namespace fracrot {

/// Unit rotation axis n = (n1, n2, n3). Construction normalizes; inputs
/// shorter than 1e-9 (or non-finite) are rejected.
template <typename Scalar>
class UnitAxis {
 public:
  static constexpr double kMinNorm = 1e-9;

  explicit UnitAxis(const Vec3<Scalar>& v) {
    const Scalar norm = v.norm();
    if (!all_finite(v) || !(norm >= Scalar(kMinNorm))) {
      std::ostringstream os;
      os << "axis norm " << norm << " is below " << kMinNorm;
      throw InvalidAxis(os.str());
    }
    n_ = v / norm;
  }

  UnitAxis(Scalar x, Scalar y, Scalar z) : UnitAxis(Vec3<Scalar>(x, y, z)) {}

  Scalar n1() const { return n_(0); }
  Scalar n2() const { return n_(1); }
  Scalar n3() const { return n_(2); }
  Scalar operator[](int i) const { return n_(i); }
  const Vec3<Scalar>& vector() const { return n_; }

  UnitAxis operator-() const { return UnitAxis(Vec3<Scalar>(-n_)); }

 private:
  Vec3<Scalar> n_;
};

/// A 3x3 matrix known to be orthogonal with unit determinant.
template <typename Scalar>
class Rotation {
 public:
  static constexpr double kCheckTolerance = 1e-8;

  /// Accepts `m` if |m^T m - I|_max and |det m - 1| are within `tol`,
  /// otherwise throws NotARotation.
  static Rotation checked(const Mat3<Scalar>& m,
                          Scalar tol = Scalar(kCheckTolerance)) {
    const Scalar orth = orthogonality_error(m);
    const Scalar det_err = std::abs(det3(m) - Scalar(1));
    if (!all_finite(m) || !(orth <= tol) || !(det_err <= tol)) {
      std::ostringstream os;
      os << "not a rotation: |m^T m - I|_max = " << orth
         << ", |det - 1| = " << det_err;
      throw NotARotation(os.str());
    }
    return Rotation(m);
  }

  /// Wraps a matrix produced by one of the closed forms below; no check.
  static Rotation trusted(const Mat3<Scalar>& m) { return Rotation(m); }

  static Rotation identity() { return Rotation(Mat3<Scalar>::Identity()); }

  static Scalar orthogonality_error(const Mat3<Scalar>& m) {
    return (m.transpose() * m - Mat3<Scalar>::Identity()).cwiseAbs().maxCoeff();
  }

  const Mat3<Scalar>& matrix() const { return m_; }
  Scalar operator()(int i, int j) const { return m_(i, j); }

  Rotation inverse() const { return Rotation(m_.transpose()); }
  Rotation operator*(const Rotation& rhs) const { return Rotation(m_ * rhs.m_); }
  Vec3<Scalar> operator*(const Vec3<Scalar>& v) const { return m_ * v; }

 private:
  explicit Rotation(const Mat3<Scalar>& m) : m_(m) {}
  Mat3<Scalar> m_;
};

template <typename Scalar>
struct AxisAngle {
  UnitAxis<Scalar> axis;
  Scalar angle;
};

template <typename Scalar>
constexpr Scalar kPi = std::numbers::pi_v<Scalar>;

// Index helpers use 0-based indices.
constexpr int kronecker_delta(int i, int j) { return i == j ? 1 : 0; }

constexpr int levi_civita(int i, int j, int k) {
  if (i == j || j == k || k == i) return 0;
  // Even permutations of (0, 1, 2) are cyclic shifts.
  return ((j - i + 3) % 3 == 1) ? 1 : -1;
}

/// Rotation by pi/2 about `axis`: diagonal n_i^2, off-diagonals
/// n_i n_j -/+ n_k. Equivalently u -> n x u + <u, n> n.
template <typename Scalar>
Rotation<Scalar> quarter_turn(const UnitAxis<Scalar>& axis) {
  const Scalar n1 = axis.n1(), n2 = axis.n2(), n3 = axis.n3();
  Mat3<Scalar> a;
  a << n1 * n1,      n1 * n2 - n3, n1 * n3 + n2,
       n1 * n2 + n3, n2 * n2,      n2 * n3 - n1,
       n1 * n3 - n2, n2 * n3 + n1, n3 * n3;
  return Rotation<Scalar>::trusted(a);
}

/// R_ij = cos(theta) d_ij + (1 - cos(theta)) n_i n_j - sin(theta) e_ijk n_k
template <typename Scalar>
Rotation<Scalar> rodrigues(const UnitAxis<Scalar>& axis, Scalar theta) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(theta);
  const Scalar s = sin(theta);
  Mat3<Scalar> r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Scalar skew(0);
      for (int k = 0; k < 3; ++k) skew += Scalar(levi_civita(i, j, k)) * axis[k];
      r(i, j) = c * Scalar(kronecker_delta(i, j)) + (Scalar(1) - c) * axis[i] * axis[j] -
                s * skew;
    }
  }
  return Rotation<Scalar>::trusted(r);
}

template <typename Scalar>
Vec3<Scalar> rotate_vector(const UnitAxis<Scalar>& axis, Scalar theta,
                           const Vec3<Scalar>& u) {
  return rodrigues(axis, theta) * u;
}

/// Closed-form A^alpha(n, pi/2) for alpha in [-1, 1]. Negative exponents use
/// their own display (sin terms flipped) rather than a transpose.
template <typename Scalar>
Rotation<Scalar> frac_power_closed(const UnitAxis<Scalar>& axis, Scalar alpha) {
  using std::abs;
  using std::cos;
  using std::sin;
  if (!(abs(alpha) <= Scalar(1))) {
    std::ostringstream os;
    os << "frac_power_closed: alpha = " << alpha << " outside [-1, 1]";
    throw DomainAlpha(os.str());
  }
  const Scalar n1 = axis.n1(), n2 = axis.n2(), n3 = axis.n3();
  Mat3<Scalar> a;
  if (alpha >= Scalar(0)) {
    const Scalar c = cos(alpha * kPi<Scalar> / 2);
    const Scalar s = sin(alpha * kPi<Scalar> / 2);
    const Scalar v = Scalar(1) - c;
    a << n1 * n1 * v + c,      n1 * n2 * v - n3 * s, n1 * n3 * v + n2 * s,
         n1 * n2 * v + n3 * s, n2 * n2 * v + c,      n2 * n3 * v - n1 * s,
         n1 * n3 * v - n2 * s, n2 * n3 * v + n1 * s, n3 * n3 * v + c;
  } else {
    const Scalar c = cos(-alpha * kPi<Scalar> / 2);
    const Scalar s = sin(-alpha * kPi<Scalar> / 2);
    const Scalar v = Scalar(1) - c;
    a << n1 * n1 * v + c,      n1 * n2 * v + n3 * s, n1 * n3 * v - n2 * s,
         n1 * n2 * v - n3 * s, n2 * n2 * v + c,      n2 * n3 * v + n1 * s,
         n1 * n3 * v + n2 * s, n2 * n3 * v - n1 * s, n3 * n3 * v + c;
  }
  return Rotation<Scalar>::trusted(a);
}

/// A(n, theta) := A^(2 theta / pi)(n, pi/2), evaluated as
/// quarter_turn^m * frac_power_closed(f) with 2 theta / pi = m + f,
/// f in [0, 1). Since quarter_turn^4 = I, m is reduced modulo 4 first and
/// a residue of 3 is applied as the transpose.
template <typename Scalar>
Rotation<Scalar> rotation_of(const UnitAxis<Scalar>& axis, Scalar theta) {
  using std::floor;
  const Scalar alpha = Scalar(2) * theta / kPi<Scalar>;
  Scalar whole = floor(alpha);
  Scalar frac = alpha - whole;
  if (frac >= Scalar(1)) {  // alpha just below an integer can round up
    frac = Scalar(0);
    whole += Scalar(1);
  }
  const Scalar residue = whole - Scalar(4) * floor(whole / Scalar(4));
  int m = static_cast<int>(residue);
  if (m == 3) m = -1;

  const Rotation<Scalar> q = quarter_turn(axis);
  const Rotation<Scalar> step = m < 0 ? q.inverse() : q;
  Rotation<Scalar> result = frac_power_closed(axis, frac);
  for (int i = 0; i < std::abs(m); ++i) result = step * result;
  return result;
}

/// G with G u = n x u.
template <typename Scalar>
Mat3<Scalar> generator(const UnitAxis<Scalar>& axis) {
  Mat3<Scalar> g;
  g << Scalar(0), -axis.n3(), axis.n2(),
       axis.n3(), Scalar(0), -axis.n1(),
       -axis.n2(), axis.n1(), Scalar(0);
  return g;
}

/// Principal logarithm theta * G, defined for |theta| < pi. Throws
/// OutOfPrincipalDomain once |theta| >= pi - 1e-9.
template <typename Scalar>
Mat3<Scalar> log_rotation(const UnitAxis<Scalar>& axis, Scalar theta) {
  using std::abs;
  if (!(abs(theta) < kPi<Scalar> - Scalar(1e-9))) {
    std::ostringstream os;
    os << "log_rotation: |theta| = " << abs(theta)
       << " is not inside the principal domain |theta| < pi";
    throw OutOfPrincipalDomain(os.str());
  }
  return theta * generator(axis);
}

/// T(t) = exp(t A(n, pi/2)) in closed form:
/// n_i n_j (e^t - cos t) + cos t d_ij + sin t G_ij.
/// Negative t is accepted; the formula is entire in t.
template <typename Scalar>
Mat3<Scalar> semigroup(const UnitAxis<Scalar>& axis, Scalar t) {
  using std::cos;
  using std::exp;
  using std::sin;
  const Scalar c = cos(t);
  const Scalar s = sin(t);
  const Scalar v = exp(t) - c;
  const Scalar n1 = axis.n1(), n2 = axis.n2(), n3 = axis.n3();
  Mat3<Scalar> m;
  m << n1 * n1 * v + c,      n1 * n2 * v - n3 * s, n1 * n3 * v + n2 * s,
       n1 * n2 * v + n3 * s, n2 * n2 * v + c,      n2 * n3 * v - n1 * s,
       n1 * n3 * v - n2 * s, n2 * n3 * v + n1 * s, n3 * n3 * v + c;
  return m;
}

/// Recovers (axis, theta) with theta in [0, pi]. The identity maps to
/// ((0, 0, 1), 0) by convention.
template <typename Scalar>
AxisAngle<Scalar> axis_angle_from_matrix(const Rotation<Scalar>& rot) {
  using std::acos;
  using std::cos;
  using std::max;
  using std::min;
  using std::sin;
  using std::sqrt;
  const Mat3<Scalar>& r = rot.matrix();
  const Scalar cos_theta =
      max(Scalar(-1), min(Scalar(1), (r.trace() - Scalar(1)) / Scalar(2)));
  const Scalar theta = acos(cos_theta);
  if (theta < Scalar(1e-9)) {
    return {UnitAxis<Scalar>(0, 0, 1), Scalar(0)};
  }

  const Vec3<Scalar> skew(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  const Scalar sin_theta = sin(theta);
  if (sin_theta > Scalar(1e-6) || theta < kPi<Scalar> / 2) {
    return {UnitAxis<Scalar>(skew / (Scalar(2) * sin_theta)), theta};
  }

  // Near pi the skew part vanishes: n_i^2 = (r_ii - cos) / (1 - cos) on the
  // diagonal, the rest of the pivot row gives n_i n_j.
  const Scalar one_minus_cos = Scalar(1) - cos_theta;
  int pivot = 0;
  r.diagonal().maxCoeff(&pivot);
  Vec3<Scalar> n;
  n(pivot) = sqrt(max(Scalar(0), (r(pivot, pivot) - cos_theta) / one_minus_cos));
  for (int j = 0; j < 3; ++j) {
    if (j == pivot) continue;
    n(j) = (r(pivot, j) + r(j, pivot)) / (Scalar(2) * one_minus_cos * n(pivot));
  }
  if (skew.dot(n) < Scalar(0)) n = -n;
  return {UnitAxis<Scalar>(n), theta};
}

template <typename Scalar>
AxisAngle<Scalar> axis_angle_from_matrix(const Mat3<Scalar>& m) {
  return axis_angle_from_matrix(Rotation<Scalar>::checked(m));
}

/// rotation_of(axis, theta0 + k (theta1 - theta0) / steps), k = 0..steps.
template <typename Scalar>
std::vector<Rotation<Scalar>> interpolate(const UnitAxis<Scalar>& axis,
                                          Scalar theta0, Scalar theta1,
                                          int steps) {
  if (steps < 1) throw std::invalid_argument("interpolate: steps must be >= 1");
  std::vector<Rotation<Scalar>> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) {
    const Scalar theta = theta0 + Scalar(k) * (theta1 - theta0) / Scalar(steps);
    out.push_back(rotation_of(axis, theta));
  }
  return out;
}

}  // namespace fracrot
