#pragma once

// Fractional powers of admissible 3x3 matrices through the Balakrishnan
// integral
//
//   A^a = sin(a pi) / pi * int_0^inf lambda^(a-1) A (lambda I + A)^(-1) dlambda,
//
// for 0 < a < 1, extended to any real exponent by peeling off whole powers.
// An eigendecomposition route (A^a = V diag(mu_i^a) V^-1) serves as an
// independent oracle.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "fracrot/errors.hpp"
#include "fracrot/linalg3.hpp"
#include "fracrot/rotation.hpp"

namespace fracrot {

enum class QuadratureMethod { kDoubleExponential, kGaussLegendreSplit };

inline const char* to_string(QuadratureMethod method) {
  switch (method) {
    case QuadratureMethod::kDoubleExponential:
      return "double-exponential";
    case QuadratureMethod::kGaussLegendreSplit:
      return "gauss-legendre-split";
  }
  return "unknown";
}

/// For double-exponential, `level` L means step h = 2^(1-L) in the tanh-sinh
/// variable; for gauss-legendre-split it is the node count per panel.
struct QuadratureConfig {
  QuadratureMethod method = QuadratureMethod::kDoubleExponential;
  int level = 7;
  double abs_tolerance = 1e-10;

  void validate() const {
    if (level < 1) throw std::invalid_argument("QuadratureConfig: level must be >= 1");
    if (!(abs_tolerance > 0))
      throw std::invalid_argument("QuadratureConfig: abs_tolerance must be > 0");
  }
};

template <typename Scalar>
struct SpectrumCheck {
  std::array<std::complex<Scalar>, 3> eigenvalues;
  bool admissible = false;
};

template <typename Scalar>
struct QuadratureResult {
  Mat3<Scalar> value;
  Scalar error_estimate = 0;  // |Q_L - Q_{L-1}|_F
  int nodes = 0;              // integrand samples at the final level
};

template <typename Scalar>
struct ConvergenceRow {
  int level = 0;
  int nodes = 0;
  Scalar error = 0;
};

template <typename Scalar>
using ConvergenceReport = std::vector<ConvergenceRow<Scalar>>;

namespace detail {

/// Distance from z to the closed ray (-inf, 0].
template <typename Scalar>
Scalar distance_to_negative_ray(const std::complex<Scalar>& z) {
  using std::abs;
  return z.real() <= Scalar(0) ? abs(z.imag()) : std::abs(z);
}

/// Roots of x^3 + a x^2 + b x + c by Cardano's formula in complex
/// arithmetic, each polished with two Newton steps.
template <typename Scalar>
std::array<std::complex<Scalar>, 3> cubic_roots(Scalar a, Scalar b, Scalar c) {
  using Complex = std::complex<Scalar>;
  const Scalar p = b - a * a / Scalar(3);
  const Scalar q = Scalar(2) * a * a * a / Scalar(27) - a * b / Scalar(3) + c;

  const Complex disc = std::sqrt(Complex(q * q / Scalar(4) + p * p * p / Scalar(27)));
  Complex u_cubed = -q / Scalar(2) + disc;
  const Complex alt = -q / Scalar(2) - disc;
  if (std::abs(alt) > std::abs(u_cubed)) u_cubed = alt;

  std::array<Complex, 3> roots;
  const Scalar shift = -a / Scalar(3);
  if (std::abs(u_cubed) == Scalar(0)) {
    // p = q = 0: triple root.
    roots.fill(Complex(shift));
  } else {
    const Complex u = std::pow(u_cubed, Scalar(1) / Scalar(3));
    const Complex omega(Scalar(-0.5), std::sqrt(Scalar(3)) / Scalar(2));
    Complex w(1);
    for (auto& root : roots) {
      const Complex uk = u * w;
      root = uk - p / (Scalar(3) * uk) + shift;
      w *= omega;
    }
  }

  for (auto& root : roots) {
    for (int it = 0; it < 2; ++it) {
      const Complex f = ((root + a) * root + b) * root + c;
      const Complex df = (Scalar(3) * root + Scalar(2) * a) * root + b;
      if (std::abs(df) == Scalar(0)) break;
      const Complex next = root - f / df;
      if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) break;
      root = next;
    }
  }
  return roots;
}

}  // namespace detail

/// Eigenvalues from the characteristic polynomial; admissible iff none lies
/// within 1e-12 of the closed ray (-inf, 0].
template <typename Scalar>
SpectrumCheck<Scalar> check_spectrum(const Mat3<Scalar>& m) {
  const Scalar trace = m.trace();
  const Scalar minors = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) +
                        m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0) +
                        m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  SpectrumCheck<Scalar> out;
  out.eigenvalues = detail::cubic_roots(-trace, minors, -det3(m));
  out.admissible = all_finite(m) &&
                   std::all_of(out.eigenvalues.begin(), out.eigenvalues.end(),
                               [](const std::complex<Scalar>& z) {
                                 return detail::distance_to_negative_ray(z) >
                                        Scalar(1e-12);
                               });
  return out;
}

namespace detail {

template <typename Scalar>
void require_admissible(const Mat3<Scalar>& m, const char* where) {
  const auto spectrum = check_spectrum(m);
  if (!spectrum.admissible) {
    std::ostringstream os;
    os << where << ": spectrum touches the closed negative real axis (eigenvalues";
    for (const auto& z : spectrum.eigenvalues) os << ' ' << z;
    os << ')';
    throw InadmissibleSpectrum(os.str());
  }
}

/// log(1 + e^x) without overflow.
template <typename Scalar>
Scalar log1p_exp(Scalar x) {
  using std::exp;
  using std::log1p;
  return x > Scalar(0) ? x + log1p(exp(-x)) : log1p(exp(x));
}

/// Balakrishnan integrand after lambda = s / (1 - s):
///   s^(a-1) (1-s)^(-a) m (s I + (1-s) m)^(-1) ds.
/// Tanh-sinh maps s = 1 / (1 + exp(-2u)), u = (pi/2) sinh t, so
/// ds/dt = 2 u' s (1 - s) and the scalar part of the sample becomes
///   2 u' s^a (1-s)^(1-a),
/// which is evaluated in log space so that it stays accurate for a near 0
/// or 1, where the endpoint decay is extremely slow in linear space.
template <typename Scalar>
class TanhSinhIntegrand {
 public:
  TanhSinhIntegrand(const Mat3<Scalar>& m, Scalar alpha) : m_(m), alpha_(alpha) {}

  Scalar log_weight(Scalar t) const {
    const Scalar u = kPi<Scalar> / 2 * std::sinh(t);
    const Scalar du = kPi<Scalar> / 2 * std::cosh(t);
    const Scalar log_s = -log1p_exp(Scalar(-2) * u);
    const Scalar log_1ms = -log1p_exp(Scalar(2) * u);
    return std::log(Scalar(2) * du) + alpha_ * log_s + (Scalar(1) - alpha_) * log_1ms;
  }

  Mat3<Scalar> operator()(Scalar t) const {
    const Scalar u = kPi<Scalar> / 2 * std::sinh(t);
    const Scalar s = std::exp(-log1p_exp(Scalar(-2) * u));
    const Scalar one_minus_s = std::exp(-log1p_exp(Scalar(2) * u));
    const Mat3<Scalar> shifted = s * Mat3<Scalar>::Identity() + one_minus_s * m_;
    return std::exp(log_weight(t)) * (m_ * inverse3(shifted));
  }

 private:
  Mat3<Scalar> m_;
  Scalar alpha_;
};

/// Outermost |t| on one side with a non-negligible weight.
template <typename Scalar>
Scalar tanh_sinh_extent(const TanhSinhIntegrand<Scalar>& f, Scalar direction) {
  constexpr Scalar kLogCutoff = Scalar(-46);  // e^-46 ~ 1e-20
  constexpr Scalar kMaxT = Scalar(12);
  constexpr Scalar kProbe = Scalar(1) / Scalar(64);
  Scalar t = 0;
  while (t < kMaxT && f.log_weight(direction * t) > kLogCutoff) t += kProbe;
  return t;
}

template <typename Scalar>
QuadratureResult<Scalar> tanh_sinh(const Mat3<Scalar>& m, Scalar alpha, int level) {
  const TanhSinhIntegrand<Scalar> f(m, alpha);
  const Scalar t_lo = -tanh_sinh_extent(f, Scalar(-1));
  const Scalar t_hi = tanh_sinh_extent(f, Scalar(1));

  // Level 1 samples the integers; each further level adds the odd multiples
  // of the halved step. The running sum is kept unscaled by h.
  Mat3<Scalar> sum = Mat3<Scalar>::Zero();
  int nodes = 0;
  for (Scalar t = std::ceil(t_lo); t <= t_hi; t += Scalar(1)) {
    sum += f(t);
    ++nodes;
  }
  Scalar h = 1;
  Mat3<Scalar> previous = sum * h;
  Mat3<Scalar> current = previous;
  for (int l = 2; l <= level; ++l) {
    h /= Scalar(2);
    const auto k_lo = static_cast<long>(std::ceil(t_lo / h));
    const auto k_hi = static_cast<long>(std::floor(t_hi / h));
    for (long k = k_lo; k <= k_hi; ++k) {
      if (k % 2 == 0) continue;
      sum += f(Scalar(k) * h);
      ++nodes;
    }
    previous = current;
    current = sum * h;
  }
  return {current, (current - previous).norm(), nodes};
}

/// Gauss-Legendre nodes and weights on [0, 1].
template <typename Scalar>
std::pair<std::vector<Scalar>, std::vector<Scalar>> gauss_legendre_unit(int n) {
  std::vector<Scalar> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    Scalar z = std::cos(kPi<Scalar> * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
    Scalar dp = 1;
    for (int it = 0; it < 100; ++it) {
      Scalar p0 = 1, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const Scalar p2 = ((Scalar(2 * k - 1)) * z * p1 - Scalar(k - 1) * p0) / Scalar(k);
        p0 = p1;
        p1 = p2;
      }
      dp = Scalar(n) * (z * p1 - p0) / (z * z - Scalar(1));
      const Scalar dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < Scalar(4) * std::numeric_limits<Scalar>::epsilon()) break;
    }
    // recompute derivative at the converged node
    Scalar p0 = 1, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const Scalar p2 = ((Scalar(2 * k - 1)) * z * p1 - Scalar(k - 1) * p0) / Scalar(k);
      p0 = p1;
      p1 = p2;
    }
    dp = Scalar(n) * (z * p1 - p0) / (z * z - Scalar(1));
    x[i] = (Scalar(1) - z) / Scalar(2);
    w[i] = Scalar(1) / ((Scalar(1) - z * z) * dp * dp);  // 2/((1-z^2)P'^2) halved
  }
  return {x, w};
}

/// Splits at lambda = 1. Head: lambda = x^(1/a), tail: lambda = 1/mu with
/// mu = y^(1/(1-a)); both substitutions absorb the algebraic endpoint
/// factors, leaving
///   (1/a) m (x^(1/a) I + m)^-1  and  (1/(1-a)) m (I + y^(1/(1-a)) m)^-1.
template <typename Scalar>
Mat3<Scalar> gauss_legendre_split_sum(const Mat3<Scalar>& m, Scalar alpha, int n) {
  const auto [x, w] = gauss_legendre_unit<Scalar>(n);
  const Mat3<Scalar> eye = Mat3<Scalar>::Identity();
  Mat3<Scalar> head = Mat3<Scalar>::Zero();
  Mat3<Scalar> tail = Mat3<Scalar>::Zero();
  for (int i = 0; i < n; ++i) {
    const Scalar lambda = std::pow(x[i], Scalar(1) / alpha);
    head += w[i] * inverse3<Scalar>(lambda * eye + m);
    const Scalar mu = std::pow(x[i], Scalar(1) / (Scalar(1) - alpha));
    tail += w[i] * inverse3<Scalar>(eye + mu * m);
  }
  return m * (head / alpha + tail / (Scalar(1) - alpha));
}

template <typename Scalar>
QuadratureResult<Scalar> gauss_legendre_split(const Mat3<Scalar>& m, Scalar alpha,
                                              int nodes) {
  const Mat3<Scalar> fine = gauss_legendre_split_sum(m, alpha, nodes);
  const Mat3<Scalar> coarse = gauss_legendre_split_sum(m, alpha, std::max(1, nodes / 2));
  return {fine, (fine - coarse).norm(), 2 * nodes};
}

template <typename Scalar>
void require_open_unit_interval(Scalar alpha, const char* where) {
  if (!(alpha > Scalar(0) && alpha < Scalar(1))) {
    std::ostringstream os;
    os << where << ": alpha = " << alpha << " outside (0, 1)";
    throw DomainAlpha(os.str());
  }
}

template <typename Scalar>
QuadratureResult<Scalar> integrate_unchecked(const Mat3<Scalar>& m, Scalar alpha,
                                             const QuadratureConfig& cfg) {
  QuadratureResult<Scalar> r =
      cfg.method == QuadratureMethod::kDoubleExponential
          ? tanh_sinh(m, alpha, cfg.level)
          : gauss_legendre_split(m, alpha, cfg.level);
  const Scalar scale = std::sin(alpha * kPi<Scalar>) / kPi<Scalar>;
  r.value *= scale;
  r.error_estimate *= scale;
  return r;
}

}  // namespace detail

/// Evaluates the Balakrishnan integral for 0 < alpha < 1 and reports the
/// disagreement with the next coarser level. Throws QuadratureNotConverged
/// when that disagreement exceeds cfg.abs_tolerance.
template <typename Scalar>
QuadratureResult<Scalar> balakrishnan_power_estimate(const Mat3<Scalar>& m, Scalar alpha,
                                                     const QuadratureConfig& cfg = {}) {
  cfg.validate();
  detail::require_open_unit_interval(alpha, "balakrishnan_power");
  detail::require_admissible(m, "balakrishnan_power");
  QuadratureResult<Scalar> r = detail::integrate_unchecked(m, alpha, cfg);
  if (!(r.error_estimate <= Scalar(cfg.abs_tolerance))) {
    std::ostringstream os;
    os << "balakrishnan_power: level " << cfg.level << " (" << to_string(cfg.method)
       << ") disagrees with the coarser level by " << r.error_estimate
       << " > tolerance " << cfg.abs_tolerance;
    throw QuadratureNotConverged(os.str());
  }
  return r;
}

template <typename Scalar>
Mat3<Scalar> balakrishnan_power(const Mat3<Scalar>& m, Scalar alpha,
                                const QuadratureConfig& cfg = {}) {
  return balakrishnan_power_estimate(m, alpha, cfg).value;
}

/// m^alpha for any real alpha: alpha = k + f with k = floor(alpha), and the
/// result is m^k * balakrishnan_power(m, f). Whole powers are repeated
/// products (of inverse3(m) for k < 0); f = 0 skips the quadrature.
template <typename Scalar>
QuadratureResult<Scalar> real_power_estimate(const Mat3<Scalar>& m, Scalar alpha,
                                             const QuadratureConfig& cfg = {}) {
  using std::floor;
  if (!std::isfinite(static_cast<double>(alpha)))
    throw DomainAlpha("real_power: alpha must be finite");
  detail::require_admissible(m, "real_power");
  Scalar whole = floor(alpha);
  const Scalar frac = alpha - whole;

  QuadratureResult<Scalar> r{Mat3<Scalar>::Identity(), Scalar(0), 0};
  if (frac > Scalar(0)) r = balakrishnan_power_estimate(m, frac, cfg);

  if (whole != Scalar(0)) {
    const Mat3<Scalar> base = whole > Scalar(0) ? m : inverse3(m);
    const auto count = static_cast<long>(std::abs(whole));
    Mat3<Scalar> power = base;
    for (long i = 1; i < count; ++i) power = (power * base).eval();
    r.value = (power * r.value).eval();
  }
  return r;
}

template <typename Scalar>
Mat3<Scalar> real_power(const Mat3<Scalar>& m, Scalar alpha,
                        const QuadratureConfig& cfg = {}) {
  return real_power_estimate(m, alpha, cfg).value;
}

/// (lambda I + A(n, pi/2))^-1 in closed form,
///   1 / ((lambda + 1)(lambda^2 + 1)) * [n_i n_j (1 - lambda)
///     + lambda (1 + lambda) d_ij - (1 + lambda) G_ij].
template <typename Scalar>
Mat3<Scalar> resolvent_quarter_turn(const UnitAxis<Scalar>& axis, Scalar lambda) {
  if (!(lambda >= Scalar(0)))
    throw std::invalid_argument("resolvent_quarter_turn: lambda must be >= 0");
  const Scalar a = axis.n1(), b = axis.n2(), c = axis.n3();
  const Scalar v = Scalar(1) - lambda;
  const Scalar d = lambda * (Scalar(1) + lambda);
  const Scalar p = Scalar(1) + lambda;
  Mat3<Scalar> r;
  r << a * a * v + d, a * b * v + c * p, a * c * v - b * p,
       a * b * v - c * p, b * b * v + d, b * c * v + a * p,
       a * c * v + b * p, b * c * v - a * p, c * c * v + d;
  return r / ((lambda + Scalar(1)) * (lambda * lambda + Scalar(1)));
}

template <typename Scalar>
struct EigPowerResult {
  Mat3<Scalar> value;
  Scalar imaginary_residue = 0;  // max |Im| before it was discarded
  Scalar eigenvector_condition = 0;
};

/// V diag(mu_i^alpha) V^-1 with principal-branch complex powers.
template <typename Scalar>
EigPowerResult<Scalar> eig_power_oracle_detailed(const Mat3<Scalar>& m, Scalar alpha) {
  using Complex = std::complex<Scalar>;
  using CMat3 = Eigen::Matrix<Complex, 3, 3>;
  detail::require_admissible(m, "eig_power_oracle");

  const Eigen::Matrix<Scalar, 3, 3> dense = m;
  Eigen::EigenSolver<Eigen::Matrix<Scalar, 3, 3>> solver(dense, true);
  if (solver.info() != Eigen::Success) throw DegenerateEigenbasis("eigensolver failed");
  const CMat3 v = solver.eigenvectors();
  const auto values = solver.eigenvalues();

  // Frobenius-norm condition number, an upper bound on the 2-norm one.
  const CMat3 v_inv = v.inverse();
  const Scalar cond = v.norm() * v_inv.norm();
  if (!(cond <= Scalar(1e8))) {
    std::ostringstream os;
    os << "eig_power_oracle: eigenvector matrix condition " << cond << " exceeds 1e8";
    throw DegenerateEigenbasis(os.str());
  }

  CMat3 d = CMat3::Zero();
  for (int i = 0; i < 3; ++i) {
    const Complex mu = values(i);
    // exp(alpha (log|mu| + i Arg mu)), Arg in (-pi, pi]
    d(i, i) = std::exp(alpha * Complex(std::log(std::abs(mu)), std::arg(mu)));
  }
  const CMat3 power = v * d * v_inv;

  EigPowerResult<Scalar> out;
  out.value = power.real();
  out.imaginary_residue = power.imag().cwiseAbs().maxCoeff();
  out.eigenvector_condition = cond;
  const Scalar scale = std::max(Scalar(1), out.value.cwiseAbs().maxCoeff());
  if (!(out.imaginary_residue < Scalar(1e-10) * scale)) {
    std::ostringstream os;
    os << "eig_power_oracle: imaginary residue " << out.imaginary_residue
       << " exceeds 1e-10";
    throw NumericalResidue(os.str());
  }
  return out;
}

template <typename Scalar>
Mat3<Scalar> eig_power_oracle(const Mat3<Scalar>& m, Scalar alpha) {
  return eig_power_oracle_detailed(m, alpha).value;
}

/// Frobenius error of the quadrature at each level against the
/// eigendecomposition oracle. The convergence check of the engine is
/// bypassed so coarse levels still report their error.
template <typename Scalar>
ConvergenceReport<Scalar> convergence_study(const Mat3<Scalar>& m, Scalar alpha,
                                            const std::vector<int>& levels,
                                            QuadratureMethod method =
                                                QuadratureMethod::kDoubleExponential) {
  if (levels.empty()) throw std::invalid_argument("convergence_study: no levels");
  if (!std::is_sorted(levels.begin(), levels.end()) ||
      std::adjacent_find(levels.begin(), levels.end()) != levels.end())
    throw std::invalid_argument("convergence_study: levels must be strictly increasing");
  detail::require_open_unit_interval(alpha, "convergence_study");
  detail::require_admissible(m, "convergence_study");

  const Mat3<Scalar> reference = eig_power_oracle(m, alpha);
  ConvergenceReport<Scalar> report;
  for (int level : levels) {
    QuadratureConfig cfg;
    cfg.method = method;
    cfg.level = level;
    cfg.validate();
    const auto r = detail::integrate_unchecked(m, alpha, cfg);
    report.push_back({level, r.nodes, (r.value - reference).norm()});
  }
  return report;
}

}  // namespace fracrot
