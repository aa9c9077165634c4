#pragma once

// Property suites that cross-check the closed forms against the generic
// routes (Rodrigues, matrix exponential, quadrature, eigendecomposition).
// Used by `fracrot verify` and by the acceptance tests.

#include <functional>
#include <string>
#include <vector>

#include "fracrot/fracpow.hpp"
#include "fracrot/rotation.hpp"

namespace fracrot::verify {

using Axis = UnitAxis<double>;
using Rot = Rotation<double>;

/// The closed forms under test. `reference()` binds the library versions;
/// tests swap individual entries for corrupted ones to check that the
/// suites notice.
struct Formulas {
  std::function<Rot(const Axis&)> quarter_turn;
  std::function<Rot(const Axis&, double)> rodrigues;
  std::function<Rot(const Axis&, double)> frac_power_closed;
  std::function<Rot(const Axis&, double)> rotation_of;
  std::function<Mat3d(const Axis&)> generator;
  std::function<Mat3d(const Axis&, double)> semigroup;
  std::function<Mat3d(const Axis&, double)> resolvent;
  std::function<Mat3d(const Axis&, double)> log_rotation;

  static Formulas reference();
};

enum class Suite { kAll, kRotation, kFracpow };

Suite parse_suite(const std::string& name);

struct PropertyResult {
  std::string suite;
  std::string name;
  double max_error = 0;
  double bound = 0;
  bool passed = false;
};

struct Report {
  std::vector<PropertyResult> properties;
  bool all_passed() const;
};

/// Round-off properties pass when max_error <= tol. The generator
/// difference quotient (error / h <= 1) and the near-endpoint engine check
/// (<= 1e-2) carry their own fixed bounds.
Report run(Suite suite, double tol, const Formulas& formulas = Formulas::reference());

/// Coordinate axes, three face diagonals, three body diagonals and eight
/// seeded pseudo-random directions.
std::vector<Axis> test_axes();

}  // namespace fracrot::verify
