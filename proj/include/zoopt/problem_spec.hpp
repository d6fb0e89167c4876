#pragma once

#include <functional>
#include <string>
#include <vector>

#include "zoopt/geometry.hpp"
#include "zoopt/oracle.hpp"

namespace zoopt {

/// Extra per-iterate observables of attack problems.
struct AttackHooks {
  /// ||delta||^2 (mean over images for the tanh formulation).
  std::function<double(const Vector&)> distortion;
  /// Per-image "CW term is zero" flags.
  std::function<std::vector<bool>(const Vector&)> image_success;

  explicit operator bool() const { return distortion && image_success; }
};

/// A pairing (f, X) with an initial point.
struct ProblemSpec {
  StochasticObjective objective;
  ConstraintSet constraint;
  ProblemMetadata metadata;
  Vector initial;
  std::string tag;
  AttackHooks attack;
};

}  // namespace zoopt
