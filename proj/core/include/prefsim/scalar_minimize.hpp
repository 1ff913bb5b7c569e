#pragma once

#include <functional>

namespace prefsim {

/// Brackets never grow past |x| = 1e30.
inline constexpr double kMaxBracket = 1e30;

struct SolverTolerance {
  double tol = 1e-10;
  int max_iter = 500;
};

/// Search interval [lo, hi], allowed to grow geometrically out to
/// [lo_limit, hi_limit] (clamped to +-kMaxBracket).
struct Bracket {
  double lo;
  double hi;
  double lo_limit;
  double hi_limit;

  static Bracket fixed(double lo, double hi) { return {lo, hi, lo, hi}; }
};

struct ScalarMinimum {
  double argmin = 0.0;
  double value = 0.0;
  bool converged = false;
  // False when the function keeps decreasing toward a bracket limit: the
  // infimum is not attained inside the limits.
  bool minimizer_exists = false;
  int iterations = 0;
};

/// Golden-section search for a convex function. The bracket is expanded until
/// an interior sample beats both ends, then shrunk until its width is within
/// `tol * max(1, |x|)`. Because only values are compared, the attainable
/// accuracy is about sqrt(machine epsilon) relative to the curvature scale.
/// Throws NumericError if fn returns a non-finite value.
ScalarMinimum minimize_scalar_convex(const std::function<double(double)>& fn, Bracket bracket,
                                     const SolverTolerance& settings = {});

struct StationaryPoint {
  double x = 0.0;
  bool converged = false;
  bool exists = false;
  int iterations = 0;
};

/// Locates the minimizer of a convex function from its right derivative:
/// the smallest x with derivative(x) >= 0. Kinks are handled by the
/// right-derivative convention and flat minima resolve to their left end.
/// The bracket expands around its initial interval out to its limits; if the
/// derivative keeps one sign across the whole range, `exists` is false.
/// Throws NumericError if derivative returns NaN.
StationaryPoint bisect_derivative(const std::function<double(double)>& derivative,
                                  Bracket bracket, const SolverTolerance& settings = {});

}  // namespace prefsim
