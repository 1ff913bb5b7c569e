#include "prefsim/scalar_minimize.hpp"

#include <algorithm>
#include <cmath>

#include "prefsim/errors.hpp"

namespace prefsim {

namespace {

constexpr double kInvPhi = 0.6180339887498949;   // 1/phi
constexpr double kInvPhi2 = 0.3819660112501051;  // 1/phi^2

struct Limits {
  double lo;
  double hi;
};

Limits clamp_limits(const Bracket& b) {
  return {std::max(b.lo_limit, -kMaxBracket), std::min(b.hi_limit, kMaxBracket)};
}

bool narrow_enough(double a, double b, double tol) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return b - a <= tol * scale;
}

}  // namespace

ScalarMinimum minimize_scalar_convex(const std::function<double(double)>& fn, Bracket bracket,
                                     const SolverTolerance& settings) {
  const Limits lim = clamp_limits(bracket);
  double a = std::clamp(bracket.lo, lim.lo, lim.hi);
  double b = std::clamp(bracket.hi, lim.lo, lim.hi);
  if (!(a < b)) throw InvalidArgument("bracket must satisfy lo < hi");

  auto eval = [&](double x) {
    const double v = fn(x);
    if (!std::isfinite(v)) throw NumericError("objective is not finite at x = " + std::to_string(x));
    return v;
  };

  ScalarMinimum out;
  double fa = eval(a);
  double fb = eval(b);
  double m = a + kInvPhi2 * (b - a);
  double fm = eval(m);

  // Expand until an interior sample is strictly below both ends. Ties with an
  // end count as "still descending": a function that is flat out to a limit
  // (or underflows to a constant) has no attained minimizer inside it.
  while (!(fm < fa && fm < fb)) {
    if (++out.iterations > settings.max_iter) return out;
    const double width = b - a;
    if (fb <= fm) {
      if (b >= lim.hi) {
        out.argmin = b;
        out.value = fb;
        return out;
      }
      a = m;
      fa = fm;
      b = std::min(b + 2.0 * width, lim.hi);
      fb = eval(b);
    } else {
      if (a <= lim.lo) {
        out.argmin = a;
        out.value = fa;
        return out;
      }
      b = m;
      fb = fm;
      a = std::max(a - 2.0 * width, lim.lo);
      fa = eval(a);
    }
    m = a + kInvPhi2 * (b - a);
    fm = eval(m);
  }
  out.minimizer_exists = true;

  double x1 = a + kInvPhi2 * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = eval(x1);
  double f2 = eval(x2);
  while (out.iterations < settings.max_iter) {
    if (narrow_enough(a, b, settings.tol)) {
      out.converged = true;
      break;
    }
    ++out.iterations;
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = a + kInvPhi2 * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = eval(x2);
    }
  }
  if (f1 <= f2) {
    out.argmin = x1;
    out.value = f1;
  } else {
    out.argmin = x2;
    out.value = f2;
  }
  return out;
}

StationaryPoint bisect_derivative(const std::function<double(double)>& derivative,
                                  Bracket bracket, const SolverTolerance& settings) {
  const Limits lim = clamp_limits(bracket);
  double a = std::clamp(bracket.lo, lim.lo, lim.hi);
  double b = std::clamp(bracket.hi, lim.lo, lim.hi);
  if (!(a < b)) throw InvalidArgument("bracket must satisfy lo < hi");

  auto eval = [&](double x) {
    const double d = derivative(x);
    if (std::isnan(d)) throw NumericError("derivative is NaN at x = " + std::to_string(x));
    return d;
  };

  StationaryPoint out;
  // Invariant once expanded: derivative(a) < 0 <= derivative(b).
  while (eval(a) >= 0.0) {
    if (a <= lim.lo || ++out.iterations > settings.max_iter) {
      out.x = a;
      return out;
    }
    const double width = b - a;
    b = a;
    a = std::max(a - 2.0 * width, lim.lo);
  }
  while (eval(b) < 0.0) {
    if (b >= lim.hi || ++out.iterations > settings.max_iter) {
      out.x = b;
      return out;
    }
    const double width = b - a;
    a = b;
    b = std::min(b + 2.0 * width, lim.hi);
  }
  out.exists = true;

  while (out.iterations < settings.max_iter) {
    const double mid = a + 0.5 * (b - a);
    if (narrow_enough(a, b, settings.tol) || mid <= a || mid >= b) {
      out.converged = true;
      break;
    }
    ++out.iterations;
    if (eval(mid) >= 0.0) {
      b = mid;
    } else {
      a = mid;
    }
  }
  out.x = a + 0.5 * (b - a);
  return out;
}

}  // namespace prefsim
