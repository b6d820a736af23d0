#ifndef VDWFLOW_ROOTS_HPP
#define VDWFLOW_ROOTS_HPP

#include <cmath>
#include <sstream>

#include "vdwflow/errors.hpp"

namespace vdwflow {

/// Safeguarded Newton iteration on a bracket [lo, hi] with f(lo), f(hi) of
/// opposite sign. Falls back to bisection whenever the Newton step leaves
/// the bracket or fails to shrink it fast enough. Returns a root with
/// |f| <= f_tol, or the bracket midpoint once the bracket collapses to
/// machine width.
template <class F, class DF>
double newton_bisect(F&& f, DF&& df, double lo, double hi, double f_tol,
                     int max_iter = 200) {
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    std::ostringstream os;
    os << "newton_bisect: no sign change on [" << lo << ", " << hi << "]";
    throw ConvergenceFailure(os.str());
  }
  if (f_lo > 0.0) std::swap(lo, hi);  // keep f(lo) < 0 < f(hi)

  double x = 0.5 * (lo + hi);
  double step_prev = std::abs(hi - lo);
  double step = step_prev;
  double fx = f(x);
  double dfx = df(x);
  for (int it = 0; it < max_iter; ++it) {
    const bool newton_escapes =
        ((x - hi) * dfx - fx) * ((x - lo) * dfx - fx) > 0.0;
    const bool too_slow = std::abs(2.0 * fx) > std::abs(step_prev * dfx);
    if (newton_escapes || too_slow || dfx == 0.0) {
      step_prev = step;
      step = 0.5 * (hi - lo);
      x = lo + step;
      if (x == lo) return x;  // bracket exhausted
    } else {
      step_prev = step;
      step = fx / dfx;
      const double x_old = x;
      x -= step;
      if (x == x_old) return x;
    }
    fx = f(x);
    if (std::abs(fx) <= f_tol) return x;
    dfx = df(x);
    if (fx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
  }
  std::ostringstream os;
  os << "newton_bisect: residual " << fx << " above tolerance " << f_tol
     << " after " << max_iter << " iterations";
  throw ConvergenceFailure(os.str());
}

}  // namespace vdwflow

#endif
