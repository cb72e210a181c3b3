#pragma once

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <utility>

#include "dipolar/errors.hpp"

namespace dipolar::roots {

// Root of f on [a, b] (f(a), f(b) of opposite sign) to absolute tolerance tol.
template <class F>
double bracketed(F&& f, double a, double b, double tol, const char* what = "root") {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (std::signbit(fa) == std::signbit(fb)) {
    std::ostringstream os;
    os << what << ": no sign change on [" << a << ", " << b << "] (f = " << fa << ", " << fb << ")";
    throw NumericError(os.str());
  }
  std::uintmax_t iters = 200;
  auto stop = [tol](double lo, double hi) { return std::abs(hi - lo) <= tol; };
  auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, stop, iters);
  if (iters >= 200) {
    std::ostringstream os;
    os << what << ": bracket did not shrink below " << tol << " in 200 iterations";
    throw NumericError(os.str());
  }
  return 0.5 * (r.first + r.second);
}

// Expands [lo, hi] geometrically about its midpoint until f changes sign.
template <class F>
std::pair<double, double> expand_bracket(F&& f, double lo, double hi, int max_steps = 60,
                                         const char* what = "bracket") {
  double flo = f(lo), fhi = f(hi);
  for (int i = 0; i < max_steps && std::signbit(flo) == std::signbit(fhi); ++i) {
    const double w = hi - lo;
    lo -= w;
    hi += w;
    flo = f(lo);
    fhi = f(hi);
  }
  if (std::signbit(flo) == std::signbit(fhi)) {
    std::ostringstream os;
    os << what << ": no sign change found, last bracket [" << lo << ", " << hi << "]";
    throw NumericError(os.str());
  }
  return {lo, hi};
}

}  // namespace dipolar::roots
