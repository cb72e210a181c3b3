#pragma once

// Globally adaptive Gauss-Kronrod (G10/K21) quadrature over a set of panels.
// The caller supplies breakpoints at known integrable singularities (log
// kinks, elliptic singularities, Fermi edges); the interval with the largest
// error estimate is bisected until the global estimate meets the tolerance.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <sstream>
#include <type_traits>
#include <vector>

#include "dipolar/errors.hpp"

namespace dipolar::quad {

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 4000;
};

template <class T>
struct Result {
  T value{};
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525551025, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

// Found by ADL, so vector-valued integrands can supply their own abs().
template <class T>
double magnitude(const T& v) {
  using std::abs;
  return abs(v);
}

template <class T>
struct Panel {
  double a, b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class T, class F>
Panel<T> gk21(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::array<T, 21> fv;
  fv[20] = f(c);
  for (int j = 0; j < 10; ++j) {
    const double dx = h * kXgk[j];
    fv[2 * j] = f(c - dx);
    fv[2 * j + 1] = f(c + dx);
  }
  T resk = fv[20] * kWgk[10];
  T resg{};
  double resabs = magnitude(fv[20]) * kWgk[10];
  for (int j = 0; j < 10; ++j) {
    resk += (fv[2 * j] + fv[2 * j + 1]) * kWgk[j];
    resabs += (magnitude(fv[2 * j]) + magnitude(fv[2 * j + 1])) * kWgk[j];
    if (j % 2 == 1) resg += (fv[2 * j] + fv[2 * j + 1]) * kWg[j / 2];
  }
  const T mean = resk * 0.5;
  double resasc = magnitude(T(fv[20] - mean)) * kWgk[10];
  for (int j = 0; j < 10; ++j)
    resasc += (magnitude(T(fv[2 * j] - mean)) + magnitude(T(fv[2 * j + 1] - mean))) * kWgk[j];
  resabs *= std::abs(h);
  resasc *= std::abs(h);
  Panel<T> p{a, b, resk * h, 0.0};
  double err = magnitude(T((resk - resg) * h));
  // QUADPACK scaling: the raw G10/K21 difference grossly overestimates the
  // error of the K21 result once the integrand is resolved.
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  p.error = std::isfinite(err) ? err : std::numeric_limits<double>::infinity();
  return p;
}

}  // namespace detail

// Integrates f over [pts.front(), pts.back()] with panels split at every
// interior point of pts (which must be sorted; duplicates are dropped).
template <class F>
auto integrate(F&& f, std::vector<double> pts, const Options& opt = {})
    -> Result<std::decay_t<decltype(f(0.0))>> {
  using T = std::decay_t<decltype(f(0.0))>;
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  Result<T> out;
  if (pts.size() < 2) {
    out.converged = true;
    return out;
  }
  std::priority_queue<detail::Panel<T>> heap;
  T total{};
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    auto p = detail::gk21<T>(f, pts[i], pts[i + 1]);
    total += p.value;
    err += p.error;
    heap.push(p);
    out.evaluations += 21;
  }
  int splits = 0;
  while (err > std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total))) {
    if (splits >= opt.max_subdivisions) break;
    auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted
    heap.pop();
    auto l = detail::gk21<T>(f, worst.a, mid);
    auto r = detail::gk21<T>(f, mid, worst.b);
    out.evaluations += 42;
    ++splits;
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
    if (splits % 64 == 0) {  // resynchronise running sums to curb drift
      total = T{};
      err = 0.0;
      auto copy = heap;
      while (!copy.empty()) {
        total += copy.top().value;
        err += copy.top().error;
        copy.pop();
      }
    }
  }
  out.value = total;
  out.error = err;
  out.converged = err <= std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total));
  return out;
}

template <class F>
auto integrate(F&& f, double a, double b, const Options& opt = {}) {
  return integrate(std::forward<F>(f), std::vector<double>{a, b}, opt);
}

// Breakpoints restricted to [a, b], with a and b included.
inline std::vector<double> panels(double a, double b, std::initializer_list<double> interior) {
  std::vector<double> pts{a, b};
  for (double x : interior)
    if (x > a && x < b && std::isfinite(x)) pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  return pts;
}

// For integrands with inverse-square-root singularities at the breakpoints:
// each panel is halved and each half mapped by x = end ∓ h·v², which turns
// an |x − end|^{-1/2} singularity into a smooth integrand in v.
template <class F>
auto integrate_sqrt_ends(F&& f, std::vector<double> pts, const Options& opt = {}) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size() < 2 ? 0 : pts.size() - 1;
  auto g = [&](double u) {
    const std::size_t i = std::min(static_cast<std::size_t>(u / 2.0), n - 1);
    const double a = pts[i], b = pts[i + 1], h = 0.5 * (b - a);
    const double r = u - 2.0 * static_cast<double>(i);
    const double v = r < 1.0 ? r : 2.0 - r;
    const double x = r < 1.0 ? a + h * v * v : b - h * v * v;
    return f(x) * (2.0 * h * v);
  };
  std::vector<double> upts;
  for (std::size_t i = 0; i <= 2 * n; ++i) upts.push_back(static_cast<double>(i));
  if (n == 0) upts.clear();
  return integrate(g, upts, opt);
}

// Like integrate() but throws NumericError when the tolerance is not met.
template <class F>
auto integrate_checked(F&& f, std::vector<double> pts, const Options& opt, const char* what) {
  auto r = integrate(std::forward<F>(f), pts, opt);
  if (!r.converged) {
    // Accept a result whose estimate is within a small factor of the goal:
    // panels at the resolution floor routinely overestimate their error.
    const double goal = std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(r.value));
    if (!(r.error <= 100.0 * goal) || !std::isfinite(detail::magnitude(r.value))) {
      std::ostringstream os;
      os << what << ": quadrature did not converge (estimate " << r.error << ", goal " << goal << ")";
      throw NumericError(os.str());
    }
  }
  return r.value;
}

}  // namespace dipolar::quad
