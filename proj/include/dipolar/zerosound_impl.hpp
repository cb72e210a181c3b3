#pragma once

#include <cmath>
#include <vector>

#include "dipolar/roots.hpp"

namespace dipolar::zs {

template <class F>
ModeSolution solve_dispersion(F&& D, const SolveOptions& opt) {
  ModeSolution sol;
  auto re = [&](double s) { return std::real(D(s)); };
  double lo = opt.s_min, hi = opt.s_max;
  const int n = std::max(opt.scan_points, 2);
  std::vector<double> grid(n), vals(n);
  for (int i = 0; i < n; ++i) {
    grid[i] = lo + (hi - lo) * i / (n - 1);
    vals[i] = re(grid[i]);
  }
  // The propagating mode is the outermost crossing with Re D increasing.
  int first = -1;
  for (int i = 0; i + 1 < n; ++i) {
    if (std::signbit(vals[i]) != std::signbit(vals[i + 1])) {
      ++sol.sign_changes;
      if (vals[i] < vals[i + 1]) first = i;
    }
  }
  double a = 0.0, b = 0.0;
  if (vals.back() < 0.0) {
    // Still below the outermost crossing: extend the window upwards.
    first = -1;
    double prev = hi;
    for (double s = 2.0 * hi; s <= opt.s_cap; s *= 2.0) {
      if (!std::signbit(re(s))) {
        a = prev;
        b = s;
        first = n;
        ++sol.sign_changes;
        sol.note = "window extended to s = " + std::to_string(s);
        break;
      }
      prev = s;
    }
  } else if (first >= 0) {
    a = grid[first];
    b = grid[first + 1];
  }
  if (first < 0) {
    sol.overdamped_flag = true;
    sol.note = "no root of Re D in the scanned window";
    return sol;
  }
  const double s0 = roots::bracketed(re, a, b, opt.tol, "dispersion");
  const double h = 1e-5 * s0;
  const double slope = (re(s0 + h) - re(s0 - h)) / (2.0 * h);
  const auto d0 = D(s0);
  sol.v0_over_vF = s0;
  sol.residual = std::abs(std::real(d0));
  sol.damping_over_qvF = slope != 0.0 ? -std::imag(d0) / slope : std::numeric_limits<double>::infinity();
  const double ratio = std::abs(sol.damping_over_qvF) / s0;
  if (!(ratio < opt.max_damping_ratio) || !(sol.damping_over_qvF >= -1e-12)) {
    sol.overdamped_flag = true;
    sol.note = "damping exceeds the small-γ regime";
    return sol;
  }
  sol.damping_over_qvF = std::max(sol.damping_over_qvF, 0.0);
  sol.converged = true;
  return sol;
}

}  // namespace dipolar::zs
