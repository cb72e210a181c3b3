#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dipolar/constants.hpp"
#include "dipolar/potentials.hpp"
#include "dipolar/thermo.hpp"
#include "dipolar/zerosound.hpp"

using namespace dipolar;
using namespace dipolar::zs;
using boost::math::quadrature::gauss_kronrod;

namespace {

ReducedState state(Dimension d, double t, double lambda, double kfw = 0.0, double theta_E = 0.0) {
  ReducedState s;
  s.dimension = d;
  s.t = t;
  s.lambda = lambda;
  s.mu0 = thermo::mu0_reduced(d, t);
  s.kfw = kfw;
  s.theta_E = theta_E;
  return s;
}

ReducedState from_physical(const PhysicalParams& p) { return reduce(p); }

// ∂n/∂ε at reduced energy e.
double dn_de(double e, double mu, double t) {
  const double q = std::exp(-std::abs((e - mu) / t));
  return -q / (t * (1.0 + q) * (1.0 + q));
}

double gk(const std::function<double(double)>& f, double a, double b) {
  return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-12);
}

// χ = ∫ dk_x g(k_x)[1 − s/(s − k_x − i0)] = ∫ h/(s − k_x − i0) with h = −k_x g, where g is
// ∂n/∂ε projected on the q axis. The principal value is taken by subtracting h(s).
std::complex<double> chi_cartesian(const std::function<double(double)>& g, double s, double X) {
  auto h = [&](double k) { return -k * g(k); };
  const double hs = h(s);
  auto sub = [&](double k) { return (h(k) - hs) / (s - k); };
  const double re = gk(sub, -X, s) + gk(sub, s, X) + hs * std::log((s + X) / (X - s));
  return {re, pi * hs};
}

// 2D: g(k_x) = (1/(2π)²) ∫ dk_y ∂n/∂ε, with no polar coordinates involved.
std::complex<double> chi2d_oracle(double s, const ReducedState& st) {
  const double X = std::sqrt(st.mu0 + 40.0 * st.t);
  auto g = [&](double kx) {
    const double Y2 = X * X - kx * kx;
    if (Y2 <= 0.0) return 0.0;
    auto f = [&](double ky) { return dn_de(kx * kx + ky * ky, st.mu0, st.t); };
    return 2.0 * gk(f, 0.0, std::sqrt(Y2)) / (4.0 * pi * pi);
  };
  return chi_cartesian(g, s, X);
}

std::complex<double> chi1d_oracle(double s, const ReducedState& st) {
  const double X = std::sqrt(st.mu0 + 40.0 * st.t);
  auto g = [&](double k) { return dn_de(k * k, st.mu0, st.t) / (2.0 * pi); };
  return chi_cartesian(g, s, X);
}

// Free-gas block below the thermal support, angular integrals in closed form.
Chi3dBlock chi3d_free_oracle(double s, const ReducedState& st) {
  const double X = std::min(std::sqrt(st.mu0 + 40.0 * st.t), s - 1e-9);
  auto radial = [&](auto angular) {
    auto f = [&](double x) {
      if (x == 0.0) return 0.0;
      return x * x * dn_de(x * x, st.mu0, st.t) * angular(x) / (4.0 * pi * pi);
    };
    return gk(f, 0.0, X);
  };
  auto L = [s](double x) { return std::log((s + x) / (s - x)); };
  Chi3dBlock c;
  // ∫dc (1 − s/(s − xc)), ∫dc c(…), ∫dc c²(…) over c ∈ [−1, 1].
  c.chi00_00 = radial([&](double x) { return (2.0 - s / x * L(x)) / (4.0 * pi); });
  c.chi10_00 = radial([&](double x) { return -std::sqrt(3.0) * s / x * (s / x * L(x) - 2.0) / (4.0 * pi); });
  c.chi11_00 = radial([&](double x) { return 3.0 * (2.0 / 3.0 - s * s / (x * x) * (s / x * L(x) - 2.0)) / (4.0 * pi); });
  return c;
}

PhysicalParams krb(Dimension d, double n, double T_nK, double w_nm = 10.0, double theta_E = 0.0) {
  PhysicalParams p;
  p.dimension = d;
  p.density = n;
  p.temperature_nK = T_nK;
  p.width_nm = w_nm;
  p.theta_E = theta_E;
  return p;
}

double at_t(PhysicalParams p, double t) {
  p.temperature_nK = 0.0;
  return t * fermi_scales(p).T_F * 1e9;
}

}  // namespace

TEST_CASE("2D response") {
  SUBCASE("Cartesian quadrature oracle") {
    for (double s : {0.6, 1.2, 1.6}) {
      CAPTURE(s);
      const auto st = state(Dimension::Two, 0.1, 0.1, 0.1);
      const auto c = chi2d(s, st), o = chi2d_oracle(s, st);
      CHECK(c.real() == doctest::Approx(o.real()).epsilon(1e-7));
      CHECK(c.imag() == doctest::Approx(o.imag()).epsilon(1e-7));
    }
  }
  SUBCASE("no damping outside the continuum at low temperature") {
    CHECK(std::abs(chi2d(1.5, state(Dimension::Two, 1e-3, 0.1, 0.1)).imag()) < 1e-14);
  }
  SUBCASE("1/s² decay with the f-sum coefficient") {
    // 1 − s/√(s² − x²) → −x²/2s², and ∫x³(−∂n/∂ε)dx = 1/2 in 2D.
    for (double t : {0.05, 1.0}) CHECK(1e6 * chi2d(1e3, state(Dimension::Two, t, 0.1, 0.1)).real() == doctest::Approx(1.0 / (8.0 * pi)).epsilon(1e-5));
  }
  SUBCASE("sign of the imaginary part") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> us(0.1, 2.0), ut(0.02, 1.0);
    for (int i = 0; i < 20; ++i) {
      const double s = us(rng), t = ut(rng);
      CHECK(chi2d(s, state(Dimension::Two, t, 0.1, 0.1)).imag() >= 0.0);
    }
  }
  SUBCASE("interaction at zero momentum") {
    const auto st = state(Dimension::Two, 0.1, 0.2, 0.15);
    CHECK(v2d_zero(st) == doctest::Approx(potentials::v2d_q(0.0, 0.15, 0.0, 0.0, 0.2)).epsilon(1e-15));
  }
}

TEST_CASE("2D zero sound") {
  const auto base = krb(Dimension::Two, 1e9, 0.0);
  SUBCASE("strong-coupling limit at low temperature") {
    const auto st = from_physical(krb(Dimension::Two, 1e9, at_t(base, 1e-3)));
    const auto m = solve_zerosound_2d(st);
    REQUIRE(m.converged);
    CHECK(m.v0_over_vF == doctest::Approx(zerosound_2d_limit(base)).epsilon(2e-2));
    CHECK(m.residual < 1e-10);
    CHECK(m.sign_changes == 1);
    CHECK(m.v0_over_vF > 1.0);
    CHECK(m.damping_over_qvF >= 0.0);
    // The root satisfies 1 − V(0)χ = 0.
    CHECK(std::abs(1.0 - v2d_zero(st) * chi2d(m.v0_over_vF, st).real()) < 1e-9);
  }
  SUBCASE("still propagating at the Fermi temperature") {
    const auto m = solve_zerosound_2d(from_physical(krb(Dimension::Two, 1e9, at_t(base, 1.0))));
    CHECK(m.converged);
    CHECK(m.v0_over_vF > 1.0);
    CHECK(m.damping_over_qvF >= 0.0);
  }
  SUBCASE("no mode without interaction") {
    const auto m = solve_zerosound_2d(state(Dimension::Two, 0.1, 0.0, 0.1));
    CHECK_FALSE(m.converged);
    CHECK(m.overdamped_flag);
  }
}

TEST_CASE("1D response") {
  SUBCASE("Cartesian quadrature oracle") {
    for (double s : {0.5, 1.3}) {
      const auto st = state(Dimension::One, 0.1, 0.1, 0.1, pi / 2);
      const auto c = chi1d(s, st), o = chi1d_oracle(s, st);
      CHECK(c.real() == doctest::Approx(o.real()).epsilon(1e-7));
      CHECK(c.imag() == doctest::Approx(o.imag()).epsilon(1e-7));
    }
  }
  SUBCASE("sign of the imaginary part") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> us(0.1, 2.0), ut(0.02, 1.0);
    for (int i = 0; i < 20; ++i) CHECK(chi1d(us(rng), state(Dimension::One, ut(rng), 0.1, 0.1, pi / 2)).imag() >= 0.0);
  }
  SUBCASE("interaction at zero momentum") {
    const auto st = state(Dimension::One, 0.1, 0.2, 0.15, pi / 2);
    CHECK(v1d_zero(st) == doctest::Approx(potentials::v1d_q(0.0, 0.15, pi / 2, 0.2)).epsilon(1e-15));
  }
}

TEST_CASE("1D zero sound") {
  SUBCASE("strong-coupling limit at low temperature") {
    const auto base = krb(Dimension::One, 1e4, 0.0, 10.0, pi / 2);
    auto p = base;
    p.temperature_nK = at_t(base, 1e-3);
    const auto m = solve_zerosound_1d(reduce(p));
    REQUIRE(m.converged);
    CHECK(m.v0_over_vF == doctest::Approx(zerosound_1d_limit(base)).epsilon(1e-2));
    CHECK(m.damping_over_qvF >= 0.0);
  }
  SUBCASE("speed falls toward the Fermi velocity at high density") {
    double prev = 1e300;
    for (double n : {1e4, 1e5, 1e6, 3e6}) {
      auto p = krb(Dimension::One, n, 0.0, 10.0, pi / 2);
      p.temperature_nK = at_t(p, 0.05);
      const auto m = solve_zerosound_1d(reduce(p));
      REQUIRE(m.converged);
      CHECK(m.v0_over_vF > 1.0);
      CHECK(m.v0_over_vF < prev);
      prev = m.v0_over_vF;
    }
    CHECK(prev < 1.2);
  }
  SUBCASE("no mode without interaction") {
    CHECK_FALSE(solve_zerosound_1d(state(Dimension::One, 0.1, 0.0, 0.1, pi / 2)).converged);
  }
}

TEST_CASE("3D quasiparticle interaction") {
  const auto f = landau_params(1.0 / (pi * pi), 0.0);
  CHECK(f.f00_0 == doctest::Approx(64.0 * pi * pi).epsilon(1e-15));
  CHECK(f.f11_0 / f.f00_0 == doctest::Approx(0.3).epsilon(1e-15));
  const auto tilted = landau_params(0.2, 1.0);
  CHECK(tilted.f11_0 / tilted.f00_0 == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(landau_params(0.0, 0.4).f00_0 == 0.0);
  CHECK(landau_params(0.0, 0.4).f11_0 == 0.0);
}

TEST_CASE("3D response of the free gas") {
  SUBCASE("zero-temperature Lindhard values") {
    const double s = 1.5, L = std::log((s + 1.0) / (s - 1.0));
    const auto c = chi3d_block(0.3, s, state(Dimension::Three, 1e-3, 0.0));
    CHECK(c.chi00_00.real() == doctest::Approx((s * L - 2.0) / (32.0 * pi * pi * pi)).epsilon(1e-4));
    CHECK(c.chi00_00.imag() == 0.0);
    CHECK(c.chi10_00.imag() == 0.0);
    CHECK(c.chi11_00.imag() == 0.0);
  }
  SUBCASE("finite temperature against closed-form angular integrals") {
    for (double s : {1.8, 2.5}) {
      const auto st = state(Dimension::Three, 0.05, 0.0);
      const auto c = chi3d_block(0.7, s, st);
      const auto o = chi3d_free_oracle(s, st);
      CHECK(c.chi00_00.real() == doctest::Approx(o.chi00_00.real()).epsilon(1e-5));
      CHECK(c.chi10_00.real() == doctest::Approx(o.chi10_00.real()).epsilon(1e-5));
      CHECK(c.chi11_00.real() == doctest::Approx(o.chi11_00.real()).epsilon(1e-5));
    }
  }
}

TEST_CASE("3D zero sound") {
  const double l = 1.0 / (pi * pi);
  SUBCASE("propagates along the dipole axis at low temperature") {
    const auto m = solve_zerosound_3d(0.0, state(Dimension::Three, 0.01, l));
    REQUIRE(m.converged);
    CHECK(m.v0_over_vF > 1.0);
    CHECK(m.residual < 1e-10);
    CHECK(m.damping_over_qvF >= 0.0);
  }
  SUBCASE("no mode perpendicular to the dipoles") {
    CHECK_FALSE(solve_zerosound_3d(pi / 2, state(Dimension::Three, 0.01, l)).converged);
  }
  SUBCASE("no mode above the temperature ceiling") {
    CHECK_FALSE(solve_zerosound_3d(0.0, state(Dimension::Three, 0.25, l)).converged);
  }
}
