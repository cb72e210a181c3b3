#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dipolar/constants.hpp"
#include "dipolar/hartree_fock.hpp"
#include "dipolar/observables.hpp"
#include "dipolar/thermo.hpp"

using namespace dipolar;
using namespace dipolar::obs;

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

PhysicalParams krb2d(double n, double t) {
  PhysicalParams p;
  p.dimension = Dimension::Two;
  p.density = n;
  p.width_nm = 10.0;
  p.temperature_nK = 0.0;
  p.temperature_nK = t * fermi_scales(p).T_F * 1e9;
  return p;
}

// κ₀/κ = dμ/dE_F from μ(n) = E_F(μ̃₀ + Σ(k_F0)), rebuilding t and λ at each density.
double inverse_ratio_oracle_2d(const PhysicalParams& p) {
  auto mu = [&](double scale) {
    PhysicalParams q = p;
    q.density *= scale;
    const auto fs = fermi_scales(q);
    ReducedState s;
    s.dimension = Dimension::Two;
    s.t = q.temperature_nK * 1e-9 / fs.T_F;
    s.mu0 = thermo::mu0_reduced(Dimension::Two, s.t);
    s.lambda = coupling_lambda(q);
    s.kfw = fs.k_F0 * q.width_nm * 1e-9;
    return fs.E_F * (s.mu0 + hf::sigma2d_iso(1.0, s).sigma);
  };
  const double h = 1e-4;
  // 2D: E_F ∝ n.
  return (mu(1.0 + h) - mu(1.0 - h)) / (2.0 * h) / fermi_scales(p).E_F;
}

}  // namespace

TEST_CASE("compressibility ratio") {
  SUBCASE("ratio and inverse are reciprocal") {
    for (auto d : {Dimension::One, Dimension::Two, Dimension::Three}) {
      const auto r = kappa_ratio(state(d, 0.2, 0.3, 0.4));
      CHECK(r.kappa_ratio * r.inv_ratio == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("3D is unaffected by the interaction") {
    const double free = kappa_ratio(state(Dimension::Three, 0.1, 0.0)).inv_ratio;
    for (double l : {0.1, 0.5}) CHECK(std::abs(kappa_ratio(state(Dimension::Three, 0.1, l)).inv_ratio - free) < 1e-10);
    CHECK(free == doctest::Approx(1.0 + pi * pi * 0.01 / 12.0).epsilon(1e-3));
    // Next Sommerfeld order: μ̃₀ = 1 − π²t²/12 − π⁴t⁴/80 gives +3π⁴t⁴/80.
    const double t = 0.05;
    CHECK(kappa_ratio(state(Dimension::Three, t, 0.2)).inv_ratio ==
          doctest::Approx(1.0 + pi * pi * t * t / 12.0 + 3.0 * std::pow(pi * t, 4) / 80.0).epsilon(2e-6));
    CHECK(kappa_ratio(state(Dimension::Three, 0.1, 0.4), KappaMethod::LowT).inv_ratio ==
          doctest::Approx(1.0 + pi * pi * 0.01 / 12.0).epsilon(1e-15));
  }
  SUBCASE("2D at zero temperature") {
    const double l = 0.05;
    const double expected = 1.0 + 64.0 / 3.0 * std::sqrt(pi) * l;
    CHECK(kappa_ratio(state(Dimension::Two, 0.0, l, 0.1), KappaMethod::LowT).inv_ratio == doctest::Approx(expected).epsilon(1e-14));
    CHECK(kappa_ratio(state(Dimension::Two, 0.0, l, 0.1)).inv_ratio == doctest::Approx(expected).epsilon(1e-9));
  }
  SUBCASE("1D noninteracting expansion") {
    CHECK(kappa_ratio(state(Dimension::One, 0.2, 0.0, 0.3), KappaMethod::LowT).inv_ratio ==
          doctest::Approx(1.0 - pi * pi * 0.04 / 12.0).epsilon(1e-14));
  }
  SUBCASE("noninteracting limit in every dimension") {
    for (auto d : {Dimension::One, Dimension::Two, Dimension::Three})
      for (double t : {0.05, 0.7})
        CHECK(kappa_ratio(state(d, t, 0.0, 0.3)).inv_ratio == doctest::Approx(thermo::mu0_thermal_factor(d, t)).epsilon(1e-15));
  }
  SUBCASE("2D chain rule against the density derivative of the chemical potential") {
    for (double t : {0.05, 0.2, 1.0}) {
      CAPTURE(t);
      const auto p = krb2d(1e9, t);
      const double oracle = inverse_ratio_oracle_2d(p);
      CHECK(kappa_ratio(p).inv_ratio == doctest::Approx(oracle).epsilon(1e-4));
      CHECK(inverse_ratio_fd(p) == doctest::Approx(oracle).epsilon(1e-6));
    }
  }
  SUBCASE("1D finite-width expansion reduces to the small-width form") {
    for (double t : {0.0, 0.05, 0.1}) {
      const auto s = state(Dimension::One, t, 0.3, 0.01, pi / 2);
      CHECK(kappa_ratio(s, KappaMethod::LowTSmallWidth).inv_ratio == doctest::Approx(kappa_ratio(s, KappaMethod::LowT).inv_ratio).epsilon(1e-2));
    }
    CHECK_THROWS_AS(kappa_ratio(state(Dimension::Two, 0.1, 0.1, 0.1), KappaMethod::LowTSmallWidth), std::domain_error);
  }
  SUBCASE("1D numeric and expansion agree at low temperature") {
    const auto s = state(Dimension::One, 0.02, 0.3, 0.5, pi / 2);
    CHECK(kappa_ratio(s).inv_ratio == doctest::Approx(kappa_ratio(s, KappaMethod::LowT).inv_ratio).epsilon(1e-5));
  }
  SUBCASE("physical compressibility") {
    const auto p = krb2d(1e9, 0.3);
    const auto r = kappa_ratio(p);
    CHECK(r.kappa_abs > 0.0);
    // κ₀ = (1/n²) dn/dE_F = d/(2 n E_F).
    const double n = 1e9 * 1e4;
    CHECK(r.kappa_abs == doctest::Approx(r.kappa_ratio / (n * fermi_scales(p).E_F)).epsilon(1e-12));
  }
}

TEST_CASE("compressibility peak in temperature") {
  SUBCASE("parabolic refinement recovers a vertex in ln t") {
    std::vector<double> t, k;
    for (int i = 0; i < 9; ++i) {
      t.push_back(std::exp(-2.0 + 0.5 * i));
      const double u = std::log(t.back()) - 0.3;
      k.push_back(2.0 - u * u);
    }
    const auto r = find_peak(t, k);
    CHECK(r.interior);
    CHECK(r.t_peak == doctest::Approx(std::exp(0.3)).epsilon(1e-12));
    CHECK(r.kappa_peak == doctest::Approx(2.0).epsilon(1e-12));
    std::vector<double> mono(k.size());
    for (std::size_t i = 0; i < mono.size(); ++i) mono[i] = static_cast<double>(i);
    CHECK_FALSE(find_peak(t, mono).interior);
  }
  std::vector<double> T;
  for (int i = 0; i < 30; ++i) T.push_back(std::pow(10.0, 0.5 + 2.5 * i / 29.0));
  SUBCASE("2D KRb at 1e9 cm^-2 has an interior maximum") {
    const auto r = kappa_vs_T_peak(krb2d(1e9, 0.0), T);
    CHECK(r.interior);
    CHECK(r.t_peak > 0.0);
  }
  SUBCASE("noninteracting 2D is monotone") {
    auto p = krb2d(1e9, 0.0);
    p.dipole_debye = 0.0;
    CHECK_FALSE(kappa_vs_T_peak(p, T).interior);
  }
  SUBCASE("noninteracting 1D has a maximum") {
    PhysicalParams p;
    p.dimension = Dimension::One;
    p.density = 1e4;
    p.dipole_debye = 0.0;
    std::vector<double> T1;
    const double TF = fermi_scales(p).T_F * 1e9;
    for (int i = 0; i < 30; ++i) T1.push_back(TF * std::pow(10.0, -1.5 + 2.5 * i / 29.0));
    CHECK(kappa_vs_T_peak(p, T1).interior);
  }
}

TEST_CASE("effective masses") {
  SUBCASE("bare mass without interaction") {
    for (auto d : {Dimension::One, Dimension::Two, Dimension::Three}) {
      const auto m = effective_mass(1.0, 0.3, state(d, 0.1, 0.0, 0.3));
      CHECK(m.m_over_mstar_radial == 1.0);
    }
  }
  SUBCASE("3D: lighter at the equator, heavier at the poles") {
    const auto s = state(Dimension::Three, 0.01, 0.1);
    CHECK(effective_mass(1.0, pi / 2, s).m_over_mstar_radial > 1.0);
    CHECK(effective_mass(1.0, 0.0, s).m_over_mstar_radial < 1.0);
  }
  SUBCASE("3D radial mass from the momentum derivative") {
    const auto s = state(Dimension::Three, 0.1, 0.2);
    const double h = 1e-4;
    for (double th : {0.0, 0.6}) {
      const double fd = (hf::sigma3d(1.0 + h, th, s).sigma - hf::sigma3d(1.0 - h, th, s).sigma) / (2.0 * h);
      CHECK(effective_mass(1.0, th, s).m_over_mstar_radial == doctest::Approx(1.0 + fd / 2.0).epsilon(1e-7));
      const double fdth = (hf::sigma3d(1.0, th + h, s).sigma - hf::sigma3d(1.0, th - h, s).sigma) / (2.0 * h);
      CHECK(effective_mass(1.0, th, s).m_over_mstar_angular == doctest::Approx(fdth / 2.0).epsilon(1e-6));
    }
  }
  SUBCASE("2D at zero temperature") {
    const double l = 0.05;
    const auto s = state(Dimension::Two, 0.0, l, 0.1);
    const double expected = 1.0 + 16.0 * std::sqrt(pi) * l * (2.0 / 3.0) / 2.0;
    CHECK(effective_mass(1.0, 0.0, s, KappaMethod::LowT).m_over_mstar_radial == doctest::Approx(expected).epsilon(1e-14));
    CHECK(effective_mass(1.0, 0.0, s).m_over_mstar_radial == doctest::Approx(expected).epsilon(1e-9));
  }
  SUBCASE("expansions only on the Fermi surface") {
    CHECK_THROWS_AS(effective_mass(0.9, 0.0, state(Dimension::Two, 0.1, 0.1, 0.1), KappaMethod::LowT), std::domain_error);
    CHECK_THROWS_AS(effective_mass(0.0, 0.0, state(Dimension::Two, 0.1, 0.1, 0.1)), std::domain_error);
  }
}

TEST_CASE("3D stability line") {
  SUBCASE("zero temperature") {
    const auto l = stability_line_3d(0.0);
    REQUIRE(l.has_value());
    CHECK(*l == doctest::Approx(1.0 / pi).epsilon(1e-2));
    // The variational bound 0.32 is close by.
    CHECK(std::abs(*l - 0.32) < 0.01);
  }
  SUBCASE("the pole mass changes sign at the critical coupling") {
    for (double t : {0.05, 0.3}) {
      const auto l = stability_line_3d(t);
      REQUIRE(l.has_value());
      CHECK(std::abs(effective_mass(1.0, 0.0, state(Dimension::Three, t, *l)).m_over_mstar_radial) < 1e-9);
      CHECK(effective_mass(1.0, 0.0, state(Dimension::Three, t, 0.9 * *l)).m_over_mstar_radial > 0.0);
      CHECK(effective_mass(1.0, 0.0, state(Dimension::Three, t, 1.1 * *l)).m_over_mstar_radial < 0.0);
    }
  }
  SUBCASE("monotone in temperature") {
    double prev = *stability_line_3d(0.0);
    for (int i = 1; i <= 16; ++i) {
      const auto l = stability_line_3d(0.025 * i);
      REQUIRE(l.has_value());
      CHECK(*l > prev);
      prev = *l;
    }
  }
}

TEST_CASE("2D Coulomb comparison") {
  CHECK(coulomb_kappa_ratio_2d(0.0, 0.4) == 1.0);
  CHECK(coulomb_kappa_ratio_2d(1.0, 1.0) == doctest::Approx(1.0 + (-1.0 + 0.13) / pi).epsilon(1e-15));
  CHECK(coulomb_kappa_ratio_2d(2.0, 0.0) == doctest::Approx(1.0 - 2.0 / pi).epsilon(1e-15));
  SUBCASE("stationary point") {
    const double ts = coulomb_extremum_t();
    CHECK(std::abs(0.26 * ts + pi * pi / 32.0 * (2.0 * ts * std::log(ts) + ts)) < 1e-15);
    double best = 0.0, best_v = 1e300;
    for (int i = 1; i < 100000; ++i) {
      const double t = 1e-5 * i;
      const double v = coulomb_kappa_ratio_2d(1.0, t);
      if (v < best_v) best_v = v, best = t;
    }
    CHECK(best == doctest::Approx(ts).epsilon(1e-4));
  }
  CHECK_THROWS_AS(coulomb_kappa_ratio_2d(-1.0, 0.1), std::domain_error);
}
