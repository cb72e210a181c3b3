#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "dipolar/constants.hpp"
#include "dipolar/units.hpp"

using namespace dipolar;

namespace {

PhysicalParams krb(Dimension d, double n) {
  PhysicalParams p;
  p.dimension = d;
  p.density = n;
  return p;
}

// Least-squares slope of ln y against ln x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("Fermi temperature of the 2D KRb gas") {
  CHECK(fermi_scales(krb(Dimension::Two, 1e8)).T_F * 1e9 == doctest::Approx(24.0).epsilon(0.05));
  CHECK(fermi_scales(krb(Dimension::Two, 1e9)).T_F * 1e9 == doctest::Approx(240.0).epsilon(0.05));
}

TEST_CASE("Fermi scales follow the one-component definitions") {
  const double m = 127.0 * si::amu;
  for (auto [d, n, kf] : {std::tuple{Dimension::Three, 1e12, std::cbrt(6.0 * pi * pi * 1e18)},
                          std::tuple{Dimension::Two, 1e9, std::sqrt(4.0 * pi * 1e13)},
                          std::tuple{Dimension::One, 1e4, pi * 1e6}}) {
    const auto fs = fermi_scales(krb(d, n));
    CHECK(fs.k_F0 == doctest::Approx(kf).epsilon(1e-13));
    CHECK(fs.E_F == doctest::Approx(si::hbar * si::hbar * kf * kf / (2.0 * m)).epsilon(1e-13));
    CHECK(fs.T_F == doctest::Approx(fs.E_F / si::k_B).epsilon(1e-13));
    CHECK(fs.v_F0 == doctest::Approx(si::hbar * kf / m).epsilon(1e-13));
  }
  CHECK(fermi_scales(krb(Dimension::Two, 4e9)).k_F0 ==
        doctest::Approx(2.0 * fermi_scales(krb(Dimension::Two, 1e9)).k_F0).epsilon(1e-14));
}

TEST_CASE("coupling constants") {
  SUBCASE("3D KRb at 1e12 cm^-3 is of order 0.1") {
    CHECK(coupling_lambda(krb(Dimension::Three, 1e12)) == doctest::Approx(0.1).epsilon(0.3));
  }
  SUBCASE("2D value from the closed form") {
    const auto p = krb(Dimension::Two, 1e8);
    const double d2 = std::pow(0.57 * si::debye, 2) / (4.0 * pi * si::eps0);
    const double m = 127.0 * si::amu;
    const double kf = std::sqrt(4.0 * pi * 1e12);
    const double expected = m * d2 * kf / (4.0 * std::pow(pi, 1.5) * si::hbar * si::hbar);
    CHECK(coupling_lambda(p) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected > 0.01);
    CHECK(expected < 1.0);
  }
  SUBCASE("zero dipole") {
    auto p = krb(Dimension::Two, 1e9);
    p.dipole_debye = 0.0;
    CHECK(coupling_lambda(p) == 0.0);
  }
  SUBCASE("power laws over three decades") {
    const std::pair<Dimension, double> cases[] = {
        {Dimension::Three, 1.0 / 3.0}, {Dimension::Two, 0.5}, {Dimension::One, 1.0}};
    for (auto [d, expo] : cases) {
      std::vector<double> n, l;
      for (int i = 0; i <= 30; ++i) {
        n.push_back(std::pow(10.0, 3.0 * i / 30.0) * (d == Dimension::Three ? 1e10 : d == Dimension::Two ? 1e7 : 1e3));
        l.push_back(coupling_lambda(krb(d, n.back())));
        if (i > 0) CHECK(l[i] > l[i - 1]);
      }
      CHECK(std::abs(loglog_slope(n, l) - expo) < 1e-6);
    }
  }
}

TEST_CASE("reduce") {
  auto p = krb(Dimension::Two, 1e9);
  p.width_nm = 10.0;
  SUBCASE("T = T_F gives t = 1") {
    p.temperature_nK = fermi_scales(p).T_F * 1e9;
    CHECK(reduce(p).t == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("kfw") {
    CHECK(reduce(p).kfw == doctest::Approx(std::sqrt(4.0 * pi * 1e13) * 1e-8).epsilon(1e-12));
  }
  SUBCASE("zero temperature") {
    const auto s = reduce(p);
    CHECK(s.t == 0.0);
    CHECK(s.mu0 == 1.0);
  }
  SUBCASE("round trip of t and lambda") {
    p.temperature_nK = 37.0;
    const auto s = reduce(p);
    CHECK(s.t == doctest::Approx(37e-9 / fermi_scales(p).T_F).epsilon(1e-12));
    CHECK(s.lambda == doctest::Approx(coupling_lambda(p)).epsilon(1e-12));
  }
  SUBCASE("bit-identical on repeat") {
    p.temperature_nK = 12.5;
    const auto a = reduce(p), b = reduce(p);
    CHECK(a.t == b.t);
    CHECK(a.lambda == b.lambda);
    CHECK(a.mu0 == b.mu0);
    CHECK(a.kfw == b.kfw);
  }
}

TEST_CASE("input validation") {
  auto p = krb(Dimension::Two, 1e9);
  p.density = 0.0;
  CHECK_THROWS_AS(p.validate(), std::domain_error);
  CHECK_THROWS_AS(fermi_scales(p), std::domain_error);
  p.density = 1e9;
  p.temperature_nK = -1.0;
  CHECK_THROWS_AS(p.validate(), std::domain_error);
  p.temperature_nK = 0.0;
  p.width_nm = 0.0;
  CHECK_THROWS_AS(p.validate(), std::domain_error);
  CHECK_THROWS_AS(dimension_from_int(4), std::domain_error);
}
