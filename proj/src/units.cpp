#include "dipolar/units.hpp"

#include <cmath>
#include <stdexcept>

#include "dipolar/constants.hpp"
#include "dipolar/thermo.hpp"

namespace dipolar {

Dimension dimension_from_int(int d) {
  if (d < 1 || d > 3) throw std::domain_error("dimension must be 1, 2 or 3");
  return static_cast<Dimension>(d);
}

void PhysicalParams::validate() const {
  if (!(mass_amu > 0.0)) throw std::domain_error("mass must be positive");
  if (!(dipole_debye >= 0.0)) throw std::domain_error("dipole moment must be non-negative");
  if (!(density > 0.0)) throw std::domain_error("density must be positive");
  if (!(temperature_nK >= 0.0)) throw std::domain_error("temperature must be non-negative");
  if (dimension != Dimension::Three && !(width_nm > 0.0))
    throw std::domain_error("transverse width must be positive below three dimensions");
}

double density_si(const PhysicalParams& p) {
  return p.density * std::pow(100.0, dim_value(p.dimension));
}

double fermi_k(Dimension d, double n) {
  if (!(n > 0.0)) throw std::domain_error("density must be positive");
  switch (d) {
    case Dimension::Three: return std::cbrt(6.0 * pi * pi * n);
    case Dimension::Two: return std::sqrt(4.0 * pi * n);
    case Dimension::One: return pi * n;
  }
  return 0.0;
}

FermiScales fermi_scales(const PhysicalParams& p) {
  p.validate();
  const double m = p.mass_amu * si::amu;
  const double k = fermi_k(p.dimension, density_si(p));
  const double ef = si::hbar * si::hbar * k * k / (2.0 * m);
  return {k, ef, ef / si::k_B, si::hbar * k / m};
}

double dipole_length(const PhysicalParams& p) {
  const double m = p.mass_amu * si::amu;
  const double d = p.dipole_debye * si::debye;
  return m * d * d / (4.0 * pi * si::eps0 * si::hbar * si::hbar);
}

double coupling_from_kf(Dimension d, double a, double k) {
  switch (d) {
    case Dimension::Three: return a * k / (3.0 * pi * pi);
    case Dimension::Two: return a * k / (4.0 * std::pow(pi, 1.5));
    case Dimension::One: return 2.0 * a * k / (pi * pi * pi);
  }
  return 0.0;
}

double coupling_lambda(const PhysicalParams& p) {
  const auto fs = fermi_scales(p);
  return coupling_from_kf(p.dimension, dipole_length(p), fs.k_F0);
}

ReducedState reduce(const PhysicalParams& p) {
  const auto fs = fermi_scales(p);
  ReducedState s;
  s.dimension = p.dimension;
  s.t = p.temperature_nK * 1e-9 / fs.T_F;
  s.lambda = coupling_from_kf(p.dimension, dipole_length(p), fs.k_F0);
  s.mu0 = thermo::mu0_reduced(p.dimension, s.t);
  s.kfw = p.dimension == Dimension::Three ? 0.0 : fs.k_F0 * p.width_nm * 1e-9;
  s.theta_E = p.theta_E;
  s.theta_q = p.theta_q;
  s.phi_q = p.phi_q;
  return s;
}

}  // namespace dipolar
