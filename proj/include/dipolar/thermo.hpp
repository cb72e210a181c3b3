#pragma once

#include "dipolar/units.hpp"

namespace dipolar::thermo {

// Noninteracting μ₀/E_F at reduced temperature t.
double mu0_reduced(Dimension d, double t);

// d/dt of mu0_reduced at fixed density, and the combination μ̃₀ − t dμ̃₀/dt
// (= ∂μ₀/∂E_F at fixed T).
double dmu0_dt(Dimension d, double t);
double mu0_thermal_factor(Dimension d, double t);

struct OccupationKernel {
  double t;
  double mu0;
  // n₀(x) for momentum x = k/k_F0; a step function at t = 0.
  double occupation(double x) const;
  // −∂n₀/∂ε = n₀(1 − n₀)/t at energy x²; zero at t = 0 (a delta function).
  double minus_dn_deps(double x) const;
  // Occupation at a given reduced energy ε (may include a self-energy shift).
  double occupation_at_energy(double e) const;
  double minus_dn_deps_at_energy(double e) const;
  // Upper momentum beyond which the occupation is below ~e^-40.
  double x_max() const;
};

// Reduced density d ∫₀^∞ x^{d−1} n₀(x) dx; equals 1 at the noninteracting μ̃₀.
double reduced_density(Dimension d, double mu, double t);

}  // namespace dipolar::thermo
