#include "dipolar/thermo.hpp"

#include <cmath>
#include <stdexcept>

#include "dipolar/quadrature.hpp"
#include "dipolar/roots.hpp"
#include "dipolar/specfun.hpp"

namespace dipolar::thermo {

namespace {

void check_t(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::domain_error("temperature must be finite and non-negative");
}

// ∂(reduced density)/∂μ at fixed t.
double density_mu_derivative(Dimension d, double mu, double t) {
  const double eta = mu / t;
  switch (d) {
    case Dimension::Two: return 1.0 / (1.0 + std::exp(-eta));
    case Dimension::Three:
      return std::tgamma(2.5) * std::sqrt(t) * -specfun::polylog_negexp(0.5, eta);
    case Dimension::One: {
      const OccupationKernel k{t, mu};
      const double edge = std::sqrt(std::max(mu, 0.0));
      const double width = t / std::max(edge, std::sqrt(t));
      auto f = [&k](double x) { return k.minus_dn_deps(x); };
      quad::Options opt{1e-13, 1e-300, 2000};
      return quad::integrate_checked(
          f, quad::panels(0.0, k.x_max(), {edge - 10 * width, edge, edge + 10 * width}), opt,
          "density derivative");
    }
  }
  return 0.0;
}

}  // namespace

double reduced_density(Dimension d, double mu, double t) {
  check_t(t);
  const double half = 0.5 * dim_value(d);
  if (t == 0.0) return mu > 0.0 ? std::pow(mu, half) : 0.0;
  const double eta = mu / t;
  if (d == Dimension::Two) {
    const double ln1pe = eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
    return t * ln1pe;
  }
  return std::tgamma(half + 1.0) * std::pow(t, half) * -specfun::polylog_negexp(half, eta);
}

double mu0_reduced(Dimension d, double t) {
  check_t(t);
  if (t == 0.0) return 1.0;
  if (d == Dimension::Two) {
    return t < 1.0 ? 1.0 + t * std::log1p(-std::exp(-1.0 / t)) : t * std::log(std::expm1(1.0 / t));
  }
  auto f = [d, t](double mu) { return reduced_density(d, mu, t) - 1.0; };
  auto [lo, hi] = roots::expand_bracket(f, -50.0 * t, 2.0, 60, "mu0 bracket");
  return roots::bracketed(f, lo, hi, 1e-14 * std::max(1.0, std::abs(hi - lo)), "mu0");
}

double mu0_thermal_factor(Dimension d, double t) {
  check_t(t);
  if (t == 0.0) return 1.0;
  const double mu = mu0_reduced(d, t);
  return 0.5 * dim_value(d) / density_mu_derivative(d, mu, t);
}

double dmu0_dt(Dimension d, double t) {
  check_t(t);
  if (t == 0.0) return 0.0;
  return (mu0_reduced(d, t) - mu0_thermal_factor(d, t)) / t;
}

double OccupationKernel::occupation_at_energy(double e) const {
  if (t == 0.0) return e < mu0 ? 1.0 : (e > mu0 ? 0.0 : 0.5);
  const double z = (e - mu0) / t;
  if (z > 0.0) {
    const double q = std::exp(-z);
    return q / (1.0 + q);
  }
  return 1.0 / (1.0 + std::exp(z));
}

double OccupationKernel::minus_dn_deps_at_energy(double e) const {
  if (t == 0.0) return 0.0;
  const double q = std::exp(-std::abs((e - mu0) / t));
  return q / (t * (1.0 + q) * (1.0 + q));
}

double OccupationKernel::occupation(double x) const { return occupation_at_energy(x * x); }
double OccupationKernel::minus_dn_deps(double x) const { return minus_dn_deps_at_energy(x * x); }

double OccupationKernel::x_max() const { return std::sqrt(std::max(mu0, 0.0) + 40.0 * t); }

}  // namespace dipolar::thermo
