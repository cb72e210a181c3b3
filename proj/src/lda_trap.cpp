#include "dipolar/lda_trap.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

// Boost 1.74's pchip calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include "dipolar/constants.hpp"
#include "dipolar/observables.hpp"
#include "dipolar/roots.hpp"

namespace dipolar::lda {

namespace {

constexpr double kEdgeFraction = 1e-6;  // the cloud ends where n < 1e-6 n(0)
constexpr int kIntegrationPoints = 4001;

// cm^-d → m^-d
double to_si(Dimension d, double n) { return d == Dimension::Two ? n * 1e4 : n * 1e2; }

double mu_at(const PhysicalParams& gas, double n) {
  PhysicalParams p = gas;
  p.density = n;
  return obs::chemical_potential_si(p);
}

struct Cloud {
  double mu_center, r_edge, number;
};

}  // namespace

void TrapSpec::validate() const {
  if (gas.dimension == Dimension::Three) throw std::domain_error("trap profiles exist for 1D and 2D only");
  if (!(trap_frequency_hz > 0.0)) throw std::domain_error("trap frequency must be positive");
  if (!(particle_number > 0.0)) throw std::domain_error("particle number must be positive");
  if (radii < 8) throw std::domain_error("need at least 8 output radii");
}

DensityOfMu::DensityOfMu(const PhysicalParams& gas, double n_lo, double n_hi, int points) : n_lo_(n_lo), n_hi_(n_hi) {
  if (!(n_lo > 0.0 && n_hi > n_lo) || points < 4) throw std::domain_error("invalid density table range");
  std::vector<double> mu(points), ln(points);
  for (int i = 0; i < points; ++i) {
    ln[i] = std::log(n_lo) + (std::log(n_hi) - std::log(n_lo)) * i / (points - 1);
    mu[i] = mu_at(gas, std::exp(ln[i]));
    if (i > 0 && !(mu[i] > mu[i - 1])) {
      std::ostringstream os;
      os << "μ(n) is not increasing near n = " << std::exp(ln[i - 1]) << " cm^-" << dim_value(gas.dimension);
      throw std::domain_error(os.str());
    }
  }
  mu_ = mu;
  log_n_ = boost::math::interpolators::pchip<std::vector<double>>(std::move(mu), std::move(ln));
}

double DensityOfMu::density(double mu) const {
  if (mu < mu_.front()) return 0.0;
  if (mu > mu_.back()) throw std::domain_error("chemical potential above the density table");
  return std::exp(log_n_(mu));
}

TrapProfile trap_profile(const TrapSpec& spec) {
  spec.validate();
  const Dimension d = spec.gas.dimension;
  const double m = spec.gas.mass_amu * si::amu;
  const double omega = 2.0 * pi * spec.trap_frequency_hz;
  const double kT = si::k_B * spec.gas.temperature_nK * 1e-9;
  const double N = spec.particle_number;

  // Peak-density scales of the degenerate and classical ideal gas, cm^-d.
  double n_deg, n_cl;
  if (d == Dimension::Two) {
    n_deg = m * omega * std::sqrt(2.0 * N) / (2.0 * pi * si::hbar) * 1e-4;
    n_cl = kT > 0.0 ? N * m * omega * omega / (2.0 * pi * kT) * 1e-4 : n_deg;
  } else {
    n_deg = std::sqrt(2.0 * m * N * si::hbar * omega) / (pi * si::hbar) * 1e-2;
    n_cl = kT > 0.0 ? N * omega * std::sqrt(m / (2.0 * pi * kT)) * 1e-2 : n_deg;
  }
  double n_hi = 10.0 * n_deg, n_lo = 1e-7 * std::min(n_deg, n_cl);

  for (int attempt = 0; attempt < 6; ++attempt) {
    const DensityOfMu table(spec.gas, n_lo, n_hi);
    auto cloud = [&](double n_c) {
      Cloud c;
      c.mu_center = mu_at(spec.gas, n_c);
      const double mu_edge = mu_at(spec.gas, kEdgeFraction * n_c);
      c.r_edge = std::sqrt(2.0 * (c.mu_center - mu_edge) / (m * omega * omega));
      double acc = 0.0;
      const double h = c.r_edge / (kIntegrationPoints - 1);
      for (int i = 0; i < kIntegrationPoints; ++i) {
        const double r = i * h;
        const double n = i == 0 ? n_c : table.density(c.mu_center - 0.5 * m * omega * omega * r * r);
        const double w = (i == 0 || i == kIntegrationPoints - 1) ? 0.5 : 1.0;
        acc += w * to_si(d, n) * (d == Dimension::Two ? 2.0 * pi * r : 2.0);
      }
      c.number = acc * h;
      return c;
    };
    const double lo = n_lo / kEdgeFraction, hi = n_hi * (1.0 - 1e-9);
    if (!(lo < hi)) {
      n_lo /= 100.0;
      continue;
    }
    auto f = [&](double ln_c) { return std::log(cloud(std::exp(ln_c)).number / N); };
    const double f_lo = f(std::log(lo)), f_hi = f(std::log(hi));
    if (f_lo > 0.0) {
      n_lo /= 100.0;
      continue;
    }
    if (f_hi < 0.0) {
      n_hi *= 10.0;
      continue;
    }
    const double n_c = std::exp(roots::bracketed(f, std::log(lo), std::log(hi), 1e-12, "trap centre density"));
    const Cloud c = cloud(n_c);

    TrapProfile out;
    out.dimension = d;
    out.omega = omega;
    out.particle_number = c.number;
    out.mu_center = c.mu_center;
    for (int i = 0; i < spec.radii; ++i) {
      const double r = c.r_edge * i / (spec.radii - 1);
      const double n = i == 0 ? n_c : table.density(c.mu_center - 0.5 * m * omega * omega * r * r);
      PhysicalParams local = spec.gas;
      local.density = n;
      const auto k = obs::kappa_ratio(local);
      out.radius_um.push_back(r * 1e6);
      out.density.push_back(n);
      out.kappa_ratio.push_back(k.kappa_ratio);
      out.kappa_abs.push_back(k.kappa_abs);
    }
    return out;
  }
  throw NumericError("could not bracket the trap centre density");
}

std::vector<double> gaussian_reference(const TrapProfile& profile) {
  if (profile.density.empty()) throw std::domain_error("empty profile");
  const double n0 = profile.density.front();
  const double n0_um = profile.dimension == Dimension::Two ? n0 * 1e-8 : n0 * 1e-4;  // per μm^d
  // 2D: N = 2πσ²n₀; 1D: N = √(2π)σn₀.
  const double sigma2 = profile.dimension == Dimension::Two
                            ? profile.particle_number / (2.0 * pi * n0_um)
                            : std::pow(profile.particle_number / (std::sqrt(2.0 * pi) * n0_um), 2);
  std::vector<double> out;
  out.reserve(profile.radius_um.size());
  for (double r : profile.radius_um) out.push_back(n0 * std::exp(-0.5 * r * r / sigma2));
  return out;
}

HartreeLocality hartree_locality_for_length(const PhysicalParams& gas, double trap_length_nm) {
  if (!(trap_length_nm > 0.0)) throw std::domain_error("trap length must be positive");
  HartreeLocality h;
  h.interaction_length_nm = dipole_length(gas) / (2.0 * pi * pi) * 1e9;
  h.trap_length_nm = trap_length_nm;
  h.ratio = h.interaction_length_nm / trap_length_nm;
  h.negligible = h.ratio < 0.1;
  h.boundary = std::abs(h.ratio - 0.1) <= 0.005;
  return h;
}

HartreeLocality hartree_locality_check(const PhysicalParams& gas, double trap_frequency_hz) {
  if (!(trap_frequency_hz > 0.0)) throw std::domain_error("trap frequency must be positive");
  const double m = gas.mass_amu * si::amu;
  const double lt = std::sqrt(si::hbar / (m * 2.0 * pi * trap_frequency_hz));
  return hartree_locality_for_length(gas, lt * 1e9);
}

}  // namespace dipolar::lda
