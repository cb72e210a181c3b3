#include "dipolar/observables.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "dipolar/constants.hpp"
#include "dipolar/hartree_fock.hpp"
#include "dipolar/specfun.hpp"
#include "dipolar/thermo.hpp"

namespace dipolar::obs {

namespace {

using Gauss8 = boost::math::quadrature::gauss<double, 8>;

// Fermi-surface average over cos θ_k ∈ [−1, 1] of f(θ_k), normalised.
template <class F>
double polar_average(F&& f) {
  return 0.5 * Gauss8::integrate([&](double c) { return f(std::acos(c)); }, -1.0, 1.0);
}

// ∂I/∂μ̃₀ of the 3D radial integral; only ever multiplied by ⟨P₂⟩ = 0, so a
// central difference is ample.
double radial3d_dmu(const ReducedState& s) {
  if (s.t == 0.0) return hf::kernel3d(1.0) * 0.5;  // δ(x² − 1) → K3(1)/2
  const double h = 1e-5 * std::max(1.0, std::abs(s.mu0));
  return (hf::radial3d(1.0, s.t, s.mu0 + h) - hf::radial3d(1.0, s.t, s.mu0 - h)) / (2.0 * h);
}

double one_d_lowt_inverse(const ReducedState& s, KappaMethod m) {
  const double t2 = s.t * s.t;
  const double p2 = legendre_p2(std::cos(s.theta_E));
  const double pre = 0.25 * pi * pi * s.lambda * p2;
  const double g = kSpecialConstants.euler_gamma;
  const double base = 1.0 - pi * pi * t2 / 12.0;
  if (m == KappaMethod::LowTSmallWidth) {
    const double L = 2.0 * std::log(2.0 * s.kfw);
    return base + pre * (8.0 * (g + L) - (g - 1.0 + L) * pi * pi * t2 / 6.0);
  }
  const double x = 4.0 * s.kfw * s.kfw;
  const double e0 = specfun::gamma_upper_scaled(0, x);
  const double e1 = specfun::gamma_upper_scaled(-1, x);
  const double ga = specfun::meijer_g(specfun::MeijerVariant::A, x);
  const double gb = specfun::meijer_g(specfun::MeijerVariant::B, x);
  const double bracket = -1.0 - e0 * (3.0 + x + 2.0 * x * x) + 2.0 * x * (1.0 + e1) + 6.0 * ga - 4.0 * x * gb;
  return base - pre * (8.0 * e0 - pi * pi * t2 / 6.0 * bracket);
}

}  // namespace

std::string to_string(KappaMethod m) {
  switch (m) {
    case KappaMethod::Numeric: return "numeric";
    case KappaMethod::LowT: return "lowT";
    case KappaMethod::LowTSmallWidth: return "lowT-small-width";
  }
  return "?";
}

double interacting_mu_reduced(const ReducedState& s) {
  double sigma = 0.0;
  if (s.lambda != 0.0) {
    switch (s.dimension) {
      case Dimension::Three:
        sigma = polar_average([&](double th) { return hf::sigma3d(1.0, th, s).sigma; });
        break;
      case Dimension::Two: sigma = hf::sigma2d_iso(1.0, s).sigma; break;
      case Dimension::One: sigma = hf::sigma1d_numeric(1.0, s); break;
    }
  }
  return s.mu0 + sigma;
}

double chemical_potential_si(const PhysicalParams& p) {
  return fermi_scales(p).E_F * interacting_mu_reduced(reduce(p));
}

double density_derivative_term(const ReducedState& s, KappaMethod m) {
  if (s.lambda == 0.0) return 0.0;
  const double thermal = thermo::mu0_thermal_factor(s.dimension, s.t);
  switch (s.dimension) {
    case Dimension::Three: {
      if (m != KappaMethod::Numeric) return 0.0;
      const double radial = pi * s.lambda * hf::radial3d_dk(1.0, s.t, s.mu0) +
                            thermal * 2.0 * pi * s.lambda * radial3d_dmu(s);
      return radial * polar_average([](double th) { return legendre_p2(std::cos(th)); });
    }
    case Dimension::Two:
      return *hf::dsigma2d_iso_dn(s, m == KappaMethod::Numeric ? hf::Method::Numeric : hf::Method::LowT).dsigma_dn;
    case Dimension::One:
      if (m != KappaMethod::Numeric) return one_d_lowt_inverse(s, m) - (1.0 - pi * pi * s.t * s.t / 12.0);
      return 0.5 * hf::dsigma1d_dk_numeric(1.0, s) + thermal * hf::dsigma1d_dmu(s);
  }
  return 0.0;
}

KappaResult kappa_ratio(const ReducedState& s, KappaMethod m) {
  if (m == KappaMethod::LowTSmallWidth && s.dimension != Dimension::One)
    throw std::domain_error("the small-width expansion exists only in 1D");
  double inv = 0.0;
  if (m == KappaMethod::Numeric) {
    inv = thermo::mu0_thermal_factor(s.dimension, s.t) + density_derivative_term(s, m);
  } else {
    switch (s.dimension) {
      case Dimension::Three: inv = 1.0 + pi * pi * s.t * s.t / 12.0; break;
      case Dimension::Two: inv = 1.0 + density_derivative_term(s, m); break;
      case Dimension::One: inv = one_d_lowt_inverse(s, m); break;
    }
  }
  KappaResult r;
  r.inv_ratio = inv;
  r.kappa_ratio = 1.0 / inv;
  r.kappa_abs = r.kappa_ratio;
  r.method = m;
  return r;
}

KappaResult kappa_ratio(const PhysicalParams& p, KappaMethod m) {
  auto r = kappa_ratio(reduce(p), m);
  const double n = density_si(p);
  const double kappa0 = 0.5 * dim_value(p.dimension) / (n * fermi_scales(p).E_F);
  r.kappa_abs = kappa0 * r.kappa_ratio;
  return r;
}

double inverse_ratio_fd(const PhysicalParams& p, double rel_step) {
  auto mu_at = [&](double scale) {
    PhysicalParams q = p;
    q.density *= scale;
    return chemical_potential_si(q);
  };
  const double h = rel_step;
  const double dmu_dlnn = (mu_at(1.0 + h) - mu_at(1.0 - h)) / (2.0 * h);
  return dmu_dlnn * 0.5 * dim_value(p.dimension) / fermi_scales(p).E_F;
}

PeakResult find_peak(const std::vector<double>& t, const std::vector<double>& kappa) {
  if (t.size() != kappa.size() || t.size() < 3) throw std::invalid_argument("find_peak needs ≥ 3 matched samples");
  const auto it = std::max_element(kappa.begin(), kappa.end());
  PeakResult r;
  r.index = static_cast<std::size_t>(it - kappa.begin());
  r.t_peak = t[r.index];
  r.kappa_peak = *it;
  if (r.index == 0 || r.index + 1 == t.size()) return r;
  r.interior = true;
  const double u0 = std::log(t[r.index - 1]), u1 = std::log(t[r.index]), u2 = std::log(t[r.index + 1]);
  const double f0 = kappa[r.index - 1], f1 = kappa[r.index], f2 = kappa[r.index + 1];
  const double a = (u1 - u0) * (f1 - f2), b = (u1 - u2) * (f1 - f0);
  const double den = a - b;
  if (den == 0.0) return r;
  const double u = u1 - 0.5 * ((u1 - u0) * a - (u1 - u2) * b) / den;
  // Lagrange parabola through the three samples, evaluated at the vertex.
  const double l0 = (u - u1) * (u - u2) / ((u0 - u1) * (u0 - u2));
  const double l1 = (u - u0) * (u - u2) / ((u1 - u0) * (u1 - u2));
  const double l2 = (u - u0) * (u - u1) / ((u2 - u0) * (u2 - u1));
  r.t_peak = std::exp(u);
  r.kappa_peak = f0 * l0 + f1 * l1 + f2 * l2;
  return r;
}

PeakResult kappa_vs_T_peak(const PhysicalParams& base, const std::vector<double>& temperatures_nK, KappaMethod m) {
  std::vector<double> t, k;
  for (double T : temperatures_nK) {
    PhysicalParams p = base;
    p.temperature_nK = T;
    const auto s = reduce(p);
    t.push_back(s.t);
    k.push_back(kappa_ratio(s, m).kappa_ratio);
  }
  return find_peak(t, k);
}

EffectiveMass effective_mass(double k, double theta_k, const ReducedState& s, KappaMethod m) {
  if (!(k > 0.0)) throw std::domain_error("effective mass needs k > 0");
  const bool lowt = m != KappaMethod::Numeric;
  const hf::Method hm = lowt ? hf::Method::LowT : hf::Method::Numeric;
  EffectiveMass r;
  r.k = k;
  r.theta_k = theta_k;
  if (s.lambda == 0.0) return r;
  double dk = 0.0, dang = 0.0;
  switch (s.dimension) {
    case Dimension::Three:
      if (lowt) {
        if (std::abs(k - 1.0) > 1e-12) throw std::domain_error("low-temperature masses are defined at k_F only");
        dk = *hf::dsigma3d_dk_kf(theta_k, s, hm).dsigma_dk;
        const double ratio = hf::sigma3d(1.0, 0.0, s, hm).sigma;  // Σ/P₂
        dang = -3.0 * std::cos(theta_k) * std::sin(theta_k) * ratio;
      } else {
        dk = 2.0 * pi * s.lambda * legendre_p2(std::cos(theta_k)) * hf::radial3d_dk(k, s.t, s.mu0);
        dang = hf::dsigma3d_dtheta(k, theta_k, s);
      }
      break;
    case Dimension::Two: {
      if (lowt) {
        if (std::abs(k - 1.0) > 1e-12) throw std::domain_error("low-temperature masses are defined at k_F only");
        dk = *hf::dsigma2d_iso_dk_kf(s, hm).dsigma_dk;
      } else {
        dk = hf::dsigma2d_iso_dk(k, s);
      }
      dang = -2.0 * std::sin(2.0 * theta_k) * hf::sigma2d_ani(k, 0.0, s, hm).sigma;
      break;
    }
    case Dimension::One:
      if (lowt) {
        if (std::abs(k - 1.0) > 1e-12) throw std::domain_error("low-temperature masses are defined at k_F only");
        dk = *hf::dsigma1d_dk_kf(s, hm).dsigma_dk;
      } else {
        dk = hf::dsigma1d_dk_numeric(k, s);
      }
      break;
  }
  r.m_over_mstar_radial = 1.0 + dk / (2.0 * k);
  r.m_over_mstar_angular = dang / (2.0 * k * k);
  return r;
}

std::optional<double> stability_line_3d(double t) {
  // m/m_r* at the pole is 1 + λ·c(t) with c independent of λ, so the
  // critical coupling follows from a single evaluation.
  const double mu0 = thermo::mu0_reduced(Dimension::Three, t);
  const double c = pi * hf::radial3d_dk(1.0, t, mu0);
  if (!(c < 0.0)) return std::nullopt;
  return -1.0 / c;
}

double coulomb_kappa_ratio_2d(double r_s, double t) {
  if (r_s < 0.0 || t < 0.0) throw std::domain_error("need r_s ≥ 0 and t ≥ 0");
  const double tlog = t > 0.0 ? t * t * std::log(t) : 0.0;
  return 1.0 + r_s / pi * (-1.0 + 0.13 * t * t + pi * pi / 32.0 * tlog);
}

double coulomb_extremum_t() { return std::exp(-0.5 * (0.26 * 32.0 / (pi * pi) + 1.0)); }

}  // namespace dipolar::obs
