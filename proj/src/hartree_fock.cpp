#include "dipolar/hartree_fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dipolar/constants.hpp"
#include "dipolar/potentials.hpp"
#include "dipolar/quadrature.hpp"
#include "dipolar/specfun.hpp"
#include "dipolar/thermo.hpp"

namespace dipolar::hf {

namespace {

const quad::Options kOpt{1e-10, 1e-13, 4000};

void require_fermi_surface(double k) {
  if (std::abs(k - 1.0) > 1e-12)
    throw std::domain_error("low-temperature expansions are defined on the Fermi surface only");
}

void require_positive_k(double k) {
  if (!(k > 0.0)) throw std::domain_error("momentum must be positive");
}

double t2lnt(double t) { return t > 0.0 ? t * t * std::log(t) : 0.0; }

// E and K at modulus 2√(xk)/(x+k), via the exact complementary modulus.
specfun::EllipticPair elliptic_at(double x, double k) {
  const double kp = std::abs(x - k) / (x + k);
  if (kp == 0.0) return {std::numeric_limits<double>::infinity(), 1.0};
  return specfun::ellip_KE_complementary(kp);
}

double two_d_prefactor(const ReducedState& s) {
  return 16.0 * std::sqrt(pi) * s.lambda * legendre_p2(std::cos(s.theta_E));
}

double one_d_prefactor(const ReducedState& s) {
  return 0.5 * pi * pi * s.lambda * legendre_p2(std::cos(s.theta_E));
}

// d/du of u² e^{u²w²} Γ(0, u²w²).
double exchange_shape_du(double u, double w) {
  if (u == 0.0) return 0.0;
  const double y = u * u * w * w;
  return 2.0 * u * (1.0 + y) * specfun::gamma_upper_scaled(0, y) - 2.0 * u;
}

// Kernel of the 3D integral in the large-argument region, summed as
// −12 Σ_{m≥2} x^{4−2m} / ((2m+1)(2m−1)(2m−3)); avoids the x⁴ cancellation.
double kernel3d_series(double x) {
  const double u = 1.0 / (x * x);
  double pw = 1.0, sum = 0.0;
  for (int m = 2; m < 80; ++m) {
    const double term = pw / ((2.0 * m + 1) * (2.0 * m - 1) * (2.0 * m - 3));
    sum += term;
    if (term < 1e-18 * std::abs(sum)) break;
    pw *= u;
  }
  return -12.0 * sum;
}

}  // namespace

std::vector<double> fermi_edge_points(double mu0, double t, double scale) {
  const double e = std::sqrt(std::max(mu0, 0.0));
  std::vector<double> pts{e / scale};
  if (t > 0.0) {
    const double d = t / (2.0 * std::max(e, std::sqrt(t)));
    for (double c : {2.0, 6.0, 15.0, 30.0}) {
      pts.push_back((e - c * d) / scale);
      pts.push_back((e + c * d) / scale);
    }
  }
  return pts;
}

namespace {

std::vector<double> make_panels(double a, double b, std::vector<double> interior) {
  std::vector<double> pts{a, b};
  for (double x : interior)
    if (x > a && x < b && std::isfinite(x)) pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  return pts;
}

}  // namespace

// ---- 3D ------------------------------------------------------------------

double kernel3d(double x) {
  if (x == 1.0) return -1.0;
  if (x > 2.5) return kernel3d_series(x);
  const double x2 = x * x;
  return -2.5 * x2 + 1.5 * x2 * x2 + 0.75 * x * (x2 - 1.0) * (x2 - 1.0) * std::log(std::abs((x - 1.0) / (x + 1.0)));
}

double radial3d(double k, double t, double mu0) {
  require_positive_k(k);
  const thermo::OccupationKernel occ{t, mu0};
  auto pts = fermi_edge_points(mu0, t, k);
  pts.push_back(1.0);
  auto f = [&](double x) { return occ.occupation(x * k) * kernel3d(x); };
  return quad::integrate_checked(f, make_panels(0.0, occ.x_max() / k, pts), kOpt, "3D self-energy");
}

double radial3d_dk(double k, double t, double mu0) {
  require_positive_k(k);
  const double I = radial3d(k, t, mu0);
  if (t == 0.0) {
    const double a = std::sqrt(std::max(mu0, 0.0));
    return 3.0 * k * k * I - k * a * kernel3d(a / k);
  }
  const thermo::OccupationKernel occ{t, mu0};
  auto pts = fermi_edge_points(mu0, t, k);
  pts.push_back(1.0);
  auto f = [&](double x) { return -2.0 * x * x * k * occ.minus_dn_deps(x * k) * kernel3d(x); };
  const double J = quad::integrate_checked(f, make_panels(0.0, occ.x_max() / k, pts), kOpt, "3D dSigma/dk");
  return 3.0 * k * k * I + k * k * k * J;
}

SelfEnergyValue sigma3d(double k, double theta_k, const ReducedState& s, Method m) {
  const double p2 = legendre_p2(std::cos(theta_k));
  SelfEnergyValue v;
  v.method = m;
  if (m == Method::LowT) {
    require_fermi_surface(k);
    v.sigma = 4.0 * pi * s.lambda * p2 * (-1.0 / 3.0 + pi * pi * s.t * s.t / 16.0);
    return v;
  }
  v.sigma = 2.0 * pi * s.lambda * k * k * k * p2 * radial3d(k, s.t, s.mu0);
  return v;
}

SelfEnergyValue dsigma3d_dk_kf(double theta_k, const ReducedState& s, Method m) {
  const double p2 = legendre_p2(std::cos(theta_k));
  SelfEnergyValue v;
  v.method = m;
  if (m == Method::LowT) {
    const double t = s.t;
    const double c = (3.0 / 8.0 + 3.0 * kSpecialConstants.zeta_prime_minus1 + 0.25 * std::log(pi)) * pi * pi;
    v.dsigma_dk = -2.0 * pi * s.lambda * p2 * (1.0 + 0.25 * pi * pi * t2lnt(t) + c * t * t);
  } else {
    v.dsigma_dk = 2.0 * pi * s.lambda * p2 * radial3d_dk(1.0, s.t, s.mu0);
  }
  v.sigma = sigma3d(1.0, theta_k, s, m).sigma;
  return v;
}

double dsigma3d_dtheta(double k, double theta_k, const ReducedState& s) {
  const double dp2 = -3.0 * std::cos(theta_k) * std::sin(theta_k);
  return 2.0 * pi * s.lambda * k * k * k * dp2 * radial3d(k, s.t, s.mu0);
}

// ---- 2D ------------------------------------------------------------------

SelfEnergyValue sigma2d_iso(double k, const ReducedState& s, Method m) {
  SelfEnergyValue v;
  v.method = m;
  const double pre = two_d_prefactor(s);
  if (m == Method::LowT) {
    require_fermi_surface(k);
    v.sigma = pre * (8.0 / 9.0 + pi * pi * s.t * s.t / 24.0);
    return v;
  }
  require_positive_k(k);
  const thermo::OccupationKernel occ{s.t, s.mu0};
  auto pts = fermi_edge_points(s.mu0, s.t);
  pts.push_back(k);
  auto f = [&](double x) {
    if (x == 0.0) return 0.0;
    return x * occ.occupation(x) * (k + x) * elliptic_at(x, k).E;
  };
  v.sigma = pre * quad::integrate_checked(f, make_panels(0.0, occ.x_max(), pts), kOpt, "2D self-energy");
  return v;
}

double dsigma2d_iso_dk(double k, const ReducedState& s) {
  require_positive_k(k);
  const thermo::OccupationKernel occ{s.t, s.mu0};
  auto pts = fermi_edge_points(s.mu0, s.t);
  pts.push_back(k);
  auto f = [&](double x) {
    if (x == 0.0) return 0.0;
    const auto ke = elliptic_at(x, k);
    const double r = x / k;
    const double kterm = r == 1.0 ? 0.0 : (1.0 - r) * ke.K;
    return x * occ.occupation(x) * ((1.0 + r) * ke.E + kterm);
  };
  // (1 + r)E + (1 − r)K cancels down from O(r), so roundoff sets an absolute floor ~ ε·r_max.
  quad::Options opt = kOpt;
  opt.abs_tol = std::max(opt.abs_tol, std::numeric_limits<double>::epsilon() * occ.x_max() / k);
  const double I = quad::integrate_checked(f, make_panels(0.0, occ.x_max(), pts), opt, "2D dSigma/dk");
  return 0.5 * two_d_prefactor(s) * I;
}

SelfEnergyValue dsigma2d_iso_dk_kf(const ReducedState& s, Method m) {
  SelfEnergyValue v;
  v.method = m;
  if (m == Method::LowT) {
    const double t = s.t;
    const double c = 1.0 + std::log(pi / 4.0) + 12.0 * kSpecialConstants.zeta_prime_minus1;
    v.dsigma_dk = two_d_prefactor(s) * (2.0 / 3.0 + pi * pi / 48.0 * t * t * c + pi * pi / 48.0 * t2lnt(t));
  } else {
    v.dsigma_dk = dsigma2d_iso_dk(1.0, s);
  }
  v.sigma = sigma2d_iso(1.0, s, m).sigma;
  return v;
}

double dsigma2d_iso_dmu(const ReducedState& s) {
  const double pre = two_d_prefactor(s);
  if (s.t == 0.0) {
    // −∂n/∂ε → δ(x² − μ̃₀); the kernel x(1+x)E at x = 1 equals 2.
    const double a = std::sqrt(s.mu0);
    return pre * 0.5 * (1.0 + a) * elliptic_at(a, 1.0).E;
  }
  const thermo::OccupationKernel occ{s.t, s.mu0};
  auto pts = fermi_edge_points(s.mu0, s.t);
  pts.push_back(1.0);
  auto f = [&](double x) {
    if (x == 0.0) return 0.0;
    return occ.minus_dn_deps(x) * x * (1.0 + x) * elliptic_at(x, 1.0).E;
  };
  return pre * quad::integrate_checked(f, make_panels(0.0, occ.x_max(), pts), kOpt, "2D dSigma/dmu");
}

SelfEnergyValue dsigma2d_iso_dn(const ReducedState& s, Method m) {
  SelfEnergyValue v;
  v.method = m;
  if (m == Method::LowT) {
    v.dsigma_dn = two_d_prefactor(s) * (4.0 / 3.0 - pi * pi * s.t * s.t / 48.0);
  } else {
    const double dk = dsigma2d_iso_dk(1.0, s);
    v.dsigma_dn = 0.5 * dk + thermo::mu0_thermal_factor(Dimension::Two, s.t) * dsigma2d_iso_dmu(s);
  }
  v.sigma = sigma2d_iso(1.0, s, m).sigma;
  return v;
}

SelfEnergyValue sigma2d_ani(double k, double phi_k, const ReducedState& s, Method m) {
  SelfEnergyValue v;
  v.method = m;
  const double sn = std::sin(s.theta_E);
  const double pre = -8.0 * std::sqrt(pi) / 3.0 * s.lambda * sn * sn * std::cos(2.0 * phi_k);
  if (m == Method::LowT) {
    require_fermi_surface(k);
    v.sigma = pre * (8.0 / 5.0 - pi * pi * s.t * s.t / 8.0);
    return v;
  }
  require_positive_k(k);
  if (pre == 0.0) return v;
  const thermo::OccupationKernel occ{s.t, s.mu0};
  auto pts = fermi_edge_points(s.mu0, s.t, k);
  pts.push_back(1.0);
  auto f = [&](double x) {
    if (x == 0.0) return 0.0;
    const auto ke = elliptic_at(x, 1.0);
    const double kterm = x == 1.0 ? 0.0 : (1.0 - x) * (1.0 - x) * ke.K;
    return x * (1.0 + x) * occ.occupation(x * k) * ((2.0 - x * x) * ke.E + kterm);
  };
  v.sigma = pre * k * k * k *
            quad::integrate_checked(f, make_panels(0.0, occ.x_max() / k, pts), kOpt, "2D anisotropic self-energy");
  return v;
}

// ---- 1D ------------------------------------------------------------------

namespace {

std::vector<double> one_d_points(const ReducedState& s, double k) {
  auto pts = fermi_edge_points(s.mu0, s.t);
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) pts.push_back(-pts[i]);
  pts.push_back(k);
  pts.push_back(0.0);
  return pts;
}

}  // namespace

double sigma1d_numeric(double k, const ReducedState& s) {
  if (!(s.kfw > 0.0)) throw std::domain_error("1D self-energy needs a positive width");
  const thermo::OccupationKernel occ{s.t, s.mu0};
  const double X = occ.x_max();
  auto f = [&](double kp) { return occ.occupation(kp) * potentials::v1d_exchange_shape(k - kp, s.kfw); };
  return -one_d_prefactor(s) *
         quad::integrate_checked(f, make_panels(-X, X, one_d_points(s, k)), kOpt, "1D self-energy");
}

double dsigma1d_dk_numeric(double k, const ReducedState& s) {
  if (!(s.kfw > 0.0)) throw std::domain_error("1D self-energy needs a positive width");
  const thermo::OccupationKernel occ{s.t, s.mu0};
  const double X = occ.x_max();
  auto f = [&](double kp) { return occ.occupation(kp) * exchange_shape_du(k - kp, s.kfw); };
  return -one_d_prefactor(s) *
         quad::integrate_checked(f, make_panels(-X, X, one_d_points(s, k)), kOpt, "1D dSigma/dk");
}

double dsigma1d_dmu(const ReducedState& s) {
  if (!(s.kfw > 0.0)) throw std::domain_error("1D self-energy needs a positive width");
  if (s.t == 0.0) {
    const double a = std::sqrt(s.mu0);
    const double f = potentials::v1d_exchange_shape(1.0 - a, s.kfw) + potentials::v1d_exchange_shape(1.0 + a, s.kfw);
    return -one_d_prefactor(s) * f / (2.0 * a);
  }
  const thermo::OccupationKernel occ{s.t, s.mu0};
  const double X = occ.x_max();
  auto f = [&](double kp) { return occ.minus_dn_deps(kp) * potentials::v1d_exchange_shape(1.0 - kp, s.kfw); };
  return -one_d_prefactor(s) *
         quad::integrate_checked(f, make_panels(-X, X, one_d_points(s, 1.0)), kOpt, "1D dSigma/dmu");
}

SelfEnergyValue sigma1d_kf(const ReducedState& s, Sigma1DForm form) {
  if (!(s.kfw > 0.0)) throw std::domain_error("1D self-energy needs a positive width");
  SelfEnergyValue v;
  const double pre = one_d_prefactor(s);
  const double t2 = s.t * s.t;
  const double w = s.kfw;
  const double g = kSpecialConstants.euler_gamma;
  switch (form) {
    case Sigma1DForm::Numeric:
      v.method = Method::Numeric;
      v.sigma = sigma1d_numeric(1.0, s);
      break;
    case Sigma1DForm::SmallWidth: {
      v.method = Method::LowT;
      const double L = 2.0 * std::log(2.0 * w);
      v.sigma = pre * (8.0 / 3.0 * (g - 2.0 / 3.0 + L) + (g + 1.0 + L) * pi * pi * t2 / 6.0);
      break;
    }
    case Sigma1DForm::General: {
      // Overall sign fixed so that the t = 0 term matches the small-width form.
      v.method = Method::LowT;
      const double x = 4.0 * w * w;
      const double ga = specfun::meijer_g(specfun::MeijerVariant::A, x);
      const double gb = specfun::meijer_g(specfun::MeijerVariant::B, x);
      const double e = specfun::gamma_upper_scaled(0, x);
      v.sigma = -pre * (4.0 * ga + pi * pi * t2 / 6.0 * (-1.0 + x * e + 1.5 * ga - x * gb));
      break;
    }
  }
  return v;
}

SelfEnergyValue dsigma1d_dk_kf(const ReducedState& s, Method m) {
  SelfEnergyValue v;
  v.method = m;
  if (m == Method::Numeric) {
    v.dsigma_dk = dsigma1d_dk_numeric(1.0, s);
    v.sigma = sigma1d_numeric(1.0, s);
    return v;
  }
  if (!(s.kfw > 0.0)) throw std::domain_error("1D self-energy needs a positive width");
  const double w2 = s.kfw * s.kfw;
  const double e = specfun::gamma_upper_scaled(0, 4.0 * w2);
  const double t2 = s.t * s.t;
  const double bracket = kSpecialConstants.euler_gamma - 12.0 / (pi * pi) * kSpecialConstants.zeta_prime_2 +
                         8.0 * w2 - std::log(w2) - (1.0 + 20.0 * w2 + 32.0 * w2 * w2) * e;
  v.dsigma_dk = one_d_prefactor(s) * (-4.0 * e + pi * pi / 12.0 * t2 * bracket - pi * pi / 6.0 * t2lnt(s.t));
  v.sigma = sigma1d_kf(s, Sigma1DForm::General).sigma;
  return v;
}

}  // namespace dipolar::hf
