#include "dipolar/potentials.hpp"

#include <cmath>
#include <stdexcept>

#include "dipolar/constants.hpp"
#include "dipolar/specfun.hpp"
#include "dipolar/units.hpp"

namespace dipolar::potentials {

namespace {

// j₁(x)/x, with its Taylor series where the closed form cancels.
double j1_over_x(double x) {
  if (std::abs(x) < 1e-2) {
    const double x2 = x * x;
    return 1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0 - x2 * x2 * x2 / 45360.0;
  }
  const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
  return j1 / x;
}

}  // namespace

double v3d_q(double theta_q, double lambda3d) {
  return 16.0 * pi * pi * pi * lambda3d * legendre_p2(std::cos(theta_q));
}

double v3d_q_cutoff(double q, double theta_q, double epsilon, double R, double lambda3d) {
  if (!(epsilon > 0.0) || !(epsilon < R)) throw std::domain_error("v3d_q_cutoff: need 0 < epsilon < R");
  if (q < 0.0) throw std::domain_error("v3d_q_cutoff: q must be non-negative");
  // 8πd² expressed through λ: 8πd² = 3·16π³λ (E_F/k_F0³ units).
  return 3.0 * v3d_q(theta_q, lambda3d) * (j1_over_x(q * epsilon) - j1_over_x(q * R));
}

double v2d_q(double q, double kfw, double theta_E, double phi_q, double lambda2d) {
  if (!(kfw > 0.0)) throw std::domain_error("v2d_q: width must be positive");
  const double p2 = legendre_p2(std::cos(theta_E));
  const double s2 = std::sin(theta_E) * std::sin(theta_E);
  const double aniso = p2 - 0.5 * s2 * std::cos(2.0 * phi_q);
  return 16.0 * std::pow(pi, 2.5) * lambda2d * (4.0 / (3.0 * std::sqrt(pi) * kfw) * p2 - std::abs(q) * aniso);
}

double v1d_exchange_shape(double q, double kfw) {
  const double y = q * q * kfw * kfw;
  if (y == 0.0) return 0.0;
  return q * q * specfun::gamma_upper_scaled(0, y);
}

double v1d_q(double q, double kfw, double theta_E, double lambda1d, V1DForm form) {
  if (!(kfw > 0.0)) throw std::domain_error("v1d_q: width must be positive");
  const double pre = pi * pi * pi * lambda1d * legendre_p2(std::cos(theta_E));
  const double c0 = -1.0 / (3.0 * kfw * kfw);
  if (form == V1DForm::Full) return pre * (c0 + v1d_exchange_shape(q, kfw));
  if (q == 0.0) return pre * c0;
  return -pre * (-c0 + q * q * (kSpecialConstants.euler_gamma + 2.0 * std::log(std::abs(q * kfw))));
}

}  // namespace dipolar::potentials
