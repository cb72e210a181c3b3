#include "dipolar/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dipolar/constants.hpp"
#include "dipolar/errors.hpp"
#include "dipolar/quadrature.hpp"

namespace dipolar::specfun {

namespace {

constexpr double kSeriesEdge = -2.0;
constexpr double kAsymptoticEdge = 30.0;

bool is_supported_order(double s) { return s == 0.5 || s == 1.5 || s == 2.5; }

// Fermi function 1/(e^z + 1) without overflow.
double fermi(double z) {
  if (z > 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

double polylog_series(double s, double x) {
  const double q = std::exp(x);
  double sum = 0.0, pw = 1.0;
  for (int k = 1; k < 200; ++k) {
    pw *= -q;
    const double term = pw / std::pow(k, s);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// −Li_s(−e^x) = (2/Γ(s)) ∫ v^{2s−1} / (e^{v²−x} + 1) dv.
double polylog_quadrature(double s, double x) {
  const double edge = std::sqrt(std::max(x, 0.0));
  const double top = std::sqrt(std::max(x, 0.0) + 60.0);
  auto f = [s, x](double v) { return 2.0 * std::pow(v, 2.0 * s - 1.0) * fermi(v * v - x); };
  quad::Options opt{1e-14, 1e-300, 2000};
  const double I = quad::integrate_checked(f, quad::panels(0.0, top, {edge}), opt, "polylog");
  return -I / std::tgamma(s);
}

// Sommerfeld series; exponentially small corrections vanish identically for
// half-integer order.
double polylog_asymptotic(double s, double x) {
  static constexpr std::array<double, 8> zeta_even = {
      1.6449340668482264365, 1.0823232337111381915, 1.0173430619844491397,
      1.0040773561979443394, 1.0009945751278180853, 1.0002460865533080483,
      1.0000612481350587048, 1.0000152822594086519};
  double sum = 1.0 / std::tgamma(s + 1.0);
  for (int k = 1; k <= 8; ++k) {
    const double c = 2.0 * (1.0 - std::pow(2.0, 1 - 2 * k)) * zeta_even[k - 1];
    const double term = c * std::pow(x, -2.0 * k) / std::tgamma(s + 1.0 - 2.0 * k);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return -std::pow(x, s) * sum;
}

void agm(double a, double b, double c0, double& K, double& E) {
  // c_{n+1} = (a_n − b_n)/2; E/K = 1 − Σ 2^{n−1} c_n².
  double sum = 0.5 * c0 * c0, pw = 0.5;
  for (int n = 0; n < 60; ++n) {
    const double an = 0.5 * (a + b);
    const double bn = std::sqrt(a * b);
    const double cn = 0.5 * (a - b);
    pw *= 2.0;
    sum += pw * cn * cn;
    a = an;
    b = bn;
    if (std::abs(cn) <= 1e-16 * a) break;
  }
  K = pi / (2.0 * a);
  E = K * (1.0 - sum);
}

// e^x E_n(x), n ∈ {1, 2}.
double expint_scaled(int n, double x) {
  if (x <= 1.0) {
    double sum = 0.0, term = 1.0;
    for (int k = 1; k < 60; ++k) {
      term *= -x / k;
      const double add = term / k;
      sum += add;
      if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    const double e1 = -kSpecialConstants.euler_gamma - std::log(x) - sum;
    const double ex = std::exp(x);
    return n == 1 ? ex * e1 : 1.0 - x * ex * e1;
  }
  // Modified Lentz continued fraction.
  constexpr double tiny = 1e-300;
  double b = x + n, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (n - 1 + i);
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) return h;
  }
  throw NumericError("exponential integral continued fraction did not converge");
}

}  // namespace

double polylog_negexp(double s, double x) {
  if (!is_supported_order(s)) throw std::domain_error("polylog_negexp: order must be 1/2, 3/2 or 5/2");
  if (!std::isfinite(x)) throw std::domain_error("polylog_negexp: argument must be finite");
  if (x < kSeriesEdge) return polylog_series(s, x);
  if (x > kAsymptoticEdge) return polylog_asymptotic(s, x);
  return polylog_quadrature(s, x);
}

EllipticPair ellip_KE_complementary(double kp) {
  if (!(kp > 0.0) || kp > 1.0) throw std::domain_error("elliptic: complementary modulus must be in (0, 1]");
  const double k = std::sqrt((1.0 - kp) * (1.0 + kp));
  EllipticPair r{};
  agm(1.0, kp, k, r.K, r.E);
  return r;
}

double ellip_K(double k) {
  if (!(k >= 0.0 && k < 1.0)) throw std::domain_error("ellip_K: modulus must be in [0, 1)");
  return ellip_KE_complementary(std::sqrt((1.0 - k) * (1.0 + k))).K;
}

double ellip_E(double k) {
  if (!(k >= 0.0 && k <= 1.0)) throw std::domain_error("ellip_E: modulus must be in [0, 1]");
  if (k == 1.0) return 1.0;
  return ellip_KE_complementary(std::sqrt((1.0 - k) * (1.0 + k))).E;
}

double gamma_upper_scaled(int a, double x) {
  if (!(x > 0.0)) throw std::domain_error("gamma_upper: x must be positive");
  if (a == 0) return expint_scaled(1, x);
  if (a == -1) return expint_scaled(2, x) / x;
  throw std::domain_error("gamma_upper: order must be 0 or -1");
}

double gamma_upper(int a, double x) {
  const double s = gamma_upper_scaled(a, x);
  return x > 700.0 ? 0.0 : s * std::exp(-x);
}

double meijer_g_direct(MeijerVariant v, double x) {
  if (!(x > 0.0)) throw std::domain_error("meijer_g: x must be positive");
  quad::Options opt{1e-12, 1e-300, 2000};
  if (v == MeijerVariant::A) {
    auto f = [x](double u) {
      if (u == 0.0) return 0.0;
      return u * u * gamma_upper_scaled(0, 0.25 * u * u * x);
    };
    return 0.25 * quad::integrate_checked(f, {0.0, 1.0, 2.0}, opt, "meijer_g A");
  }
  auto f = [x](double u) {
    if (u == 0.0) return 0.0;
    return u * u * u * u * gamma_upper_scaled(-1, 0.25 * u * u * x);
  };
  return quad::integrate_checked(f, {0.0, 1.0, 2.0}, opt, "meijer_g B") / 16.0;
}

namespace {

// ln G tabulated against ln x; both variants are positive for x > 0.
struct MeijerTable {
  static constexpr int kNodes = 1200;
  static constexpr double kLo = -18.420680743952367;  // ln 1e-8
  static constexpr double kHi = 5.991464547107982;    // ln 400
  double h = (kHi - kLo) / (kNodes - 1);
  std::vector<double> a, b;

  MeijerTable() : a(kNodes), b(kNodes) {
    for (int i = 0; i < kNodes; ++i) {
      const double x = std::exp(kLo + i * h);
      a[i] = std::log(meijer_g_direct(MeijerVariant::A, x));
      b[i] = std::log(meijer_g_direct(MeijerVariant::B, x));
    }
  }

  // Six-point Lagrange interpolation.
  double eval(const std::vector<double>& f, double lx) const {
    const double p = (lx - kLo) / h;
    int i0 = static_cast<int>(std::floor(p)) - 2;
    i0 = std::clamp(i0, 0, kNodes - 6);
    double sum = 0.0;
    for (int j = 0; j < 6; ++j) {
      double w = 1.0;
      for (int m = 0; m < 6; ++m)
        if (m != j) w *= (p - (i0 + m)) / static_cast<double>(j - m);
      sum += w * f[i0 + j];
    }
    return sum;
  }
};

const MeijerTable& meijer_table() {
  static const MeijerTable table;  // thread-safe, immutable after construction
  return table;
}

}  // namespace

double meijer_g(MeijerVariant v, double x) {
  if (!(x > 0.0)) throw std::domain_error("meijer_g: x must be positive");
  const double lx = std::log(x);
  if (lx < MeijerTable::kLo || lx > MeijerTable::kHi) return meijer_g_direct(v, x);
  const auto& t = meijer_table();
  return std::exp(t.eval(v == MeijerVariant::A ? t.a : t.b, lx));
}

}  // namespace dipolar::specfun
