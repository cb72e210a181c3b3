#pragma once

#include <utility>

namespace dipolar::specfun {

// Li_s(−e^x) for s ∈ {1/2, 3/2, 5/2}.
double polylog_negexp(double s, double x);

// Complete elliptic integrals, modulus convention: K(k) = ∫dθ/√(1 − k² sin²θ).
double ellip_K(double k);
double ellip_E(double k);
// Both integrals from the complementary modulus k' = √(1 − k²); accurate as k' → 0.
struct EllipticPair {
  double K;
  double E;
};
EllipticPair ellip_KE_complementary(double kp);

// Γ(a, x) for a ∈ {0, −1} and its scaled form e^x Γ(a, x), which stays finite
// where e^x overflows.
double gamma_upper(int a, double x);
double gamma_upper_scaled(int a, double x);

enum class MeijerVariant { A, B };
// G^{2,2}_{2,3}(x | −1/2,0; 0,0,−3/2) (A) and G^{2,2}_{2,3}(x | −3/2,−1; −1,0,−5/2) (B).
// Served from an interpolation table on 1e-8 ≤ x ≤ 4e2; direct quadrature outside.
double meijer_g(MeijerVariant v, double x);
// Same functions by direct quadrature, bypassing the table.
double meijer_g_direct(MeijerVariant v, double x);

}  // namespace dipolar::specfun
