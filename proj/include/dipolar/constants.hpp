#pragma once

#include <numbers>

namespace dipolar {

inline constexpr double pi = std::numbers::pi;

// CODATA 2018, SI.
namespace si {
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double h = 2.0 * pi * hbar;          // J s
inline constexpr double k_B = 1.380649e-23;           // J/K
inline constexpr double amu = 1.66053906660e-27;      // kg
inline constexpr double debye = 3.33564095198152e-30; // C m
inline constexpr double eps0 = 8.8541878128e-12;      // F/m
}  // namespace si

struct SpecialConstants {
  double euler_gamma;
  double zeta_prime_minus1;  // ζ'(−1)
  double zeta_prime_2;       // ζ'(2)
};

inline constexpr SpecialConstants kSpecialConstants{
    0.57721566490153286060651209008240243,
    -0.16542114370045092921391966024278064,
    -0.93754825431584375370257409456786497,
};

}  // namespace dipolar
