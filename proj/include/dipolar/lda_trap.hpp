#pragma once

// Local-density profiles of a 1D or 2D gas in an isotropic harmonic trap,
// μ(r) = μ(0) − mω²r²/2, built from the uniform-gas interacting μ(n, T).

#include <functional>
#include <vector>

#include "dipolar/units.hpp"

namespace dipolar::lda {

struct TrapSpec {
  PhysicalParams gas;             // dimension 1 or 2; density is ignored
  double trap_frequency_hz = 0.0; // ω/2π
  double particle_number = 0.0;   // per plane or per tube
  int radii = 200;                // output samples in [0, edge]
  void validate() const;
};

struct TrapProfile {
  Dimension dimension = Dimension::Two;
  double omega = 0.0;              // rad/s
  double particle_number = 0.0;    // integral of the emitted profile
  double mu_center = 0.0;          // J
  std::vector<double> radius_um;
  std::vector<double> density;     // cm^-d
  std::vector<double> kappa_ratio; // local κ/κ₀
  std::vector<double> kappa_abs;   // local κ, J⁻¹ m^d
};

// Monotone inverse of μ(n) at fixed T on a log-density table. Throws
// std::domain_error with the density of the first fold when μ(n) is not
// increasing.
class DensityOfMu {
 public:
  DensityOfMu(const PhysicalParams& gas, double n_lo, double n_hi, int points = 400);
  double density(double mu) const;  // cm^-d; 0 below the table
  double mu_min() const { return mu_.front(); }
  double mu_max() const { return mu_.back(); }
  double n_min() const { return n_lo_; }
  double n_max() const { return n_hi_; }

 private:
  std::vector<double> mu_;
  std::function<double(double)> log_n_;  // monotone cubic in μ
  double n_lo_, n_hi_;
};

TrapProfile trap_profile(const TrapSpec& spec);

// Gaussian with the peak density and particle number of the profile,
// sampled on its radii.
std::vector<double> gaussian_reference(const TrapProfile& profile);

struct HartreeLocality {
  double interaction_length_nm = 0.0;  // 2md²/h²
  double trap_length_nm = 0.0;         // √(ħ/mω)
  double ratio = 0.0;
  bool negligible = true;  // ratio below 0.1
  bool boundary = false;   // within 5% of the threshold
};
HartreeLocality hartree_locality_check(const PhysicalParams& gas, double trap_frequency_hz);
HartreeLocality hartree_locality_for_length(const PhysicalParams& gas, double trap_length_nm);

}  // namespace dipolar::lda
