#pragma once

// Compressibility, effective masses, the 3D stability line and the 2D
// Coulomb comparison formula.

#include <optional>
#include <string>
#include <vector>

#include "dipolar/units.hpp"

namespace dipolar::obs {

enum class KappaMethod {
  Numeric,        // finite-temperature quadratures
  LowT,           // low-t expansion (1D: the finite-width Meijer-G form)
  LowTSmallWidth  // 1D only: expansion to leading order in k_F w
};

std::string to_string(KappaMethod m);

struct KappaResult {
  double kappa_ratio = 1.0;  // κ/κ₀
  double inv_ratio = 1.0;    // κ₀/κ
  // Physical κ in J⁻¹·m^d when built from PhysicalParams; otherwise κ/κ₀
  // (κ expressed in units of κ₀).
  double kappa_abs = 1.0;
  KappaMethod method = KappaMethod::Numeric;
};

// μ̃₀ + the Fermi-surface average of Σ(k_F0)/E_F.
double interacting_mu_reduced(const ReducedState& s);
// Interacting chemical potential in joules at the given density and temperature.
double chemical_potential_si(const PhysicalParams& p);

// (n/E_F) dΣ/dn at fixed T, averaged over the Fermi surface.
double density_derivative_term(const ReducedState& s, KappaMethod m = KappaMethod::Numeric);

KappaResult kappa_ratio(const ReducedState& s, KappaMethod m = KappaMethod::Numeric);
KappaResult kappa_ratio(const PhysicalParams& p, KappaMethod m = KappaMethod::Numeric);

// κ₀/κ from a central difference of the interacting μ(n) at fixed T, with t,
// λ and k_F w recomputed at each stencil point.
double inverse_ratio_fd(const PhysicalParams& p, double rel_step = 1e-4);

struct PeakResult {
  bool interior = false;  // false: the maximum sits on a grid endpoint
  double t_peak = 0.0;
  double kappa_peak = 0.0;
  std::size_t index = 0;
};
// Maximum of κ/κ₀ over a t grid; three-point parabola in ln t around the
// largest sample.
PeakResult find_peak(const std::vector<double>& t, const std::vector<double>& kappa);
// Sweeps temperature at fixed density.
PeakResult kappa_vs_T_peak(const PhysicalParams& base, const std::vector<double>& temperatures_nK,
                           KappaMethod m = KappaMethod::Numeric);

struct EffectiveMass {
  double m_over_mstar_radial = 1.0;
  double m_over_mstar_angular = 0.0;
  double k = 1.0;
  double theta_k = 0.0;
};
// 3D: radial and polar-angle masses. 2D: radial mass from the isotropic part
// and azimuthal mass from the anisotropic part (θ_k is read as φ_k). 1D:
// radial only. LowT requires k = 1.
EffectiveMass effective_mass(double k, double theta_k, const ReducedState& s,
                             KappaMethod m = KappaMethod::Numeric);

// Critical λ₃D at which the radial mass at the poles of the Fermi surface
// changes sign; nullopt when the pole mass stays positive for all λ.
std::optional<double> stability_line_3d(double t);

// Low-temperature Hartree-Fock κ₀/κ of a 2D Coulomb gas.
double coulomb_kappa_ratio_2d(double r_s, double t);
// Location of the stationary point in t (independent of r_s).
double coulomb_extremum_t();

}  // namespace dipolar::obs
