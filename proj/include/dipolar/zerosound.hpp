#pragma once

// Long-wavelength collective modes of the uniform gas. Speeds are
// s = ω/(q v_F0) with v_F0 = ħk_F0/m; response functions are in reduced units
// (k_F0^d/E_F) and follow the convention Im χ ≥ 0, so the damping rate is
// γ = −Im D / ∂_s Re D for the dispersion function D(s).

#include <complex>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "dipolar/units.hpp"

namespace dipolar::zs {

struct ModeSolution {
  double v0_over_vF = std::numeric_limits<double>::quiet_NaN();
  double damping_over_qvF = std::numeric_limits<double>::quiet_NaN();
  double theta_q = 0.0;
  bool converged = false;
  bool overdamped_flag = false;
  double residual = std::numeric_limits<double>::quiet_NaN();  // |Re D| at the root
  int sign_changes = 0;  // in the scanned window
  std::string note;
};

struct SolveOptions {
  double s_min = 1.0 + 1e-6;
  double s_max = 10.0;
  int scan_points = 400;
  double s_cap = 1e3;              // the upper bound may grow geometrically up to here
  double max_damping_ratio = 0.5;  // γ/Ω above this is reported as overdamped
  double tol = 1e-12;              // absolute tolerance on s
};

// Generic driver: scans Re D on the window, refines the outermost upward crossing
// and evaluates the damping from the imaginary part.
template <class F>
ModeSolution solve_dispersion(F&& D, const SolveOptions& opt);

// ---- 2D --------------------------------------------------------------------
std::complex<double> chi2d(double s, const ReducedState& st);
// V₂D(q → 0) in E_F/k_F0².
double v2d_zero(const ReducedState& st);
ModeSolution solve_zerosound_2d(const ReducedState& st, const SolveOptions& opt = {});
// Zero-temperature, strong-coupling limit √(2a/(3√π w)), a = m d²/ħ².
double zerosound_2d_limit(const PhysicalParams& p);

// ---- 1D --------------------------------------------------------------------
std::complex<double> chi1d(double s, const ReducedState& st);
double v1d_zero(const ReducedState& st);
ModeSolution solve_zerosound_1d(const ReducedState& st, const SolveOptions& opt = {});
// √(a/(6π w² k_F0)).
double zerosound_1d_limit(const PhysicalParams& p);

// ---- 3D --------------------------------------------------------------------
struct Chi3dBlock {
  std::complex<double> chi00_00;
  std::complex<double> chi10_00;
  std::complex<double> chi11_00;
};

struct LandauParams {
  double f00_0 = 0.0;
  double f11_0 = 0.0;
};
// The angular factor is taken at the direction of momentum transfer.
LandauParams landau_params(double lambda3d, double theta_q);

// Hartree-Fock quasiparticle energies of the 3D gas, tabulated once per
// (t, λ) and shared read-only by every χ evaluation.
class QuasiparticleSurface3D {
 public:
  explicit QuasiparticleSurface3D(const ReducedState& st);
  ~QuasiparticleSurface3D();
  QuasiparticleSurface3D(const QuasiparticleSurface3D&) = delete;
  QuasiparticleSurface3D& operator=(const QuasiparticleSurface3D&) = delete;

  const ReducedState& state() const;
  struct Local {
    double energy;       // x² + Σ⁰
    double x_radial;     // x·m/m_r*⁰
    double x_angular;    // x·m/m_θ*⁰
  };
  Local at(double x, double theta_k) const;
  // Fermi momentum of the first-order distorted surface along θ_k.
  double fermi_momentum(double theta_k) const;
  double x_max() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Chi3dBlock chi3d_block(const QuasiparticleSurface3D& qp, double theta_q, double s, double rel_tol = 1e-6);
Chi3dBlock chi3d_block(double theta_q, double s, const ReducedState& st);
// det(I − M) for the s-wave / longitudinal p-wave block.
std::complex<double> det_3d(const Chi3dBlock& chi, const LandauParams& f);
ModeSolution solve_zerosound_3d(const QuasiparticleSurface3D& qp, double theta_q, const SolveOptions& opt = {});
ModeSolution solve_zerosound_3d(double theta_q, const ReducedState& st, const SolveOptions& opt = {});

// True when a converged mode exists for at least one θ_q of the grid.
bool mode_exists_3d(double lambda3d, double t, const std::vector<double>& theta_grid, const SolveOptions& opt = {});

struct CeilingResult {
  bool bracketed = false;  // mode at t_lo, none at t_hi
  double t_below = 0.0;    // highest t with a mode
  double t_above = 0.0;    // lowest t without
  double t_ceiling() const { return 0.5 * (t_below + t_above); }
};
// Bisection in t for the temperature above which no θ_q of the grid carries
// a converged mode.
CeilingResult zerosound_ceiling_3d(double lambda3d, const std::vector<double>& theta_grid, double t_lo, double t_hi,
                                   double t_tol = 2e-3, const SolveOptions& opt = {});

}  // namespace dipolar::zs

#include "dipolar/zerosound_impl.hpp"
