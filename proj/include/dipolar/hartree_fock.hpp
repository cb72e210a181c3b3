#pragma once

// Hartree-Fock self-energies of the uniform gas in units of E_F, momenta in
// k_F0. "Numeric" evaluates the finite-temperature radial integrals by
// adaptive quadrature; "LowT" evaluates the analytic low-temperature
// expansions (defined on the Fermi surface only).

#include <optional>
#include <vector>

#include "dipolar/units.hpp"

namespace dipolar::hf {

enum class Method { Numeric, LowT };

struct SelfEnergyValue {
  double sigma = 0.0;
  std::optional<double> dsigma_dk;  // E_F/k_F0
  std::optional<double> dsigma_dn;  // (n/E_F)·dΣ/dn, dimensionless
  Method method = Method::Numeric;
  bool angular_factor_stripped = false;
};

// ---- 3D ----------------------------------------------------------------
// Kernel of the radial integral; smooth except for a log kink at x = 1.
double kernel3d(double x);
// I(k) = ∫ dx n₀(xk) kernel3d(x), so that Σ = 2πλ k³ P₂(cos θ_k) I.
double radial3d(double k, double t, double mu0);
// d/dk [k³ I(k)].
double radial3d_dk(double k, double t, double mu0);

SelfEnergyValue sigma3d(double k, double theta_k, const ReducedState& s, Method m = Method::Numeric);
SelfEnergyValue dsigma3d_dk_kf(double theta_k, const ReducedState& s, Method m = Method::Numeric);
// ∂Σ/∂θ_k at momentum k.
double dsigma3d_dtheta(double k, double theta_k, const ReducedState& s);

// ---- 2D ----------------------------------------------------------------
// Σ^iso(k) with the P₂(cos θ_E) factor included.
SelfEnergyValue sigma2d_iso(double k, const ReducedState& s, Method m = Method::Numeric);
// dΣ^iso/dk at arbitrary k (numeric) and at k_F (either method).
double dsigma2d_iso_dk(double k, const ReducedState& s);
SelfEnergyValue dsigma2d_iso_dk_kf(const ReducedState& s, Method m = Method::Numeric);
// (n/E_F) dΣ^iso(k_F)/dn at fixed temperature.
SelfEnergyValue dsigma2d_iso_dn(const ReducedState& s, Method m = Method::Numeric);
// ∂Σ^iso(k_F)/∂μ̃₀ at fixed t and λ.
double dsigma2d_iso_dmu(const ReducedState& s);
SelfEnergyValue sigma2d_ani(double k, double phi_k, const ReducedState& s, Method m = Method::Numeric);

// ---- 1D ----------------------------------------------------------------
enum class Sigma1DForm { Numeric, SmallWidth, General };
SelfEnergyValue sigma1d_kf(const ReducedState& s, Sigma1DForm form = Sigma1DForm::Numeric);
// Σ(k) by direct quadrature with the full quasi-1D exchange kernel.
double sigma1d_numeric(double k, const ReducedState& s);
double dsigma1d_dk_numeric(double k, const ReducedState& s);
SelfEnergyValue dsigma1d_dk_kf(const ReducedState& s, Method m = Method::Numeric);
double dsigma1d_dmu(const ReducedState& s);

// Breakpoints for integrands carrying a Fermi edge at √μ̃₀ of width ~t.
std::vector<double> fermi_edge_points(double mu0, double t, double scale = 1.0);

}  // namespace dipolar::hf
