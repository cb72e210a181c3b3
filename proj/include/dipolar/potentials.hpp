#pragma once

// Momentum-space dipolar interactions in reduced units (E_F/k_F0^d); momenta
// in k_F0, the transverse width as kfw = k_F0·w.

namespace dipolar::potentials {

// Cutoff-free 3D limit 16π³λ P₂(cos θ_q).
double v3d_q(double theta_q, double lambda3d);

// Full form with short- and long-range cutoffs (ε < R, in 1/k_F0).
double v3d_q_cutoff(double q, double theta_q, double epsilon, double R, double lambda3d);

// Quasi-2D gaussian-profile form, affine in q.
double v2d_q(double q, double kfw, double theta_E, double phi_q, double lambda2d);

enum class V1DForm { Full, SmallQW };
// Quasi-1D form; even in q. The q → 0 value is −π³λP₂/(3 kfw²) for both forms.
double v1d_q(double q, double kfw, double theta_E, double lambda1d, V1DForm form = V1DForm::Full);

// The q-dependent bracket of the full 1D form, q²e^{q²w²}Γ(0, q²w²), with
// the large-argument asymptote substituted to avoid overflow. Zero at q = 0.
double v1d_exchange_shape(double q, double kfw);

}  // namespace dipolar::potentials
