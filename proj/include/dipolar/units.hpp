#pragma once

// Physical inputs and the reduced unit system (ħ = m = k_F0 = 1, energies in
// E_F so that a free particle at momentum x·k_F0 has energy x²).

namespace dipolar {

enum class Dimension { One = 1, Two = 2, Three = 3 };

inline int dim_value(Dimension d) { return static_cast<int>(d); }
Dimension dimension_from_int(int d);

struct PhysicalParams {
  Dimension dimension = Dimension::Three;
  double mass_amu = 127.0;
  double dipole_debye = 0.57;
  double density = 1e12;      // cm^-d
  double temperature_nK = 0.0;
  double width_nm = 10.0;     // transverse width, d < 3
  double theta_E = 0.0;       // radians
  double theta_q = 0.0;
  double phi_q = 0.0;

  void validate() const;  // throws std::domain_error
};

struct FermiScales {
  double k_F0;  // 1/m
  double E_F;   // J
  double T_F;   // K
  double v_F0;  // m/s
};

struct ReducedState {
  Dimension dimension = Dimension::Three;
  double t = 0.0;
  double lambda = 0.0;
  double mu0 = 1.0;  // μ₀/E_F
  double kfw = 0.0;  // k_F0·w, used for d < 3
  double theta_E = 0.0;
  double theta_q = 0.0;
  double phi_q = 0.0;
};

// SI number density from the cm^-d input.
double density_si(const PhysicalParams& p);
// k_F0 from an SI density in dimension d.
double fermi_k(Dimension d, double n_si);

FermiScales fermi_scales(const PhysicalParams& p);
// m d²/ħ² in metres, with d² in Gaussian form d_SI²/(4πε₀).
double dipole_length(const PhysicalParams& p);
double coupling_lambda(const PhysicalParams& p);
// The dimensionless coupling for a given k_F0 (1/m).
double coupling_from_kf(Dimension d, double dip_len, double k_F0);
ReducedState reduce(const PhysicalParams& p);

inline double legendre_p2(double c) { return 0.5 * (3.0 * c * c - 1.0); }

}  // namespace dipolar
