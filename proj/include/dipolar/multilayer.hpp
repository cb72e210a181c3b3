#pragma once

// A 3D gas in a 1D optical lattice V(z) = (V0/2)(1 − cos(2πz/λ)) with the
// dipoles along the lattice axis. Internally momenta are in G = 2π/λ and
// energies in the recoil energy E_R = ħ²G²/2m, so a plane wave has energy κ².

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dipolar/zerosound.hpp"

namespace dipolar::ml {

struct LatticeSpec {
  double V0 = 100.0;          // depth in E_R
  double lambda_nm = 1000.0;  // lattice period
  int N = 50;                 // plane waves q ∈ [−N, N]
  int M_size = 17;            // reciprocal vectors kept in the mode matrix (odd)
  void validate() const;      // throws std::domain_error
};

struct MultilayerParams {
  LatticeSpec lattice;
  double mass_amu = 127.0;
  double dipole_debye = 0.57;
  double n2d = 1e9;  // per layer, cm^-2
  double temperature_nK = 20.0;
  void validate() const;
};

struct LatticeScales {
  double G = 0.0;          // 1/m
  double E_R = 0.0;        // J
  double tau = 0.0;        // k_B T / E_R
  double e2d = 0.0;        // E_2D / E_R = 4π n_2D / G²
  double coupling = 0.0;   // a G / (3π²), a = m d²/ħ²
  double omega_ho = 0.0;   // ħω_ho / E_R = √V0
};
LatticeScales lattice_scales(const MultilayerParams& p);

// Eigenpairs at one quasi-momentum κ_z (units of G). Column b of u holds
// the coefficients u_q, row q + N, of e^{i(κ_z − q)Gz}; the largest entry of
// each column is positive.
struct BlochPoint {
  double kz = 0.0;
  Eigen::VectorXd energy;
  Eigen::MatrixXd u;
};
BlochPoint bloch_point(const LatticeSpec& spec, double kz, int bands);
// Same, with an extra even potential Σ_m v_m e^{imGz}; harmonics[m] = v_m for m ≥ 0.
BlochPoint bloch_point(const LatticeSpec& spec, double kz, int bands, const std::vector<double>& harmonics);

struct BlochData {
  LatticeSpec spec;
  int bands = 0;
  std::vector<BlochPoint> points;
};
BlochData bloch_solve(const LatticeSpec& spec, const std::vector<double>& kz_grid, int bands = 8);

// Harmonic-well estimates for the deep-lattice comparison with the strict 2D
// gas: the oscillator length √(ħ/mω_ho) and the matching Gaussian width of
// the 2D interaction, √2 times larger.
double harmonic_length_nm(const MultilayerParams& p);
double matched_width_nm(const MultilayerParams& p);

struct ModelOptions {
  int kz_points = 128;    // uniform periodic grid over the Brillouin zone, even
  int extra_bands = 24;   // empty bands kept above the occupied ones
  double rel_tol = 1e-9;
  // Solve the bands in the self-consistent Hartree potential of the gas
  // itself. Response functions built on these bands respect the Kohn theorem.
  bool hartree_bands = false;
  int max_iterations = 300;
};

// Band structure, occupations and the noninteracting chemical potential at
// one (n_2D, T), shared by every quantity below.
class MultilayerModel {
 public:
  explicit MultilayerModel(const MultilayerParams& p, const ModelOptions& opt = {});

  const MultilayerParams& params() const { return p_; }
  const LatticeScales& scales() const { return sc_; }
  const ModelOptions& options() const { return opt_; }
  int bands() const { return bands_; }
  const std::vector<BlochPoint>& grid() const { return grid_; }
  double mu0() const { return mu0_; }     // E_R, at temperature T
  double mu_T0() const { return mu_f_; }  // E_R, at T = 0 (defines the Fermi surface)
  int occupied_bands() const;             // bands with weight at the T = 0 surface
  // Bloch states of the model's single-particle Hamiltonian at any κ_z.
  BlochPoint bloch(double kz, int bands) const;
  const std::vector<double>& hartree_harmonics() const { return vh_; }
  int hartree_iterations() const { return iterations_; }
  // ∫ d²κ⊥ f / π = τ ln(1 + e^{(μ₀ − ε)/τ}).
  double sheet_occupation(double energy) const;

 private:
  MultilayerParams p_;
  LatticeScales sc_;
  ModelOptions opt_;
  int bands_ = 0;
  std::vector<BlochPoint> grid_;
  double mu0_ = 0.0, mu_f_ = 0.0;
  std::vector<double> vh_;
  int iterations_ = 0;
  void solve_occupations();
};

// First-order shift of the chemical potential, in E_2D units.
double delta_mu(const MultilayerModel& m);
double delta_mu(const MultilayerParams& p, const ModelOptions& opt = {});

struct MultilayerKappa {
  double kappa_ratio = 1.0;  // κ/κ₀ with κ₀ = (1/n²) dn/dE_2D
  double inv_ratio = 1.0;    // dμ/dE_2D
  int occupied_bands = 1;
  bool band_crossing = false;  // a band bottom lies inside the difference stencil
};
MultilayerKappa multilayer_kappa(const MultilayerParams& p, double rel_step = 2e-3, const ModelOptions& opt = {});

// Reciprocal-lattice indices m ∈ [−(M−1)/2, (M−1)/2] label rows and columns.
// In-plane limit q_z = 0, q⊥ → 0 at fixed s = ω/(q⊥ v_F), v_F the 2D Fermi
// speed ħ√(4πn_2D)/m.
// Everything but the intraband dynamic factor is independent of s and built once.
class InplaneResponse {
 public:
  explicit InplaneResponse(const MultilayerModel& m);
  Eigen::MatrixXcd matrix(double s) const;

 private:
  const MultilayerModel* m_;
  std::vector<std::vector<Eigen::VectorXd>> form_;  // [band][node] intraband form factors
  Eigen::MatrixXd static_;                          // interband, s-independent
};
Eigen::MatrixXcd collective_matrix_inplane(const MultilayerModel& m, double s);

// Axial limit q⊥ = 0 at quasi-momentum q_z (units of G) and frequency ω
// (E_R/ħ). The Bloch data at κ_z + q_z are built once per q_z.
class AxialResponse {
 public:
  AxialResponse(const MultilayerModel& m, double qz);
  Eigen::MatrixXcd matrix(double omega) const;
  double qz() const { return qz_; }

 private:
  struct Transition {
    std::vector<double> weight;                 // π(N_b − N_b′) per node
    std::vector<double> gap;                    // ε_b′(κ + q_z) − ε_b(κ) per node
    std::vector<Eigen::VectorXd> rho;           // channel amplitudes per node
  };
  const MultilayerModel* m_;
  double qz_;
  std::vector<Transition> transitions_;
};
Eigen::MatrixXcd collective_matrix_axial(const MultilayerModel& m, double qz, double omega);

struct MultilayerMode {
  zs::ModeSolution mode;
  bool in_excited_continuum = false;
};
// Lower edge of the lowest-band continuum and the excited-band edges, in v_F.
std::vector<double> continuum_edges_inplane(const MultilayerModel& m);
// All underdamped roots of Re det(1 − M) for s ∈ (1, s_max], ascending.
std::vector<MultilayerMode> solve_modes_inplane(const MultilayerModel& m, double s_max = 5.0, int scan_points = 400);

struct KohnResult {
  bool found = false;
  double omega_over_ho = 0.0;
  double damping_over_ho = 0.0;
  double gap_over_ho = 0.0;  // bare lowest interband gap at κ_z = 0
  std::string note;
};
// Dominant underdamped root for axial momentum transfer q_z (units of G). The
// model should carry Hartree bands; the parameter overload builds one.
KohnResult kohn_mode(const MultilayerModel& m, double qz = 0.02, double omega_max_over_ho = 3.0,
                     int scan_points = 1200);
KohnResult kohn_mode(const MultilayerParams& p, double qz = 0.02, ModelOptions opt = {});

}  // namespace dipolar::ml
