// Acceptance suite: one PASS/FAIL line per criterion. Run with a criterion
// number (1-11) or with no argument for all of them.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "dipolar/constants.hpp"
#include "dipolar/hartree_fock.hpp"
#include "dipolar/lda_trap.hpp"
#include "dipolar/multilayer.hpp"
#include "dipolar/observables.hpp"
#include "dipolar/thermo.hpp"
#include "dipolar/units.hpp"
#include "dipolar/zerosound.hpp"

using namespace dipolar;

namespace {

// ---- pinned tolerances ---------------------------------------------------------

constexpr double kLawTol = 1e-3;            // 1: |κ₀/κ − (1 + π²t²/12)|
constexpr double kStabilityTol = 1e-2;      // 2: λ_c against 1/π, relative
constexpr double kVariationalTol = 3e-2;    // 2: 0.32 against λ_c, relative
constexpr double kAnchor2DTol = 2e-2;       // 3
constexpr double kAnchor1DTol = 1e-2;       // 4
const double kResidualFloor = std::pow(2.0, 3.5);  // 5
constexpr double kSmallWidthTol = 1e-2;     // 6: general vs small-k_F w form
constexpr double kQuadratureTol = 1e-3;     // 6: general vs direct quadrature
constexpr double kCeilingLo = 0.18, kCeilingHi = 0.28;  // 8
constexpr double kBlochNormTol = 1e-10;     // 9a
constexpr double kFreeBandTol = 1e-6;       // 9a
constexpr double kStrict2DTol = 0.10;       // 9b
constexpr double kPlateauLo = 1.2, kPlateauHi = 1.7;  // 9c
constexpr double kCoulombTol = 1e-3;        // 10: relative
constexpr double kGaussianTol = 0.02;       // 11
constexpr double kLocalKappaTol = 0.02;     // 11

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [fail]");
  }
};

std::string fmt(const char* f, double a) {
  char b[128];
  std::snprintf(b, sizeof b, f, a);
  return b;
}
std::string fmt(const char* f, double a, double c) {
  char b[160];
  std::snprintf(b, sizeof b, f, a, c);
  return b;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

ReducedState reduced(Dimension d, double t, double lambda, double kfw = 0.5, double theta_E = 0.0) {
  ReducedState s;
  s.dimension = d;
  s.t = t;
  s.lambda = lambda;
  s.kfw = kfw;
  s.theta_E = theta_E;
  s.mu0 = thermo::mu0_reduced(d, t);
  return s;
}

PhysicalParams krb(Dimension d, double n, double T_nK, double w_nm = 10.0, double theta_E = 0.0) {
  PhysicalParams p;
  p.dimension = d;
  p.density = n;
  p.temperature_nK = T_nK;
  p.width_nm = w_nm;
  p.theta_E = theta_E;
  return p;
}

double at_t(PhysicalParams p, double t) {
  p.temperature_nK = 0.0;
  return t * fermi_scales(p).T_F * 1e9;
}

// ---- criteria --------------------------------------------------------------------

Outcome compressibility_law_3d() {
  Outcome o;
  for (double t : {0.02, 0.05, 0.1}) {
    const double dev = std::abs(obs::kappa_ratio(reduced(Dimension::Three, t, 0.1)).inv_ratio - (1.0 + pi * pi * t * t / 12.0));
    o.require(dev < kLawTol, fmt("t=%.2f dev %.2e", t, dev));
  }
  return o;
}

Outcome stability_threshold_3d() {
  Outcome o;
  const auto lc = obs::stability_line_3d(1e-3);
  if (!lc) {
    o.require(false, "no critical coupling found");
    return o;
  }
  o.require(rel(*lc, 1.0 / pi) < kStabilityTol, fmt("lambda_c %.6f vs 1/pi rel %.2e", *lc, rel(*lc, 1.0 / pi)));
  o.require(rel(0.32, *lc) < kVariationalTol, fmt("0.32 vs lambda_c rel %.2e", rel(0.32, *lc)));
  return o;
}

Outcome zerosound_anchor_2d() {
  Outcome o;
  auto p = krb(Dimension::Two, 1e9, 0.0);
  p.temperature_nK = at_t(p, 1e-3);
  const auto m = zs::solve_zerosound_2d(reduce(p));
  const double lim = zs::zerosound_2d_limit(p);
  o.require(m.converged, "mode converged");
  o.require(rel(m.v0_over_vF, lim) < kAnchor2DTol, fmt("v0/vF %.6f vs limit %.6f", m.v0_over_vF, lim));
  return o;
}

Outcome zerosound_anchor_1d() {
  Outcome o;
  auto p = krb(Dimension::One, 1e4, 0.0, 10.0, pi / 2);
  p.temperature_nK = at_t(p, 1e-3);
  const auto m = zs::solve_zerosound_1d(reduce(p));
  const double lim = zs::zerosound_1d_limit(p);
  o.require(m.converged, "mode converged");
  o.require(rel(m.v0_over_vF, lim) < kAnchor1DTol, fmt("v0/vF %.6f vs limit %.6f", m.v0_over_vF, lim));
  return o;
}

Outcome residual_scaling() {
  using hf::Method;
  struct Pair {
    const char* name;
    Dimension d;
    std::function<double(const ReducedState&)> numeric, expansion;
  };
  const std::vector<Pair> pairs = {
      {"3D S", Dimension::Three, [](const ReducedState& s) { return hf::sigma3d(1.0, 0.0, s).sigma; },
       [](const ReducedState& s) { return hf::sigma3d(1.0, 0.0, s, Method::LowT).sigma; }},
      {"3D dS/dk", Dimension::Three, [](const ReducedState& s) { return *hf::dsigma3d_dk_kf(0.0, s).dsigma_dk; },
       [](const ReducedState& s) { return *hf::dsigma3d_dk_kf(0.0, s, Method::LowT).dsigma_dk; }},
      {"2D S", Dimension::Two, [](const ReducedState& s) { return hf::sigma2d_iso(1.0, s).sigma; },
       [](const ReducedState& s) { return hf::sigma2d_iso(1.0, s, Method::LowT).sigma; }},
      {"2D dS/dk", Dimension::Two, [](const ReducedState& s) { return *hf::dsigma2d_iso_dk_kf(s).dsigma_dk; },
       [](const ReducedState& s) { return *hf::dsigma2d_iso_dk_kf(s, Method::LowT).dsigma_dk; }},
      {"1D S", Dimension::One, [](const ReducedState& s) { return hf::sigma1d_kf(s).sigma; },
       [](const ReducedState& s) { return hf::sigma1d_kf(s, hf::Sigma1DForm::General).sigma; }},
      {"1D dS/dk", Dimension::One, [](const ReducedState& s) { return *hf::dsigma1d_dk_kf(s).dsigma_dk; },
       [](const ReducedState& s) { return *hf::dsigma1d_dk_kf(s, Method::LowT).dsigma_dk; }},
  };
  Outcome o;
  for (const auto& p : pairs) {
    auto residual = [&](double t) {
      const auto s = reduced(p.d, t, 1.0);
      return std::abs(p.numeric(s) - p.expansion(s));
    };
    const double ratio = residual(0.04) / residual(0.02);
    o.require(ratio >= kResidualFloor, std::string(p.name) + fmt(" ratio %.3f", ratio));
  }
  return o;
}

Outcome meijer_consistency_1d() {
  Outcome o;
  const double t = 0.02, lambda = 1.0;
  {
    const auto s = reduced(Dimension::One, t, lambda, 0.01, pi / 2);
    const double g = obs::kappa_ratio(s, obs::KappaMethod::LowT).inv_ratio;
    const double sw = obs::kappa_ratio(s, obs::KappaMethod::LowTSmallWidth).inv_ratio;
    o.require(rel(g, sw) < kSmallWidthTol, fmt("kfw=0.01 general vs small-width rel %.2e", rel(g, sw)));
  }
  double worst = 0.0, at = 0.0;
  for (int i = 0; i < 12; ++i) {
    const double kfw = 0.01 * std::pow(300.0, i / 11.0);
    const auto s = reduced(Dimension::One, t, lambda, kfw, pi / 2);
    const double g = obs::kappa_ratio(s, obs::KappaMethod::LowT).inv_ratio;
    const double q = obs::kappa_ratio(s, obs::KappaMethod::Numeric).inv_ratio;
    if (rel(g, q) > worst) {
      worst = rel(g, q);
      at = kfw;
    }
  }
  o.require(worst < kQuadratureTol, fmt("worst general vs quadrature rel %.2e at kfw=%.3g", worst, at));
  return o;
}

Outcome nonmonotone_2d() {
  Outcome o;
  std::vector<double> T;
  for (int i = 0; i < 40; ++i) T.push_back(0.1 * std::pow(1e4, i / 39.0));
  const auto base = krb(Dimension::Two, 1e9, 0.0);
  const auto pk = obs::kappa_vs_T_peak(base, T);
  o.require(pk.interior, fmt("interior maximum at %.3g nK", T[pk.index]));
  auto free = base;
  free.dipole_debye = 0.0;
  int rises = 0, falls = 0;
  double prev = obs::kappa_ratio([&] { auto p = free; p.temperature_nK = T[0]; return p; }()).kappa_ratio;
  for (std::size_t i = 1; i < T.size(); ++i) {
    auto p = free;
    p.temperature_nK = T[i];
    const double k = obs::kappa_ratio(p).kappa_ratio;
    (k > prev ? rises : falls) += (k != prev);
    prev = k;
  }
  o.require(rises == 0 || falls == 0, fmt("d=0 sweep monotone (%g rises, %g falls)", rises, falls));
  return o;
}

Outcome zerosound_ceiling_3d() {
  Outcome o;
  const double lambda = 1.0 / (pi * pi);
  const auto cold = zs::solve_zerosound_3d(0.0, reduced(Dimension::Three, 0.01, lambda));
  o.require(cold.converged, fmt("t=0.01 theta=0 mode v0/vF %.4f", cold.v0_over_vF));
  std::vector<double> grid;
  for (int i = 0; i < 7; ++i) grid.push_back(0.5 * pi * i / 6.0);
  o.require(!zs::mode_exists_3d(lambda, 0.25, grid), "no mode at t=0.25 on a 7-angle grid");
  const auto c = zs::zerosound_ceiling_3d(lambda, grid, 0.1, 0.25, 5e-3);
  o.require(c.bracketed && c.t_ceiling() >= kCeilingLo && c.t_ceiling() <= kCeilingHi,
            fmt("ceiling t=%.3f", c.t_ceiling()));
  return o;
}

Outcome multilayer_checks() {
  Outcome o;
  // (a) Real-space normalisation over one cell and free bands.
  double worst = 0.0;
  for (double V0 : {25.0, 100.0}) {
    ml::LatticeSpec s;
    s.V0 = V0;
    for (double kz : {0.0, 0.2, 0.5}) {
      const auto bp = ml::bloch_point(s, kz, 4);
      const int Z = 4 * (2 * s.N + 1);
      for (int b = 0; b < 4; ++b) {
        double acc = 0.0;
        for (int j = 0; j < Z; ++j) {
          const double z = static_cast<double>(j) / Z;  // cell coordinate in units of the period
          std::complex<double> phi{};
          for (int q = -s.N; q <= s.N; ++q) phi += bp.u(q + s.N, b) * std::polar(1.0, 2.0 * pi * (kz - q) * z);
          acc += std::norm(phi) / Z;
        }
        worst = std::max(worst, std::abs(acc - 1.0));
      }
    }
  }
  o.require(worst < kBlochNormTol, fmt("(a) cell norm dev %.1e", worst));
  double free_dev = 0.0;
  ml::LatticeSpec flat;
  flat.V0 = 0.0;
  for (double kz : {0.0, 0.13, 0.37, 0.5}) {
    const auto bp = ml::bloch_point(flat, kz, 5);
    std::vector<double> e;
    for (int q = -flat.N; q <= flat.N; ++q) e.push_back((kz - q) * (kz - q));
    std::sort(e.begin(), e.end());
    for (int b = 0; b < 5; ++b) free_dev = std::max(free_dev, std::abs(bp.energy[b] - e[b]));
  }
  o.require(free_dev < kFreeBandTol, fmt("(a) free-band dev %.1e", free_dev));

  // (b) Deep lattice against the strict 2D gas at matched width, low density.
  ml::MultilayerParams mp;
  mp.lattice.V0 = 100.0;
  mp.n2d = 1e6;
  mp.temperature_nK = 20.0;
  const double k_ml = ml::multilayer_kappa(mp).kappa_ratio;
  auto p2 = krb(Dimension::Two, mp.n2d, mp.temperature_nK, ml::matched_width_nm(mp));
  p2.mass_amu = mp.mass_amu;
  p2.dipole_debye = mp.dipole_debye;
  const double k_2d = obs::kappa_ratio(p2).kappa_ratio;
  o.require(rel(k_ml, k_2d) < kStrict2DTol, fmt("(b) kappa ratio %.5f vs strict 2D %.5f", k_ml, k_2d));

  // (c) Plateau of the in-plane mode speed.
  for (double n : {5e8, 1e9, 2e9}) {
    mp.n2d = n;
    const auto modes = ml::solve_modes_inplane(ml::MultilayerModel(mp));
    double s = std::numeric_limits<double>::quiet_NaN();
    for (const auto& m : modes)
      if (!m.in_excited_continuum) s = m.mode.v0_over_vF;
    o.require(s >= kPlateauLo && s <= kPlateauHi, fmt("(c) n=%.0e v0/vF %.4f", n, s));
  }

  // (d) No sloshing mode at V0 = 25 E_R.
  mp.lattice.V0 = 25.0;
  mp.n2d = 1e9;
  const auto k = ml::kohn_mode(mp);
  o.require(!k.found, k.found ? fmt("(d) V0=25 mode found at %.4f omega_ho", k.omega_over_ho) : "(d) V0=25 no mode");
  return o;
}

Outcome coulomb_extremum() {
  Outcome o;
  auto f = [](double lt) { return obs::coulomb_kappa_ratio_2d(1.0, std::exp(lt)); };
  // Coarse scan in ln t, then Brent on the bracketing cell.
  const int n = 400;
  const double a = std::log(1e-4), b = std::log(1.0);
  std::vector<double> v(n + 1);
  for (int i = 0; i <= n; ++i) v[i] = f(a + (b - a) * i / n);
  int best = -1;
  double sign = 1.0;
  for (int i = 1; i < n; ++i) {
    const bool mx = v[i] > v[i - 1] && v[i] >= v[i + 1], mn = v[i] < v[i - 1] && v[i] <= v[i + 1];
    if (mx || mn) {
      best = i;
      sign = mx ? -1.0 : 1.0;
      break;
    }
  }
  if (best < 0) {
    o.require(false, "no interior extremum on t in [1e-4, 1]");
    return o;
  }
  const auto r = boost::math::tools::brent_find_minima([&](double lt) { return sign * f(lt); },
                                                       a + (b - a) * (best - 1) / n, a + (b - a) * (best + 1) / n, 50);
  const double t_scan = std::exp(r.first), t_closed = obs::coulomb_extremum_t();
  o.require(rel(t_scan, t_closed) < kCoulombTol, fmt("t* numeric %.6e vs closed form %.6e", t_scan, t_closed));
  return o;
}

Outcome trap_lda() {
  Outcome o;
  lda::TrapSpec hot;
  hot.gas = krb(Dimension::Two, 0.0, 1e5);
  hot.trap_frequency_hz = 400.0;
  hot.particle_number = 100.0;
  {
    const auto p = lda::trap_profile(hot);
    const auto g = lda::gaussian_reference(p);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      num += (p.density[i] - g[i]) * (p.density[i] - g[i]) * p.radius_um[i];
      den += p.density[i] * p.density[i] * p.radius_um[i];
    }
    o.require(std::sqrt(num / den) < kGaussianTol, fmt("classical L2 dev %.2e", std::sqrt(num / den)));
  }
  for (double T : {20.0, 50.0}) {
    auto s = hot;
    s.gas.temperature_nK = T;
    const auto p = lda::trap_profile(s);
    const double m = s.gas.mass_amu * si::amu;
    double worst = 0.0;
    const std::size_t n = p.radius_um.size();
    for (std::size_t i = n / 10; i < 6 * n / 10; ++i) {
      const double r = p.radius_um[i] * 1e-6, dr = (p.radius_um[i + 1] - p.radius_um[i - 1]) * 1e-6;
      const double dn = (p.density[i + 1] - p.density[i - 1]) * 1e4, ns = p.density[i] * 1e4;
      worst = std::max(worst, rel(-(dn / dr) / (ns * ns * m * p.omega * p.omega * r), p.kappa_abs[i]));
    }
    o.require(worst < kLocalKappaTol, fmt("T=%.0f nK local-kappa identity dev %.2e", T, worst));
    std::size_t imax = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (p.kappa_ratio[i] > p.kappa_ratio[imax]) imax = i;
    o.require(imax > 0 && imax + 1 < n, fmt("T=%.0f nK kappa ratio peaks at r=%.2f um", T, p.radius_um[imax]));
  }
  return o;
}

struct Criterion {
  const char* title;
  double budget_s;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {"3D compressibility law", 10, compressibility_law_3d},
    {"3D stability threshold", 30, stability_threshold_3d},
    {"2D zero-sound low-T anchor", 10, zerosound_anchor_2d},
    {"1D zero-sound low-T anchor", 10, zerosound_anchor_1d},
    {"low-T expansion residual scaling", 120, residual_scaling},
    {"1D Meijer-G consistency", 60, meijer_consistency_1d},
    {"2D nonmonotone kappa vs T", 60, nonmonotone_2d},
    {"3D zero-sound temperature ceiling", 1200, zerosound_ceiling_3d},
    {"multilayer checks", 3600, multilayer_checks},
    {"Coulomb extremum", 1, coulomb_extremum},
    {"trap LDA", 120, trap_lda},
};

bool run_one(int i) {
  const auto& c = kCriteria[i - 1];
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(secs <= c.budget_s, fmt("%.1f s of %.0f s", secs, c.budget_s));
  std::printf("criterion %2d %s: %s (%s)\n", i, o.pass ? "PASS" : "FAIL", c.title, o.detail.c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  constexpr int n = static_cast<int>(sizeof kCriteria / sizeof kCriteria[0]);
  if (argc > 2) {
    std::fprintf(stderr, "usage: acceptance [criterion 1-%d]\n", n);
    return 2;
  }
  if (argc == 2) {
    const int i = std::atoi(argv[1]);
    if (i < 1 || i > n) {
      std::fprintf(stderr, "criterion must be 1-%d\n", n);
      return 2;
    }
    return run_one(i) ? 0 : 1;
  }
  bool all = true;
  for (int i = 1; i <= n; ++i) all = run_one(i) && all;
  return all ? 0 : 1;
}
