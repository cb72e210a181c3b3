#include "dipolar/zerosound.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "dipolar/constants.hpp"
#include "dipolar/hartree_fock.hpp"
#include "dipolar/potentials.hpp"
#include "dipolar/quadrature.hpp"
#include "dipolar/thermo.hpp"

namespace dipolar::zs {

using cplx = std::complex<double>;

namespace {

void require_positive_t(const ReducedState& st) {
  if (!(st.t > 0.0)) throw std::domain_error("finite-temperature response needs t > 0");
}

}  // namespace

// ---- 2D --------------------------------------------------------------------

std::complex<double> chi2d(double s, const ReducedState& st) {
  if (!(s > 0.0)) throw std::domain_error("chi2d: s must be positive");
  if (st.t == 0.0) {
    if (s <= 1.0) throw std::domain_error("chi2d at t = 0 is only tabulated outside the continuum");
    return (s / std::sqrt(s * s - 1.0) - 1.0) / (4.0 * pi);
  }
  const thermo::OccupationKernel occ{st.t, st.mu0};
  const double X = occ.x_max();
  const quad::Options opt{1e-10, 1e-15, 4000};
  // Inside the circle x < s: x = s sin φ removes the inverse-square-root edge.
  std::vector<double> phi_pts{0.0, 0.5 * pi};
  for (double e : hf::fermi_edge_points(st.mu0, st.t))
    if (e > 0.0 && e < s) phi_pts.push_back(std::asin(e / s));
  std::sort(phi_pts.begin(), phi_pts.end());
  const double inner = quad::integrate_checked(
      [&](double ph) {
        const double x = s * std::sin(ph);
        return x * occ.minus_dn_deps(x);
      },
      phi_pts, opt, "chi2d real part");
  // Outside, x = s cosh η; this is the Landau-damping part.
  double outer = 0.0;
  if (X > s) {
    std::vector<double> eta_pts{0.0, std::acosh(X / s)};
    for (double e : hf::fermi_edge_points(st.mu0, st.t))
      if (e > s && e < X) eta_pts.push_back(std::acosh(e / s));
    std::sort(eta_pts.begin(), eta_pts.end());
    outer = quad::integrate_checked(
        [&](double eta) {
          const double x = s * std::cosh(eta);
          return x * occ.minus_dn_deps(x);
        },
        eta_pts, opt, "chi2d imaginary part");
  }
  // ∫ x w dx over the full line is n₀(0)/2.
  const double re = -0.5 * occ.occupation(0.0) + s * inner;
  return cplx(re, s * outer) / (2.0 * pi);
}

double v2d_zero(const ReducedState& st) { return potentials::v2d_q(0.0, st.kfw, st.theta_E, 0.0, st.lambda); }

ModeSolution solve_zerosound_2d(const ReducedState& st, const SolveOptions& opt) {
  const double V = v2d_zero(st);
  auto sol = solve_dispersion([&](double s) { return 1.0 - V * chi2d(s, st); }, opt);
  return sol;
}

double zerosound_2d_limit(const PhysicalParams& p) {
  const double a = dipole_length(p);
  return std::sqrt(2.0 * a / (3.0 * std::sqrt(pi) * p.width_nm * 1e-9));
}

// ---- 1D --------------------------------------------------------------------

std::complex<double> chi1d(double s, const ReducedState& st) {
  if (!(s > 0.0)) throw std::domain_error("chi1d: s must be positive");
  if (st.t == 0.0) {
    if (s <= 1.0) throw std::domain_error("chi1d at t = 0 is only tabulated outside the continuum");
    return 1.0 / (2.0 * pi * (s * s - 1.0));
  }
  const thermo::OccupationKernel occ{st.t, st.mu0};
  const double X = std::max(occ.x_max(), s + 1.0);
  // Folding x → −x leaves PV ∫₀^X h(x)/(s − x) with h = 2x² w/(s + x);
  // subtracting h(s) makes the integrand regular.
  auto h = [&](double x) { return 2.0 * x * x * occ.minus_dn_deps(x) / (s + x); };
  const double hs = h(s);
  auto pts = hf::fermi_edge_points(st.mu0, st.t);
  pts.push_back(s);
  std::vector<double> all{0.0, X};
  for (double p : pts)
    if (p > 0.0 && p < X) all.push_back(p);
  // The subtraction cancels terms of size |h(s)|; accuracy is judged against that.
  const quad::Options opt{1e-10, 1e-13 * std::max(1.0, std::abs(hs)), 4000};
  const double reg = quad::integrate_checked(
      [&](double x) { return x == s ? 0.0 : (h(x) - hs) / (s - x); }, all, opt, "chi1d principal value");
  const double re = reg + hs * std::log(s / (X - s));
  const double im = pi * occ.minus_dn_deps(s) * s;
  return cplx(re, im) / (2.0 * pi);
}

double v1d_zero(const ReducedState& st) { return potentials::v1d_q(0.0, st.kfw, st.theta_E, st.lambda); }

ModeSolution solve_zerosound_1d(const ReducedState& st, const SolveOptions& opt) {
  const double V = v1d_zero(st);
  return solve_dispersion([&](double s) { return 1.0 - V * chi1d(s, st); }, opt);
}

double zerosound_1d_limit(const PhysicalParams& p) {
  const double a = dipole_length(p);
  const double w = p.width_nm * 1e-9;
  return std::sqrt(a / (6.0 * pi * w * w * fermi_scales(p).k_F0));
}

// ---- 3D --------------------------------------------------------------------

LandauParams landau_params(double lambda3d, double theta_q) {
  const double p2 = legendre_p2(std::cos(theta_q));
  const double pi4 = pi * pi * pi * pi;
  return {64.0 * pi4 * lambda3d * p2, 0.6 * 32.0 * pi4 * lambda3d * p2};
}

std::complex<double> det_3d(const Chi3dBlock& c, const LandauParams& f) {
  const cplx m00 = c.chi00_00 * f.f00_0, m01 = c.chi10_00 * f.f11_0;
  const cplx m10 = c.chi10_00 * f.f00_0, m11 = c.chi11_00 * f.f11_0;
  return (1.0 - m00) * (1.0 - m11) - m01 * m10;
}

// S(y) = y³ I(y) (so Σ = 2πλ P₂ S) and S'(y), splined in u with
// y = 1 + c sinh u: nodes cluster at y = 1, where S' carries a thermally
// smoothed logarithmic kink of width ~t.
struct QuasiparticleSurface3D::Impl {
  ReducedState st;
  double c = 0.0;
  double y_lo = 1e-3;
  double S_lo = 0.0, dS_lo = 0.0;
  double sigma_bound = 0.0;
  double xmax = 0.0;
  std::unique_ptr<boost::math::interpolators::cardinal_cubic_b_spline<double>> S, dS;

  double u_of(double y) const { return std::asinh((y - 1.0) / c); }
};

QuasiparticleSurface3D::QuasiparticleSurface3D(const ReducedState& st) : impl_(std::make_unique<Impl>()) {
  require_positive_t(st);
  if (st.dimension != Dimension::Three) throw std::domain_error("QuasiparticleSurface3D needs a 3D state");
  auto& m = *impl_;
  m.st = st;
  m.c = std::max(st.t, 1e-3) / 8.0;
  m.sigma_bound = 2.0 * pi * st.lambda * 1.2;
  m.xmax = std::sqrt(std::max(st.mu0, 0.0) + 40.0 * st.t + m.sigma_bound);
  // k_F(θ) ≥ k_F,min, so y = x/k_F(θ) stays below xmax/k_F,min.
  const double s1 = hf::radial3d(1.0, st.t, st.mu0);
  const double kf_min =
      std::sqrt(std::max(std::min(1.0 - 2.0 * pi * st.lambda * s1, 1.0 + pi * st.lambda * s1), 1e-6));
  const double y_hi = m.xmax / kf_min + 0.5;
  const int n = 700;
  const double u0 = m.u_of(m.y_lo), u1 = m.u_of(y_hi);
  const double h = (u1 - u0) / (n - 1);
  std::vector<double> S(n), dS(n);
  for (int i = 0; i < n; ++i) {
    const double y = 1.0 + m.c * std::sinh(u0 + h * i);
    S[i] = y * y * y * hf::radial3d(y, st.t, st.mu0);
    dS[i] = hf::radial3d_dk(y, st.t, st.mu0);
  }
  m.S_lo = S.front();
  m.dS_lo = dS.front();
  using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
  m.S = std::make_unique<Spline>(S.begin(), S.end(), u0, h);
  m.dS = std::make_unique<Spline>(dS.begin(), dS.end(), u0, h);
}

QuasiparticleSurface3D::~QuasiparticleSurface3D() = default;

const ReducedState& QuasiparticleSurface3D::state() const { return impl_->st; }

double QuasiparticleSurface3D::x_max() const { return impl_->xmax; }

double QuasiparticleSurface3D::fermi_momentum(double theta_k) const {
  const auto& m = *impl_;
  const double s1 = (*m.S)(0.0);  // u = 0 is y = 1
  const double kf2 = 1.0 - 2.0 * pi * m.st.lambda * legendre_p2(std::cos(theta_k)) * s1;
  return std::sqrt(std::max(kf2, 1e-12));
}

QuasiparticleSurface3D::Local QuasiparticleSurface3D::at(double x, double theta_k) const {
  const auto& m = *impl_;
  // Σ⁰(x, θ) = Σ(x·k_F0/k_F(θ)): the radial profile is moved onto the
  // distorted surface by rescaling rather than shifting, so Σ⁰ stays regular
  // (and θ-independent) at the origin. Near k_F the two agree to O(λ²).
  const double kf = fermi_momentum(theta_k);
  const double y = x / kf;
  double S, dS;
  if (y >= m.y_lo) {
    const double u = m.u_of(y);
    S = (*m.S)(u);
    dS = (*m.dS)(u);
  } else {
    // S ∝ y² below the first node.
    const double r = y / m.y_lo;
    S = m.S_lo * r * r;
    dS = m.dS_lo * r;
  }
  const double ct = std::cos(theta_k), stn = std::sin(theta_k);
  const double p2 = legendre_p2(ct), dp2 = -3.0 * ct * stn;
  const double lam = m.st.lambda;
  Local l;
  l.energy = x * x + 2.0 * pi * lam * p2 * S;
  l.x_radial = x + pi * lam * p2 * dS / kf;
  l.x_angular = x > 0.0 ? pi * lam * dp2 * S / x : 0.0;
  return l;
}

namespace {

struct Vec3c {
  std::array<cplx, 3> v{};
  Vec3c& operator+=(const Vec3c& o) {
    for (int i = 0; i < 3; ++i) v[i] += o.v[i];
    return *this;
  }
  Vec3c& operator-=(const Vec3c& o) {
    for (int i = 0; i < 3; ++i) v[i] -= o.v[i];
    return *this;
  }
  friend Vec3c operator+(Vec3c a, const Vec3c& b) { return a += b; }
  friend Vec3c operator-(Vec3c a, const Vec3c& b) { return a -= b; }
  friend Vec3c operator*(Vec3c a, double s) {
    for (auto& z : a.v) z *= s;
    return a;
  }
  friend double abs(const Vec3c& a) {
    return std::max({std::abs(a.v[0]), std::abs(a.v[1]), std::abs(a.v[2])});
  }
};

// ∫₀^{2π} dφ cosⁿφ / (c − d cos φ − i0), n = 0, 1, 2.
std::array<cplx, 3> azimuthal_moments(double c, double d) {
  const double two_pi = 2.0 * pi;
  if (std::abs(c) > std::abs(d)) {
    const double r = std::sqrt((c - d) * (c + d));
    const double den = r * (std::abs(c) + r);
    return {cplx(std::copysign(two_pi / r, c)), cplx(two_pi * d / den), cplx(two_pi * c / den)};
  }
  // Resonant: the principal value of J₀ vanishes and the pole contributes.
  const double r = std::sqrt((d - c) * (d + c));
  const cplx j0(0.0, two_pi / r);
  const cplx j1 = (c * j0 - two_pi) / d;
  return {j0, j1, c * j1 / d};
}

template <class F>
void add_roots(F&& f, double a, double b, int samples, std::vector<double>& out) {
  double xp = a, fp = f(a);
  for (int i = 1; i <= samples; ++i) {
    const double x = a + (b - a) * i / samples;
    const double fx = f(x);
    if (fp == 0.0) out.push_back(xp);
    else if (std::signbit(fp) != std::signbit(fx) && fx != 0.0)
      out.push_back(roots::bracketed(f, xp, x, 1e-14, "resonance boundary"));
    xp = x;
    fp = fx;
  }
}

// Scans every gap of a sorted breakpoint list, so the sampling follows the
// thermal clustering of the energy levels.
template <class F>
void add_roots_between(F&& f, const std::vector<double>& pts, int samples, std::vector<double>& out) {
  std::vector<double> found;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (pts[i + 1] > pts[i]) add_roots(f, pts[i], pts[i + 1], samples, found);
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  out.insert(out.end(), found.begin(), found.end());
}

}  // namespace

Chi3dBlock chi3d_block(const QuasiparticleSurface3D& qp, double theta_q, double s, double rel_tol) {
  const auto& st = qp.state();
  const thermo::OccupationKernel occ{st.t, st.mu0};
  const double ctq = std::cos(theta_q), stq = std::sin(theta_q);
  const double xmax = qp.x_max();
  const double sqrt3 = std::sqrt(3.0);
  const double norm = 1.0 / (8.0 * pi * pi * pi);
  const quad::Options inner_opt{0.1 * rel_tol, 1e-16, 2000};
  const bool axial = std::abs(stq) < 1e-12;

  auto slice = [&](double th) -> Vec3c {
    const double ct = std::cos(th), stn = std::sin(th);
    auto eps = [&](double x) { return qp.at(x, th).energy; };
    auto level = [&](double e, double fallback) {
      auto f = [&](double x) { return eps(x) - e; };
      if (f(0.0) >= 0.0 || f(xmax) <= 0.0) return fallback;
      return roots::bracketed(f, 0.0, xmax, 1e-14, "energy level");
    };
    const double xa = level(st.mu0 - 40.0 * st.t, 0.0);
    const double xb = level(st.mu0 + 40.0 * st.t, xmax);
    if (!(xb > xa)) return Vec3c{};
    std::vector<double> pts{xa, xb};
    for (double k : {0.0, -2.0, 2.0, -6.0, 6.0, -15.0, 15.0}) {
      const double x = level(st.mu0 + k * st.t, -1.0);
      if (x > xa && x < xb) pts.push_back(x);
    }
    auto coeffs = [&](double x, double& c, double& d) {
      const auto l = qp.at(x, th);
      c = s - (l.x_radial * ct * ctq - l.x_angular * ctq * stn);
      d = l.x_radial * stn * stq + l.x_angular * stq * ct;
    };
    std::sort(pts.begin(), pts.end());
    if (!axial) {
      const auto levels = pts;
      add_roots_between([&](double x) { double c, d; coeffs(x, c, d); return c - d; }, levels, 16, pts);
      add_roots_between([&](double x) { double c, d; coeffs(x, c, d); return c + d; }, levels, 16, pts);
    }

    const double a0 = ct * ctq, a1 = stn * stq;
    const double q = 1.0 / (4.0 * pi);
    if (axial) {
      // d ≡ 0: the azimuthal integral is 2π/(c − i0), a simple pole in x.
      auto c_of = [&](double x) { double c, d; coeffs(x, c, d); return c; };
      auto G = [&](double x) -> Vec3c {
        const double w = occ.minus_dn_deps_at_energy(qp.at(x, th).energy);
        Vec3c r;
        r.v[0] = q;
        r.v[1] = sqrt3 * q * a0;
        r.v[2] = 3.0 * q * a0 * a0;
        return r * (2.0 * pi * w * x * x * stn * norm);
      };
      std::vector<double> poles;
      add_roots_between(c_of, pts, 16, poles);
      std::sort(pts.begin(), pts.end());
      pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
      Vec3c total;
      // Fold each pole's neighbourhood onto itself so the odd part cancels.
      std::vector<std::pair<double, double>> holes;
      for (std::size_t k = 0; k < poles.size(); ++k) {
        const double x0 = poles[k];
        double delta = std::min(x0 - xa, xb - x0);
        if (k > 0) delta = std::min(delta, 0.5 * (x0 - poles[k - 1]));
        if (k + 1 < poles.size()) delta = std::min(delta, 0.5 * (poles[k + 1] - x0));
        // Below u_min the two halves cancel to roundoff; the sliver is taken
        // from a single sample.
        const double u_min = 1e-7 * std::max(1.0, x0);
        auto folded = [&](double u) -> Vec3c {
          const double xl = x0 - u, xr = x0 + u;
          return G(xl) * (s / c_of(xl) - 1.0) + G(xr) * (s / c_of(xr) - 1.0);
        };
        if (delta > 10.0 * u_min) {
          holes.emplace_back(x0 - delta, x0 + delta);
          std::vector<double> us{u_min, delta};
          for (double p : pts)
            if (std::abs(p - x0) > u_min && std::abs(p - x0) < delta) us.push_back(std::abs(p - x0));
          std::sort(us.begin(), us.end());
          total += folded(u_min) * u_min;
          total += quad::integrate(folded, us, inner_opt).value;
        }
        const double hc = 1e-7 * std::max(1.0, x0);
        const double slope = (c_of(x0 + hc) - c_of(x0 - hc)) / (2.0 * hc);
        Vec3c res = G(x0) * (pi * s / std::abs(slope));
        for (auto& z : res.v) z = cplx(0.0, z.real());
        total += res;
      }
      std::vector<double> all = pts;
      for (auto [l, r] : holes) {
        all.push_back(l);
        all.push_back(r);
      }
      std::sort(all.begin(), all.end());
      auto regular = [&](double x) -> Vec3c { return G(x) * (s / c_of(x) - 1.0); };
      for (std::size_t i = 0; i + 1 < all.size(); ++i) {
        const double l = all[i], r = all[i + 1];
        bool inside = false;
        for (auto [hl, hr] : holes)
          if (l >= hl - 1e-15 && r <= hr + 1e-15) inside = true;
        if (!inside && r > l) total += quad::integrate(regular, std::vector<double>{l, r}, inner_opt).value;
      }
      return total;
    }
    auto f = [&](double x) -> Vec3c {
      const auto l = qp.at(x, th);
      const double w = occ.minus_dn_deps_at_energy(l.energy);
      if (w == 0.0) return Vec3c{};
      const double c = s - (l.x_radial * ct * ctq - l.x_angular * ctq * stn);
      const double d = l.x_radial * stn * stq + l.x_angular * stq * ct;
      const auto J = azimuthal_moments(c, d);
      auto moment = [&](double p0, double p1, double p2) {
        return s * (p0 * J[0] + p1 * J[1] + p2 * J[2]) - (2.0 * pi * p0 + pi * p2);
      };
      Vec3c r;
      r.v[0] = moment(q, 0.0, 0.0);
      r.v[1] = moment(sqrt3 * q * a0, sqrt3 * q * a1, 0.0);
      r.v[2] = moment(3.0 * q * a0 * a0, 6.0 * q * a0 * a1, 3.0 * q * a1 * a1);
      return r * (w * x * x * stn * norm);
    };
    return quad::integrate_sqrt_ends(f, pts, inner_opt).value;
  };

  const quad::Options outer_opt{rel_tol, 1e-15, 2000};
  auto res = quad::integrate(slice, std::vector<double>{0.0, 0.5 * pi, pi}, outer_opt);
  if (!res.converged && !(res.error <= 100.0 * std::max(outer_opt.abs_tol, rel_tol * abs(res.value))))
    throw NumericError("chi3d_block: angular quadrature did not converge");
  return {res.value.v[0], res.value.v[1], res.value.v[2]};
}

Chi3dBlock chi3d_block(double theta_q, double s, const ReducedState& st) {
  const QuasiparticleSurface3D qp(st);
  return chi3d_block(qp, theta_q, s);
}

ModeSolution solve_zerosound_3d(const QuasiparticleSurface3D& qp, double theta_q, const SolveOptions& opt) {
  const auto f = landau_params(qp.state().lambda, theta_q);
  auto sol = solve_dispersion([&](double s) { return det_3d(chi3d_block(qp, theta_q, s), f); }, opt);
  sol.theta_q = theta_q;
  return sol;
}

ModeSolution solve_zerosound_3d(double theta_q, const ReducedState& st, const SolveOptions& opt) {
  const QuasiparticleSurface3D qp(st);
  return solve_zerosound_3d(qp, theta_q, opt);
}

bool mode_exists_3d(double lambda3d, double t, const std::vector<double>& theta_grid, const SolveOptions& opt) {
  ReducedState st;
  st.dimension = Dimension::Three;
  st.lambda = lambda3d;
  st.t = t;
  st.mu0 = thermo::mu0_reduced(Dimension::Three, t);
  const QuasiparticleSurface3D qp(st);
  for (double th : theta_grid)
    if (solve_zerosound_3d(qp, th, opt).converged) return true;
  return false;
}

CeilingResult zerosound_ceiling_3d(double lambda3d, const std::vector<double>& theta_grid, double t_lo, double t_hi,
                                   double t_tol, const SolveOptions& opt) {
  if (!(t_lo > 0.0 && t_hi > t_lo)) throw std::domain_error("zerosound_ceiling_3d needs 0 < t_lo < t_hi");
  CeilingResult r;
  r.t_below = t_lo;
  r.t_above = t_hi;
  if (!mode_exists_3d(lambda3d, t_lo, theta_grid, opt) || mode_exists_3d(lambda3d, t_hi, theta_grid, opt)) return r;
  r.bracketed = true;
  while (r.t_above - r.t_below > t_tol) {
    const double mid = 0.5 * (r.t_below + r.t_above);
    (mode_exists_3d(lambda3d, mid, theta_grid, opt) ? r.t_below : r.t_above) = mid;
  }
  return r;
}

}  // namespace dipolar::zs
