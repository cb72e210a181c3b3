#include "dipolar/multilayer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "dipolar/constants.hpp"
#include "dipolar/quadrature.hpp"
#include "dipolar/roots.hpp"
#include "dipolar/units.hpp"

namespace dipolar::ml {

namespace {

using cd = std::complex<double>;
using Gauss32 = boost::math::quadrature::gauss<double, 32>;

constexpr double kThermalCut = 40.0;  // f is negligible beyond this many τ

double softplus_occupation(double mu, double e, double tau) {
  if (tau <= 0.0) return std::max(mu - e, 0.0);
  const double x = (mu - e) / tau;
  return x > 0.0 ? tau * (x + std::log1p(std::exp(-x))) : tau * std::log1p(std::exp(x));
}

double fermi(double x, double tau) {
  if (tau <= 0.0) return x < 0.0 ? 1.0 : (x > 0.0 ? 0.0 : 0.5);
  const double y = x / tau;
  return y > 0.0 ? std::exp(-y) / (1.0 + std::exp(-y)) : 1.0 / (1.0 + std::exp(y));
}

double minus_fermi_prime(double x, double tau) {
  const double f = fermi(x, tau);
  return f * (1.0 - f) / tau;
}

// Σ_q a_q b_{q+shift} over the common index range.
double correlate(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b, int shift) {
  const int n = static_cast<int>(a.size());
  const int lo = std::max(0, -shift), hi = std::min(n, n - shift);
  double acc = 0.0;
  for (int i = lo; i < hi; ++i) acc += a[i] * b[i + shift];
  return acc;
}

// Midpoint grid over [−½, ½); it avoids the degenerate points κ = 0, ±½ of the free bands.
std::vector<double> bz_grid(int K) {
  std::vector<double> g(K);
  for (int i = 0; i < K; ++i) g[i] = -0.5 + (i + 0.5) / K;
  return g;
}

double fold(double kz, int& shift) {
  shift = 0;
  while (kz >= 0.5) {
    kz -= 1.0;
    ++shift;
  }
  while (kz < -0.5) {
    kz += 1.0;
    --shift;
  }
  return kz;
}

int half_channels(const MultilayerModel& m) { return (m.params().lattice.M_size - 1) / 2; }

double band_min(const MultilayerModel& m, int b) {
  double e = std::numeric_limits<double>::infinity();
  for (const auto& p : m.grid()) e = std::min(e, p.energy[b]);
  return e;
}

struct SurfaceNode {
  double kz, weight, kperp2;
  int band;
  BlochPoint bloch;
};

// T = 0 Fermi surface on κ_z ∈ [0, ½] (the other half follows by reflection)
// with weights uniform in κ_z, normalised to one.
std::vector<SurfaceNode> fermi_surface(const MultilayerModel& m) {
  const double muF = m.mu_T0();
  const int nb = m.bands();
  std::vector<SurfaceNode> nodes;
  for (int b = 0; b < m.occupied_bands(); ++b) {
    auto e = [&](double k) { return m.bloch(k, b + 1).energy[b] - muF; };
    const double e0 = e(0.0), e1 = e(0.5);
    double a = 0.0, c = 0.5;
    if (e0 >= 0.0 && e1 >= 0.0) continue;
    if (e0 < 0.0 && e1 >= 0.0) c = roots::bracketed(e, 0.0, 0.5, 1e-13, "band Fermi point");
    if (e0 >= 0.0 && e1 < 0.0) a = roots::bracketed(e, 0.0, 0.5, 1e-13, "band Fermi point");
    const auto& x = Gauss32::abscissa();
    const auto& w = Gauss32::weights();
    const double mid = 0.5 * (a + c), half = 0.5 * (c - a);
    for (std::size_t j = 0; j < x.size(); ++j) {
      for (int sg : {-1, 1}) {
        if (x[j] == 0.0 && sg < 0) continue;
        const double k = mid + sg * half * x[j];
        auto bp = m.bloch(k, nb);
        const double kp2 = muF - bp.energy[b];
        nodes.push_back({k, half * w[j], std::max(kp2, 0.0), b, std::move(bp)});
      }
    }
  }
  double total = 0.0;
  for (const auto& n : nodes) total += n.weight;
  if (!(total > 0.0)) throw NumericError("empty Fermi surface");
  for (auto& n : nodes) n.weight /= total;
  return nodes;
}

// Per-energy-shell in-plane Lindhard factor for a = ω/(q v) on that shell.
cd shell_factor(double a) {
  if (a > 1.0) return cd(a / std::sqrt(a * a - 1.0) - 1.0, 0.0);
  return cd(-1.0, a / std::sqrt(1.0 - a * a));
}

}  // namespace

void LatticeSpec::validate() const {
  if (!(V0 >= 0.0) || !std::isfinite(V0)) throw std::domain_error("lattice depth must be ≥ 0");
  if (!(lambda_nm > 0.0)) throw std::domain_error("lattice period must be positive");
  if (N < 2) throw std::domain_error("need at least 5 plane waves");
  if (M_size < 1 || M_size % 2 == 0 || M_size > 2 * N + 1) throw std::domain_error("M_size must be odd and ≤ 2N + 1");
}

void MultilayerParams::validate() const {
  lattice.validate();
  if (!(mass_amu > 0.0)) throw std::domain_error("mass must be positive");
  if (!(dipole_debye >= 0.0)) throw std::domain_error("dipole moment must be ≥ 0");
  if (!(n2d > 0.0)) throw std::domain_error("density must be positive");
  if (!(temperature_nK >= 0.0)) throw std::domain_error("temperature must be ≥ 0");
}

LatticeScales lattice_scales(const MultilayerParams& p) {
  LatticeScales s;
  const double m = p.mass_amu * si::amu;
  s.G = 2.0 * pi / (p.lattice.lambda_nm * 1e-9);
  s.E_R = si::hbar * si::hbar * s.G * s.G / (2.0 * m);
  s.tau = si::k_B * p.temperature_nK * 1e-9 / s.E_R;
  s.e2d = 4.0 * pi * p.n2d * 1e4 / (s.G * s.G);
  PhysicalParams pp;
  pp.mass_amu = p.mass_amu;
  pp.dipole_debye = p.dipole_debye;
  s.coupling = dipole_length(pp) * s.G / (3.0 * pi * pi);
  s.omega_ho = std::sqrt(p.lattice.V0);
  return s;
}

BlochPoint bloch_point(const LatticeSpec& spec, double kz, int bands) { return bloch_point(spec, kz, bands, {}); }

BlochPoint bloch_point(const LatticeSpec& spec, double kz, int bands, const std::vector<double>& harmonics) {
  const int n = 2 * spec.N + 1;
  if (bands < 1 || bands > n) throw std::domain_error("band count out of range");
  Eigen::VectorXd diag(n), off(n - 1);
  for (int i = 0; i < n; ++i) {
    const double q = i - spec.N;
    diag[i] = (kz - q) * (kz - q) + 0.5 * spec.V0;
  }
  off.setConstant(-0.25 * spec.V0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  if (harmonics.empty()) {
    es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  } else {
    // ⟨q|V|q′⟩ = v_{|q − q′|}.
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    H.diagonal() = diag;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const auto m = static_cast<std::size_t>(std::abs(i - j));
        if (m < harmonics.size()) H(i, j) += harmonics[m];
        if (m == 1) H(i, j) += -0.25 * spec.V0;
      }
    es.compute(H);
  }
  if (es.info() != Eigen::Success) throw NumericError("Bloch diagonalisation failed");
  BlochPoint bp;
  bp.kz = kz;
  bp.energy = es.eigenvalues().head(bands);
  bp.u = es.eigenvectors().leftCols(bands);
  for (int b = 0; b < bands; ++b) {
    Eigen::Index imax;
    bp.u.col(b).cwiseAbs().maxCoeff(&imax);
    if (bp.u(imax, b) < 0.0) bp.u.col(b) *= -1.0;
  }
  return bp;
}

BlochData bloch_solve(const LatticeSpec& spec, const std::vector<double>& kz_grid, int bands) {
  spec.validate();
  BlochData d{spec, bands, {}};
  d.points.reserve(kz_grid.size());
  for (double k : kz_grid) d.points.push_back(bloch_point(spec, k, bands));
  return d;
}

double harmonic_length_nm(const MultilayerParams& p) {
  if (!(p.lattice.V0 > 0.0)) throw std::domain_error("harmonic length needs V0 > 0");
  const double G = 2.0 * pi / p.lattice.lambda_nm;
  return std::sqrt(2.0) / (G * std::pow(p.lattice.V0, 0.25));
}

double matched_width_nm(const MultilayerParams& p) { return std::sqrt(2.0) * harmonic_length_nm(p); }

MultilayerModel::MultilayerModel(const MultilayerParams& p, const ModelOptions& opt) : p_(p), opt_(opt) {
  p_.validate();
  if (opt_.kz_points < 8 || opt_.kz_points % 2 != 0) throw std::domain_error("need an even κ_z grid of at least 8 points");
  sc_ = lattice_scales(p_);
  bands_ = std::min(2 * p_.lattice.N + 1, std::max(4, opt_.extra_bands + 2));
  solve_occupations();
  if (!opt_.hartree_bands) return;
  // Anderson mixing of the Hartree harmonics v_m = 2πg ρ_m, m ≥ 1; v_0 only
  // shifts every level and is left out.
  const int nq = 2 * p_.lattice.N + 1;
  const double beta = 0.5;
  const int depth = 6;
  vh_.assign(nq, 0.0);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(nq - 1), v_prev, r_prev;
  std::vector<Eigen::VectorXd> dv, dr;
  for (iterations_ = 1; iterations_ <= opt_.max_iterations; ++iterations_) {
    Eigen::VectorXd target = Eigen::VectorXd::Zero(nq - 1);
    for (const auto& pt : grid_)
      for (int b = 0; b < bands_; ++b) {
        const double occ = sheet_occupation(pt.energy[b]);
        if (occ == 0.0) continue;
        for (int m = 1; m < nq; ++m) target[m - 1] += occ * correlate(pt.u.col(b), pt.u.col(b), m);
      }
    target *= 2.0 * pi * sc_.coupling / grid_.size();
    const Eigen::VectorXd r = target - v;
    if (r.lpNorm<Eigen::Infinity>() < 1e-10 * std::max(1.0, target.lpNorm<Eigen::Infinity>())) return;
    if (iterations_ > 1) {
      dv.push_back(v - v_prev);
      dr.push_back(r - r_prev);
      if (static_cast<int>(dv.size()) > depth) {
        dv.erase(dv.begin());
        dr.erase(dr.begin());
      }
    }
    v_prev = v;
    r_prev = r;
    Eigen::VectorXd next = v + beta * r;
    if (!dr.empty()) {
      Eigen::MatrixXd R(nq - 1, dr.size()), V(nq - 1, dv.size());
      for (std::size_t j = 0; j < dr.size(); ++j) {
        R.col(j) = dr[j];
        V.col(j) = dv[j];
      }
      const Eigen::VectorXd gamma = R.colPivHouseholderQr().solve(r);
      next -= (V + beta * R) * gamma;
    }
    v = next;
    for (int m = 1; m < nq; ++m) vh_[m] = v[m - 1];
    solve_occupations();
  }
  throw NumericError("Hartree bands did not converge");
}

BlochPoint MultilayerModel::bloch(double kz, int bands) const { return bloch_point(p_.lattice, kz, bands, vh_); }

void MultilayerModel::solve_occupations() {
  const int nmax = 2 * p_.lattice.N + 1;
  const auto kz = bz_grid(opt_.kz_points);
  const double inv_k = 1.0 / opt_.kz_points;
  for (;;) {
    // The midpoint grid is symmetric and u_q(−κ) = u_{−q}(κ) for an even potential.
    const int K = static_cast<int>(kz.size());
    grid_.assign(K, {});
    for (int i = K / 2; i < K; ++i) {
      grid_[i] = bloch(kz[i], bands_);
      grid_[K - 1 - i] = {kz[K - 1 - i], grid_[i].energy, grid_[i].u.colwise().reverse()};
    }
    auto density = [&](double mu, double tau) {
      double acc = 0.0;
      for (const auto& pt : grid_)
        for (int b = 0; b < bands_; ++b) acc += softplus_occupation(mu, pt.energy[b], tau);
      return acc * inv_k - sc_.e2d;
    };
    double emin = band_min(*this, 0), emax0 = -emin;
    for (const auto& pt : grid_) emax0 = std::max(emax0, pt.energy[0]);
    // Absolute tolerance floored at a few ulps of the bracket.
    const double tol = 1e-14 * std::max(1.0, std::abs(emax0) + sc_.e2d);
    mu_f_ = roots::bracketed([&](double mu) { return density(mu, 0.0); }, emin, emax0 + sc_.e2d, tol,
                             "T = 0 chemical potential");
    if (sc_.tau > 0.0) {
      const auto [lo, hi] = roots::expand_bracket([&](double mu) { return density(mu, sc_.tau); },
                                                  emin - sc_.e2d - kThermalCut * sc_.tau, mu_f_);
      mu0_ = roots::bracketed([&](double mu) { return density(mu, sc_.tau); }, lo, hi, tol,
                              "chemical potential");
    } else {
      mu0_ = mu_f_;
    }
    const double top = std::max(mu_f_, mu0_ + kThermalCut * sc_.tau);
    int active = 0;
    while (active < bands_ && band_min(*this, active) < top) ++active;
    if (active + opt_.extra_bands <= bands_ || bands_ == nmax) break;
    bands_ = std::min(nmax, active + opt_.extra_bands);
  }
}

int MultilayerModel::occupied_bands() const {
  int n = 0;
  while (n < bands_ && band_min(*this, n) < mu_f_) ++n;
  return n;
}

double MultilayerModel::sheet_occupation(double energy) const {
  return softplus_occupation(mu0_, energy, sc_.tau);
}

double delta_mu(const MultilayerModel& m) {
  const auto& sc = m.scales();
  const int K = static_cast<int>(m.grid().size());
  const int nb = m.bands();
  const int N = m.params().lattice.N;
  const int nq = 2 * N + 1;
  const double inv_k = 1.0 / K;
  const double tau = sc.tau, mu0 = m.mu0();

  // Bands carrying thermal weight.
  int active = 0;
  while (active < nb && band_min(m, active) < mu0 + kThermalCut * tau) ++active;
  active = std::max(active, 1);

  // Hartree density harmonics ρ_q = ⟨N_b F^b_q⟩.
  Eigen::VectorXd rho = Eigen::VectorXd::Zero(2 * nq - 1);
  for (const auto& pt : m.grid())
    for (int b = 0; b < active; ++b) {
      const double occ = m.sheet_occupation(pt.energy[b]);
      if (occ == 0.0) continue;
      for (int q = -(nq - 1); q < nq; ++q) rho[q + nq - 1] += occ * correlate(pt.u.col(b), pt.u.col(b), q);
    }
  rho *= inv_k;

  quad::Options qo;
  qo.rel_tol = m.options().rel_tol;
  qo.abs_tol = 1e-15;

  const auto surface = fermi_surface(m);
  double total = 0.0;
  for (const auto& node : surface) {
    const Eigen::VectorXd uf = node.bloch.u.col(node.band);
    double hartree = 0.0;
    for (int q = -(nq - 1); q < nq; ++q) hartree += rho[q + nq - 1] * correlate(uf, uf, q);
    hartree *= 2.0 * pi;

    const double c = node.kperp2;
    double exchange = 0.0;
    for (const auto& pt : m.grid()) {
      for (int b = 0; b < active; ++b) {
        const double occ = m.sheet_occupation(pt.energy[b]);
        if (occ <= 1e-300) continue;
        const double eb = pt.energy[b];
        const double emax = tau > 0.0 ? mu0 - eb + kThermalCut * tau : mu0 - eb;
        if (!(emax > 0.0)) continue;
        std::vector<double> W(2 * nq - 1);
        double wmax = 0.0;
        for (int q = -(nq - 1); q < nq; ++q) {
          const double o = correlate(uf, pt.u.col(b), q);
          W[q + nq - 1] = o * o;
          wmax = std::max(wmax, o * o);
        }
        double acc = 0.0;
        for (int q = -(nq - 1); q < nq; ++q) {
          const double w = W[q + nq - 1];
          if (w <= 1e-15 * wmax) continue;
          const double pz = pt.kz - node.kz - q;
          const double p = pz * pz;
          double I = 0.0;
          if (p > 0.0) {
            auto g = [&](double e) {
              const double r = (e - c) * (e - c) + 2.0 * p * (e + c) + p * p;
              return fermi(eb + e - mu0, tau) * 3.0 * p / std::sqrt(r);
            };
            const double wid = std::sqrt(p * (c + p));
            std::vector<double> pts = quad::panels(0.0, emax, {c - 3.0 * wid, c, c + 3.0 * wid});
            if (tau > 0.0)
              for (double k : {-6.0, -2.0, 0.0, 2.0, 6.0}) {
                const double x = mu0 - eb + k * tau;
                if (x > 0.0 && x < emax) pts.push_back(x);
              }
            I = pi * quad::integrate(g, pts, qo).value;
          }
          acc += w * (pi * occ - I);
        }
        exchange += acc;
      }
    }
    exchange *= inv_k;
    total += node.weight * (hartree + exchange);
  }
  return sc.coupling * total / sc.e2d;
}

double delta_mu(const MultilayerParams& p, const ModelOptions& opt) { return delta_mu(MultilayerModel(p, opt)); }

MultilayerKappa multilayer_kappa(const MultilayerParams& p, double rel_step, const ModelOptions& opt) {
  if (!(rel_step > 0.0 && rel_step < 0.5)) throw std::domain_error("relative step must lie in (0, ½)");
  MultilayerParams lo = p, hi = p;
  lo.n2d *= 1.0 - rel_step;
  hi.n2d *= 1.0 + rel_step;
  const MultilayerModel ml(lo, opt), mh(hi, opt), mc(p, opt);
  const double mu_lo = ml.mu0() + delta_mu(ml) * ml.scales().e2d;
  const double mu_hi = mh.mu0() + delta_mu(mh) * mh.scales().e2d;
  MultilayerKappa r;
  r.inv_ratio = (mu_hi - mu_lo) / (mh.scales().e2d - ml.scales().e2d);
  r.kappa_ratio = 1.0 / r.inv_ratio;
  r.occupied_bands = mc.occupied_bands();
  for (int b = 0; b < mc.bands(); ++b) {
    const double e = band_min(mc, b);
    if (e > ml.mu_T0() && e <= mh.mu_T0()) r.band_crossing = true;
  }
  return r;
}

// ---- in-plane collective matrix ----------------------------------------------

InplaneResponse::InplaneResponse(const MultilayerModel& m) : m_(&m) {
  const int h = half_channels(m);
  const int M = 2 * h + 1;
  const int nb = m.bands();
  const double inv_k = 1.0 / m.grid().size();
  const double tau = m.scales().tau;
  form_.assign(nb, {});
  for (int b = 0; b < nb; ++b)
    for (const auto& pt : m.grid()) {
      Eigen::VectorXd f(M);
      for (int i = 0; i < M; ++i) f[i] = correlate(pt.u.col(b), pt.u.col(b), i - h);
      form_[b].push_back(std::move(f));
    }
  static_ = Eigen::MatrixXd::Zero(M, M);
  const double tiny = 1e-15 * m.scales().e2d;
  for (const auto& pt : m.grid()) {
    for (int b = 0; b < nb; ++b)
      for (int b2 = 0; b2 < nb; ++b2) {
        if (b == b2) continue;
        const double nA = m.sheet_occupation(pt.energy[b]), nB = m.sheet_occupation(pt.energy[b2]);
        if (std::abs(nA - nB) < tiny && nA < tiny) continue;
        const double de = pt.energy[b] - pt.energy[b2];
        const double ratio = std::abs(de) > 1e-9 ? (nA - nB) / de
                                                 : -fermi(0.5 * (pt.energy[b] + pt.energy[b2]) - m.mu0(), tau);
        Eigen::VectorXd r(M);
        for (int i = 0; i < M; ++i) r[i] = correlate(pt.u.col(b), pt.u.col(b2), -(i - h));
        static_.noalias() += (pi * ratio) * r * r.transpose();
      }
  }
  static_ *= inv_k;
}

Eigen::MatrixXcd InplaneResponse::matrix(double s) const {
  const auto& m = *m_;
  const int h = half_channels(m);
  const int M = 2 * h + 1;
  const double tau = m.scales().tau, mu0 = m.mu0();
  const double kf = std::sqrt(m.scales().e2d);
  const double inv_k = 1.0 / m.grid().size();
  quad::Options qo;
  qo.rel_tol = 1e-9;
  qo.abs_tol = 1e-13;
  Eigen::MatrixXcd chi = static_.cast<cd>();
  for (int b = 0; b < m.bands(); ++b) {
    for (std::size_t i = 0; i < m.grid().size(); ++i) {
      const double top = mu0 - m.grid()[i].energy[b];
      cd hb{};
      if (tau == 0.0) {
        if (top > 0.0) hb = pi * shell_factor(s * kf / std::sqrt(top));
      } else {
        const double emax = top + kThermalCut * tau;
        if (!(emax > 0.0)) continue;
        const double emin = std::max(0.0, top - kThermalCut * tau);
        auto g = [&](double e) {
          return e > 0.0 ? minus_fermi_prime(e - top, tau) * shell_factor(s * kf / std::sqrt(e)) : cd{};
        };
        std::vector<double> pts = quad::panels(emin, emax, {s * s * kf * kf, top - 6.0 * tau, top - 2.0 * tau, top,
                                                            top + 2.0 * tau, top + 6.0 * tau});
        hb = pi * quad::integrate_sqrt_ends(g, pts, qo).value;
      }
      if (hb == cd{}) continue;
      const auto& f = form_[b][i];
      chi.noalias() += (hb * inv_k) * (f * f.transpose()).cast<cd>();
    }
  }
  Eigen::MatrixXcd out(M, M);
  for (int r = 0; r < M; ++r) {
    const double vhat = (r == h) ? -1.0 : 2.0;
    out.row(r) = m.scales().coupling * vhat * chi.row(r);
  }
  return out;
}

Eigen::MatrixXcd collective_matrix_inplane(const MultilayerModel& m, double s) { return InplaneResponse(m).matrix(s); }

std::vector<double> continuum_edges_inplane(const MultilayerModel& m) {
  std::vector<double> edges;
  const double kf = std::sqrt(m.scales().e2d);
  for (int b = 0; b < m.occupied_bands(); ++b) edges.push_back(std::sqrt(m.mu_T0() - band_min(m, b)) / kf);
  return edges;
}

std::vector<MultilayerMode> solve_modes_inplane(const MultilayerModel& m, double s_max, int scan_points) {
  if (!(s_max > 1.0) || scan_points < 4) throw std::domain_error("need s_max > 1 and ≥ 4 scan points");
  const InplaneResponse resp(m);
  const int M = m.params().lattice.M_size;
  auto D = [&](double s) {
    return (Eigen::MatrixXcd::Identity(M, M) - resp.matrix(s)).partialPivLu().determinant();
  };
  auto re = [&](double s) { return std::real(D(s)); };
  const auto edges = continuum_edges_inplane(m);
  const double excited_edge = edges.size() > 1 ? *std::max_element(edges.begin() + 1, edges.end()) : 0.0;
  const double s_min = 1.0 + 1e-6;
  std::vector<double> grid(scan_points), vals(scan_points);
  for (int i = 0; i < scan_points; ++i) {
    grid[i] = s_min + (s_max - s_min) * i / (scan_points - 1);
    vals[i] = re(grid[i]);
  }
  int changes = 0;
  for (int i = 0; i + 1 < scan_points; ++i)
    if (std::signbit(vals[i]) != std::signbit(vals[i + 1])) ++changes;
  std::vector<MultilayerMode> out;
  for (int i = 0; i + 1 < scan_points; ++i) {
    if (std::signbit(vals[i]) == std::signbit(vals[i + 1])) continue;
    // Discrete κ_z sampling turns each shell edge at T = 0 into a sign flip
    // through infinity; those brackets are not roots.
    double s0 = 0.0;
    try {
      s0 = roots::bracketed(re, grid[i], grid[i + 1], 1e-12, "in-plane mode");
    } catch (const NumericError&) {
      continue;
    }
    if (!(std::abs(re(s0)) <= 1e-6 * std::max(std::abs(vals[i]), std::abs(vals[i + 1])))) continue;
    const double hs = 1e-5 * s0;
    const double slope = (re(s0 + hs) - re(s0 - hs)) / (2.0 * hs);
    const cd d0 = D(s0);
    MultilayerMode mm;
    auto& sol = mm.mode;
    sol.v0_over_vF = s0;
    sol.residual = std::abs(std::real(d0));
    sol.sign_changes = changes;
    sol.damping_over_qvF = slope != 0.0 ? -std::imag(d0) / slope : std::numeric_limits<double>::infinity();
    const double ratio = std::abs(sol.damping_over_qvF) / s0;
    if (ratio < 0.5 && sol.damping_over_qvF >= -1e-12) {
      if (!(sol.damping_over_qvF > 0.0)) sol.damping_over_qvF = 0.0;
      sol.converged = true;
    } else {
      sol.overdamped_flag = true;
      sol.note = "damping exceeds the small-γ regime";
    }
    mm.in_excited_continuum = s0 < excited_edge;
    if (sol.converged) out.push_back(std::move(mm));
  }
  return out;
}

// ---- axial collective matrix -------------------------------------------------

AxialResponse::AxialResponse(const MultilayerModel& m, double qz) : m_(&m), qz_(qz) {
  const int h = half_channels(m);
  const int M = 2 * h + 1;
  const int nb = m.bands();
  const int N = m.params().lattice.N;
  const int nq = 2 * N + 1;
  const auto& grid = m.grid();
  std::vector<BlochPoint> shifted;
  std::vector<int> shifts;
  for (const auto& pt : grid) {
    int sh = 0;
    const double k2 = fold(pt.kz + qz, sh);
    shifted.push_back(m.bloch(k2, nb));
    shifts.push_back(sh);
  }
  const double tiny = 1e-15 * m.scales().e2d;
  for (int b = 0; b < nb; ++b)
    for (int b2 = 0; b2 < nb; ++b2) {
      Transition t;
      double wmax = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double e1 = grid[i].energy[b], e2 = shifted[i].energy[b2];
        const double w = pi * (m.sheet_occupation(e1) - m.sheet_occupation(e2));
        wmax = std::max(wmax, std::abs(w));
        t.weight.push_back(w);
        t.gap.push_back(e2 - e1);
        Eigen::VectorXd r(M);
        for (int c = 0; c < M; ++c) {
          const int off = -(c - h) - shifts[i];
          double acc = 0.0;
          for (int q = 0; q < nq; ++q) {
            const int q2 = q + off;
            if (q2 >= 0 && q2 < nq) acc += grid[i].u(q, b) * shifted[i].u(q2, b2);
          }
          r[c] = acc;
        }
        t.rho.push_back(std::move(r));
      }
      if (wmax > tiny) transitions_.push_back(std::move(t));
    }
}

Eigen::MatrixXcd AxialResponse::matrix(double omega) const {
  const auto& m = *m_;
  const int M = m.params().lattice.M_size;
  const int K = static_cast<int>(m.grid().size());
  const double hcell = 1.0 / K;
  Eigen::MatrixXcd chi = Eigen::MatrixXcd::Zero(M, M);
  std::vector<cd> coef(K);
  for (const auto& t : transitions_) {
    std::fill(coef.begin(), coef.end(), cd{});
    // Energy denominators are linear across each cell, so ∫ A/(x − i0) is exact
    // for linear A; nearly constant x falls back to Simpson's rule.
    for (int j = 0; j < K; ++j) {
      const int j1 = (j + 1) % K;
      const double x0 = omega - t.gap[j], x1 = omega - t.gap[j1];
      const double dx = x1 - x0;
      if (std::abs(dx) < 1e-3 * std::min(std::abs(x0), std::abs(x1))) {
        const double xm = 0.5 * (x0 + x1);
        coef[j] += hcell / 6.0 * (1.0 / x0 + 2.0 / xm);
        coef[j1] += hcell / 6.0 * (1.0 / x1 + 2.0 / xm);
        continue;
      }
      if (x0 == 0.0 || x1 == 0.0) continue;  // measure-zero endpoint on the line
      double im = 0.0;
      if (x0 < 0.0 && x1 > 0.0) im = pi;
      if (x0 > 0.0 && x1 < 0.0) im = -pi;
      const cd L(std::log(std::abs(x1 / x0)), im);
      coef[j] += hcell / dx * (x1 * L / dx - 1.0);
      coef[j1] += hcell / dx * (-x0 * L / dx + 1.0);
    }
    for (int j = 0; j < K; ++j) {
      if (t.weight[j] == 0.0) continue;
      chi.noalias() += (coef[j] * t.weight[j]) * (t.rho[j] * t.rho[j].transpose()).cast<cd>();
    }
  }
  return (2.0 * m.scales().coupling) * chi;
}

Eigen::MatrixXcd collective_matrix_axial(const MultilayerModel& m, double qz, double omega) {
  return AxialResponse(m, qz).matrix(omega);
}

KohnResult kohn_mode(const MultilayerModel& m, double qz, double omega_max_over_ho, int scan_points) {
  if (!(m.params().lattice.V0 > 0.0)) throw std::domain_error("the Kohn mode needs a lattice");
  if (!(qz > 0.0 && qz < 0.5)) throw std::domain_error("q_z must lie in (0, ½)");
  if (scan_points < 4) throw std::domain_error("need ≥ 4 scan points");
  const double who = m.scales().omega_ho;
  const auto bp = m.bloch(0.0, 2);
  KohnResult r;
  r.gap_over_ho = (bp.energy[1] - bp.energy[0]) / who;
  const AxialResponse resp(m, qz);
  const int M = m.params().lattice.M_size;
  auto D = [&](double w) { return (Eigen::MatrixXcd::Identity(M, M) - resp.matrix(w)).partialPivLu().determinant(); };
  auto re = [&](double w) { return std::real(D(w)); };
  // Weight of a root in the long-wavelength density channel m = 0, the one a
  // uniform push couples to: residue of [(1 − M)⁻¹ M]₀₀.
  const int h = half_channels(m);
  auto channel_weight = [&](double w0) {
    const double dw = 1e-5 * w0;
    auto resp0 = [&](double w) {
      const Eigen::MatrixXcd Mw = resp.matrix(w);
      return ((Eigen::MatrixXcd::Identity(M, M) - Mw).partialPivLu().solve(Mw))(h, h);
    };
    return std::abs(0.5 * dw * (resp0(w0 + dw) - resp0(w0 - dw)));
  };
  // Start well above the intraband (acoustic) sector. Thermally populated
  // excited bands add satellite roots pinned to their own transition lines;
  // they carry little weight in that channel, so the strongest root wins.
  const double w_lo = 0.25 * who, w_hi = omega_max_over_ho * who;
  double best_weight = -1.0;
  int found = 0;
  double wp = w_lo, fp = re(wp);
  for (int i = 1; i < scan_points; ++i) {
    const double w = w_lo + (w_hi - w_lo) * i / (scan_points - 1);
    const double f = re(w);
    if (std::signbit(f) != std::signbit(fp)) {
      double w0 = wp;
      try {
        w0 = roots::bracketed(re, wp, w, 1e-12 * who, "Kohn mode");
      } catch (const NumericError&) {
      }
      // A sign flip through a bare transition line is a pole, not a root.
      if (std::abs(re(w0)) <= 1e-6 * std::max(std::abs(f), std::abs(fp))) {
        const double hw = 1e-6 * w0;
        const double slope = (re(w0 + hw) - re(w0 - hw)) / (2.0 * hw);
        const double gamma = slope != 0.0 ? -std::imag(D(w0)) / slope : std::numeric_limits<double>::infinity();
        if (gamma >= -1e-12 * who && gamma / w0 < 0.5) {
          ++found;
          const double weight = channel_weight(w0);
          if (weight > best_weight) {
            best_weight = weight;
            r.found = true;
            r.omega_over_ho = w0 / who;
            r.damping_over_ho = gamma > 0.0 ? gamma / who : 0.0;
          }
        }
      }
    }
    wp = w;
    fp = f;
  }
  r.note = r.found ? std::to_string(found) + " underdamped root(s); strongest kept"
                   : "no underdamped root in the scanned window";
  return r;
}

KohnResult kohn_mode(const MultilayerParams& p, double qz, ModelOptions opt) {
  opt.hartree_bands = true;
  return kohn_mode(MultilayerModel(p, opt), qz);
}

}  // namespace dipolar::ml
