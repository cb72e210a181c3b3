#include "dipolar/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include "dipolar/constants.hpp"
#include "dipolar/errors.hpp"
#include "dipolar/lda_trap.hpp"
#include "dipolar/multilayer.hpp"
#include "dipolar/observables.hpp"
#include "dipolar/thermo.hpp"
#include "dipolar/zerosound.hpp"

namespace dipolar::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

bool lattice_quantity(Quantity q) {
  return q == Quantity::MultilayerKappa || q == Quantity::MultilayerModes || q == Quantity::Kohn;
}

// The spec with the sweep coordinate applied.
SweepSpec at(const SweepSpec& base, double x) {
  SweepSpec s = base;
  switch (s.axis) {
    case Axis::None: break;
    case Axis::Temperature:
      if (s.grid.reduced_temperature) {
        s.reduced_t = x;
      } else {
        s.reduced_t.reset();
        s.params.temperature_nK = x;
        s.lattice.temperature_nK = x;
      }
      break;
    case Axis::Density:
      s.params.density = x;
      s.lattice.n2d = x;
      break;
    case Axis::Angle:
      (s.quantity == Quantity::ZeroSound ? s.params.theta_q : s.params.theta_E) = x;
      break;
  }
  return s;
}

ReducedState state_of(const SweepSpec& s) {
  ReducedState st = reduce(s.params);
  if (s.reduced_t) {
    st.t = *s.reduced_t;
    st.mu0 = thermo::mu0_reduced(st.dimension, st.t);
  }
  if (s.lambda) st.lambda = *s.lambda;
  return st;
}

std::string axis_column(const SweepSpec& s) {
  switch (s.axis) {
    case Axis::Temperature: return s.grid.reduced_temperature ? "t_axis" : "temperature_nK";
    case Axis::Density:
      return "density_cm^-" + std::to_string(lattice_quantity(s.quantity) ? 2 : dim_value(s.params.dimension));
    case Axis::Angle: return s.quantity == Quantity::ZeroSound ? "theta_q_rad" : "theta_e_rad";
    case Axis::None: break;
  }
  return {};
}

std::vector<std::string> quantity_columns(Quantity q) {
  switch (q) {
    case Quantity::Kappa:
      return {"t", "lambda", "kfw", "kappa_over_kappa0", "kappa0_over_kappa", "kappa_J^-1m^d"};
    case Quantity::EffMass:
      return {"t", "lambda", "kfw", "k", "theta_k_rad", "m_over_mstar_radial", "m_over_mstar_angular"};
    case Quantity::ZeroSound:
      return {"t", "lambda", "kfw", "theta_q_rad", "v0_over_vF", "damping_over_qvF", "residual", "converged",
              "overdamped"};
    case Quantity::MultilayerKappa:
      return {"tau", "e2d", "kappa_over_kappa0", "kappa0_over_kappa", "occupied_bands", "band_crossing"};
    case Quantity::MultilayerModes:
      return {"tau", "e2d", "mode_count", "v0_over_vF", "damping_over_qvF", "in_excited_continuum",
              "continuum_edge_over_vF"};
    case Quantity::Kohn:
      return {"tau", "e2d", "omega_over_omega_ho", "damping_over_omega_ho", "gap_over_omega_ho", "found"};
    case Quantity::TrapProfile:
      return {"radius_um", "density_cm^-d", "gaussian_cm^-d", "kappa_over_kappa0", "kappa_J^-1m^d"};
    case Quantity::Coulomb: return {"t", "rs", "kappa0_over_kappa"};
  }
  return {};
}

SweepRow ok_row(std::vector<double> v) { return {std::move(v), "ok", RowKind::Ok, {}}; }

SweepRow mode_row(std::vector<double> v, const zs::ModeSolution& m) {
  if (m.converged) return ok_row(std::move(v));
  SweepRow r{std::move(v), "overdamped", RowKind::Flagged, m.note};
  if (!m.overdamped_flag) {
    r.status = "failed";
    r.kind = RowKind::Failed;
  }
  return r;
}

// Shared read-only data built once before dispatch.
struct Shared {
  std::unique_ptr<zs::QuasiparticleSurface3D> qp;  // 3D zero sound at fixed (t, λ)
};

std::vector<SweepRow> evaluate(const SweepSpec& s, const Shared& shared) {
  switch (s.quantity) {
    case Quantity::Kappa: {
      const ReducedState st = state_of(s);
      const auto k = obs::kappa_ratio(st, s.method);
      const auto fs = fermi_scales(s.params);
      const double kappa0 = dim_value(st.dimension) / (2.0 * density_si(s.params) * fs.E_F);
      return {ok_row({st.t, st.lambda, st.kfw, k.kappa_ratio, k.inv_ratio, k.kappa_ratio * kappa0})};
    }
    case Quantity::EffMass: {
      const ReducedState st = state_of(s);
      const auto m = obs::effective_mass(s.k, s.theta_k, st, s.method);
      return {ok_row({st.t, st.lambda, st.kfw, s.k, s.theta_k, m.m_over_mstar_radial, m.m_over_mstar_angular})};
    }
    case Quantity::ZeroSound: {
      const ReducedState st = state_of(s);
      zs::SolveOptions opt;
      if (s.tol) opt.tol = *s.tol;
      zs::ModeSolution m;
      switch (st.dimension) {
        case Dimension::Three:
          if (shared.qp) {
            m = zs::solve_zerosound_3d(*shared.qp, st.theta_q, opt);
          } else {
            const zs::QuasiparticleSurface3D qp(st);
            m = zs::solve_zerosound_3d(qp, st.theta_q, opt);
          }
          break;
        case Dimension::Two: m = zs::solve_zerosound_2d(st, opt); break;
        case Dimension::One: m = zs::solve_zerosound_1d(st, opt); break;
      }
      return {mode_row({st.t, st.lambda, st.kfw, st.theta_q, m.v0_over_vF, m.damping_over_qvF, m.residual,
                        m.converged ? 1.0 : 0.0, m.overdamped_flag ? 1.0 : 0.0},
                       m)};
    }
    case Quantity::MultilayerKappa: {
      const auto sc = ml::lattice_scales(s.lattice);
      const auto k = ml::multilayer_kappa(s.lattice, 2e-3, s.model);
      return {ok_row({sc.tau, sc.e2d, k.kappa_ratio, k.inv_ratio, static_cast<double>(k.occupied_bands),
                      k.band_crossing ? 1.0 : 0.0})};
    }
    case Quantity::MultilayerModes: {
      const ml::MultilayerModel model(s.lattice, s.model);
      const auto modes = ml::solve_modes_inplane(model, s.s_max, s.scan_points > 0 ? s.scan_points : 400);
      const auto edges = ml::continuum_edges_inplane(model);
      const double edge = edges.empty() ? kNaN : edges.front();
      // The fastest mode clear of the excited-band continua, else the fastest.
      const ml::MultilayerMode* pick = nullptr;
      for (const auto& m : modes)
        if (!m.in_excited_continuum && (!pick || m.mode.v0_over_vF > pick->mode.v0_over_vF)) pick = &m;
      if (!pick && !modes.empty()) pick = &modes.back();
      const auto& sc = model.scales();
      if (!pick)
        return {{{sc.tau, sc.e2d, 0.0, kNaN, kNaN, kNaN, edge}, "no-mode", RowKind::Flagged, "no underdamped root"}};
      return {ok_row({sc.tau, sc.e2d, static_cast<double>(modes.size()), pick->mode.v0_over_vF,
                      pick->mode.damping_over_qvF, pick->in_excited_continuum ? 1.0 : 0.0, edge})};
    }
    case Quantity::Kohn: {
      ml::ModelOptions opt = s.model;
      opt.hartree_bands = true;
      const ml::MultilayerModel model(s.lattice, opt);
      const auto k = ml::kohn_mode(model, s.qz, 3.0, s.scan_points > 0 ? s.scan_points : 1200);
      const auto& sc = model.scales();
      std::vector<double> v{sc.tau, sc.e2d, k.found ? k.omega_over_ho : kNaN, k.found ? k.damping_over_ho : kNaN,
                            k.gap_over_ho, k.found ? 1.0 : 0.0};
      if (k.found) return {ok_row(std::move(v))};
      return {{std::move(v), "absent", RowKind::Flagged, k.note}};
    }
    case Quantity::TrapProfile: {
      lda::TrapSpec ts;
      ts.gas = s.params;
      ts.trap_frequency_hz = s.trap_frequency_hz;
      ts.particle_number = s.particles;
      ts.radii = s.radii;
      const auto p = lda::trap_profile(ts);
      const auto g = lda::gaussian_reference(p);
      std::vector<SweepRow> rows;
      for (std::size_t i = 0; i < p.radius_um.size(); ++i)
        rows.push_back(ok_row({p.radius_um[i], p.density[i], g[i], p.kappa_ratio[i], p.kappa_abs[i]}));
      return rows;
    }
    case Quantity::Coulomb: {
      const double t = *s.reduced_t;
      return {ok_row({t, s.rs, obs::coulomb_kappa_ratio_2d(s.rs, t)})};
    }
  }
  return {};
}

}  // namespace

std::size_t SweepResult::count(RowKind k) const {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.kind == k;
  return n;
}

int SweepResult::exit_code() const { return count(RowKind::Failed) ? 1 : 0; }

int worker_count() {
  if (const char* env = std::getenv("DIPOLAR_WORKERS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(std::min(n, 256L));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepResult run_sweep(const SweepSpec& spec, int workers) {
  spec.validate();
  SweepResult out;
  const bool swept = spec.axis != Axis::None;
  if (swept) out.columns.push_back(axis_column(spec));
  for (auto& c : quantity_columns(spec.quantity)) out.columns.push_back(c);

  const std::vector<double> xs = swept ? spec.grid.points() : std::vector<double>{kNaN};

  Shared shared;
  if (spec.quantity == Quantity::ZeroSound && spec.params.dimension == Dimension::Three && spec.axis == Axis::Angle) {
    try {
      shared.qp = std::make_unique<zs::QuasiparticleSurface3D>(state_of(spec));
    } catch (const std::exception&) {
      // Every point reports the failure on its own row.
    }
  }

  std::vector<std::vector<SweepRow>> slots(xs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < xs.size();) {
      const SweepSpec s = swept ? at(spec, xs[i]) : spec;
      try {
        slots[i] = evaluate(s, shared);
      } catch (const std::exception& e) {
        const std::size_t n = quantity_columns(spec.quantity).size();
        slots[i] = {{std::vector<double>(n, kNaN), "failed", RowKind::Failed, e.what()}};
      }
      if (swept)
        for (auto& r : slots[i]) r.values.insert(r.values.begin(), xs[i]);
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(xs.size())));
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < n; ++k) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& s : slots)
    for (auto& r : s) out.rows.push_back(std::move(r));

  if (spec.quantity == Quantity::Coulomb) out.metadata.emplace_back("stationary_t", fmt(obs::coulomb_extremum_t()));
  if (spec.quantity == Quantity::TrapProfile && !out.rows.empty() && out.rows.front().kind == RowKind::Ok) {
    // Trapezoid over the emitted radii; the solver's own count uses a finer grid.
    const bool two = spec.params.dimension == Dimension::Two;
    double N = 0.0;
    for (std::size_t i = 1; i < out.rows.size(); ++i) {
      const auto& a = out.rows[i - 1].values;
      const auto& b = out.rows[i].values;
      const double fa = a[1] * (two ? 2.0 * pi * a[0] * 1e-8 : 2.0 * 1e-4);
      const double fb = b[1] * (two ? 2.0 * pi * b[0] * 1e-8 : 2.0 * 1e-4);
      N += 0.5 * (fa + fb) * (b[0] - a[0]);
    }
    out.metadata.emplace_back("profile_particle_number", fmt(N));
  }
  return out;
}

void write_csv(std::ostream& out, const std::string& command, const SweepSpec& spec, const SweepResult& r) {
  out << "# dipolar " << command << "\n";
  for (const auto& [k, v] : spec.describe()) out << "# " << k << " = " << v << "\n";
  for (const auto& [k, v] : r.metadata) out << "# " << k << " = " << v << "\n";
  for (std::size_t i = 0; i < r.columns.size(); ++i) out << r.columns[i] << ",";
  out << "status\n";
  for (const auto& row : r.rows) {
    for (double v : row.values) out << fmt(v) << ",";
    out << row.status << "\n";
  }
}

std::string summary(const SweepResult& r) {
  std::ostringstream os;
  os << r.rows.size() << " rows: " << r.count(RowKind::Ok) << " ok, " << r.count(RowKind::Flagged) << " flagged, "
     << r.count(RowKind::Failed) << " failed";
  return os.str();
}

}  // namespace dipolar::cli
