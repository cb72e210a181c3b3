#include "dipolar/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dipolar/constants.hpp"

namespace dipolar::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string normalize_key(std::string k) {
  k = trim(k);
  for (char& c : k) c = c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return k;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Leading number and the trimmed remainder.
std::pair<double, std::string> split_number(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw UsageError("empty value");
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin) throw UsageError("'" + s + "' does not start with a number");
  return {v, trim(std::string(end))};
}

struct UnitFactor {
  const char* name;
  double factor;
};

double lookup(const std::string& suffix, std::initializer_list<UnitFactor> table, const char* what,
              const std::string& text) {
  for (const auto& u : table)
    if (suffix == u.name) return u.factor;
  std::string allowed;
  for (const auto& u : table) allowed += std::string(allowed.empty() ? "" : ", ") + u.name;
  throw UsageError(std::string(what) + " '" + text + "' needs a unit suffix (" + allowed + ")");
}

double density_factor(std::string suffix, int dim, const std::string& text) {
  suffix.erase(std::remove(suffix.begin(), suffix.end(), ' '), suffix.end());
  const auto bad = [&] {
    return UsageError("density '" + text + "' needs a suffix like /cm" + std::to_string(dim) + " or cm^-" +
                      std::to_string(dim));
  };
  bool slash = false;
  if (suffix.rfind("1/", 0) == 0) {
    suffix.erase(0, 2);
    slash = true;
  } else if (suffix.rfind('/', 0) == 0) {
    suffix.erase(0, 1);
    slash = true;
  }
  static const std::pair<const char*, double> lengths[] = {
      {"cm", 1.0}, {"mm", 10.0}, {"um", 1e4}, {"μm", 1e4}, {"nm", 1e7}, {"m", 1e-2}};
  double per_cm = 0.0;  // cm / unit
  std::string rest;
  for (const auto& [name, f] : lengths) {
    if (suffix.rfind(name, 0) == 0) {
      per_cm = f;
      rest = suffix.substr(std::string(name).size());
      break;
    }
  }
  if (per_cm == 0.0) throw bad();
  // "/cm3", "/cm^3", "/cm" or "cm^-3", "cm-3"
  if (!rest.empty() && rest[0] == '^') rest.erase(0, 1);
  const bool negative = !rest.empty() && rest[0] == '-';
  if (negative == slash) throw bad();
  if (negative) rest.erase(0, 1);
  if (rest.empty() && slash) rest = "1";
  if (rest.size() != 1 || rest[0] < '1' || rest[0] > '3') throw bad();
  const int e = rest[0] - '0';
  if (dim != 0 && e != dim)
    throw UsageError("density '" + text + "' has exponent " + std::to_string(e) + " but the gas is " +
                     std::to_string(dim) + "D");
  return std::pow(per_cm, e);
}

const char* kind_name(UnitKind k) {
  switch (k) {
    case UnitKind::Temperature: return "temperature";
    case UnitKind::Density: return "density";
    case UnitKind::Length: return "length";
    case UnitKind::Angle: return "angle";
    case UnitKind::Frequency: return "frequency";
    case UnitKind::Mass: return "mass";
    case UnitKind::Dipole: return "dipole moment";
    case UnitKind::LatticeEnergy: return "lattice depth";
  }
  return "value";
}

int parse_int(const std::string& key, const std::string& text) {
  const double v = parse_number(text);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw UsageError(key + " must be an integer");
  return static_cast<int>(v);
}

}  // namespace

double parse_number(const std::string& text) {
  const auto [v, rest] = split_number(text);
  if (!rest.empty()) throw UsageError("'" + trim(text) + "' should be a plain number");
  return v;
}

bool is_reduced_temperature(const std::string& text) { return split_number(text).second == "T_F"; }

double parse_quantity(const std::string& text, UnitKind kind, int dim) {
  const auto [v, suffix] = split_number(text);
  if (suffix.empty()) throw UsageError(std::string(kind_name(kind)) + " '" + trim(text) + "' needs a unit suffix");
  switch (kind) {
    case UnitKind::Temperature:
      if (suffix == "T_F") return v;
      return v * lookup(suffix, {{"nK", 1.0}, {"uK", 1e3}, {"μK", 1e3}, {"mK", 1e6}, {"K", 1e9}}, "temperature", text);
    case UnitKind::Density: return v * density_factor(suffix, dim, text);
    case UnitKind::Length:
      return v * lookup(suffix, {{"nm", 1.0}, {"um", 1e3}, {"μm", 1e3}, {"mm", 1e6}, {"m", 1e9}}, "length", text);
    case UnitKind::Angle: return v * lookup(suffix, {{"rad", 1.0}, {"deg", pi / 180.0}}, "angle", text);
    case UnitKind::Frequency: return v * lookup(suffix, {{"Hz", 1.0}, {"kHz", 1e3}}, "frequency", text);
    case UnitKind::Mass: return v * lookup(suffix, {{"amu", 1.0}, {"u", 1.0}, {"Da", 1.0}}, "mass", text);
    case UnitKind::Dipole: return v * lookup(suffix, {{"D", 1.0}, {"debye", 1.0}}, "dipole moment", text);
    case UnitKind::LatticeEnergy: return v * lookup(suffix, {{"E_R", 1.0}}, "lattice depth", text);
  }
  throw UsageError("unknown unit kind");
}

// ---- Config -----------------------------------------------------------------

const std::vector<std::string>& Config::known_keys() {
  static const std::vector<std::string> keys = {
      "dim",          "mass",       "dipole",        "density",     "temperature", "width",     "theta_e",
      "theta_q",      "phi_q",      "lambda",        "method",      "k",           "theta_k",   "lattice_depth",
      "lattice_period", "plane_waves", "m_size",     "kz_points",   "extra_bands", "qz",        "s_max",
      "scan_points",  "quantity",   "trap_frequency", "particles",  "radii",       "rs",        "sweep",
      "out",          "tol"};
  return keys;
}

void Config::set(const std::string& key, const std::string& value) {
  const std::string k = normalize_key(key);
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw UsageError("unknown config key '" + trim(key) + "'");
  values_[k] = trim(value);
}

void Config::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw UsageError("expected key=value, got '" + assignment + "'");
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

bool Config::has(const std::string& key) const { return values_.count(normalize_key(key)) != 0; }

const std::string& Config::get(const std::string& key) const {
  const auto it = values_.find(normalize_key(key));
  if (it == values_.end()) throw UsageError("missing config key '" + key + "'");
  return it->second;
}

Config Config::parse(std::istream& in, const std::string& origin) {
  Config c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    try {
      c.set_assignment(line);
    } catch (const UsageError& e) {
      throw UsageError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  return parse(in, path);
}

// ---- names ------------------------------------------------------------------

std::string to_string(Quantity q) {
  switch (q) {
    case Quantity::Kappa: return "kappa";
    case Quantity::EffMass: return "effmass";
    case Quantity::ZeroSound: return "zerosound";
    case Quantity::MultilayerKappa: return "multilayer-kappa";
    case Quantity::MultilayerModes: return "multilayer-modes";
    case Quantity::Kohn: return "kohn";
    case Quantity::TrapProfile: return "trap-profile";
    case Quantity::Coulomb: return "coulomb";
  }
  return "?";
}

std::string to_string(Axis a) {
  switch (a) {
    case Axis::None: return "none";
    case Axis::Temperature: return "temperature";
    case Axis::Density: return "density";
    case Axis::Angle: return "angle";
  }
  return "?";
}

Quantity parse_quantity_name(const std::string& name) {
  for (Quantity q : {Quantity::Kappa, Quantity::EffMass, Quantity::ZeroSound, Quantity::MultilayerKappa,
                     Quantity::MultilayerModes, Quantity::Kohn, Quantity::TrapProfile, Quantity::Coulomb})
    if (to_string(q) == name) return q;
  throw UsageError("unknown quantity '" + name + "'");
}

// ---- sweep grid ---------------------------------------------------------------

std::vector<double> Grid::points() const {
  if (count == 1) return {min};
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / (count - 1);
    out[i] = log ? std::exp(std::log(min) + f * (std::log(max) - std::log(min))) : min + f * (max - min);
  }
  out.front() = min;
  out.back() = max;
  return out;
}

std::pair<Axis, Grid> parse_sweep(const std::string& text, int dim) {
  std::vector<std::string> part;
  std::stringstream ss(text);
  for (std::string s; std::getline(ss, s, ':');) part.push_back(trim(s));
  if (part.size() != 5) throw UsageError("sweep '" + text + "' should read axis:min:max:count:scale");

  Axis axis;
  if (part[0] == "temperature") axis = Axis::Temperature;
  else if (part[0] == "density") axis = Axis::Density;
  else if (part[0] == "angle") axis = Axis::Angle;
  else throw UsageError("sweep axis must be temperature, density or angle, not '" + part[0] + "'");

  Grid g;
  auto bound = [&](const std::string& s, bool& reduced) {
    const auto [v, suffix] = split_number(s);
    reduced = false;
    if (suffix.empty()) return axis == Axis::Angle ? v * pi / 180.0 : v;
    switch (axis) {
      case Axis::Temperature:
        reduced = suffix == "T_F";
        return parse_quantity(s, UnitKind::Temperature);
      case Axis::Density: return parse_quantity(s, UnitKind::Density, dim);
      default: return parse_quantity(s, UnitKind::Angle);
    }
  };
  bool r_lo = false, r_hi = false;
  g.min = bound(part[1], r_lo);
  g.max = bound(part[2], r_hi);
  if (r_lo != r_hi) throw UsageError("sweep bounds mix T_F and absolute temperature");
  g.reduced_temperature = r_lo;
  g.count = parse_int("sweep count", part[3]);
  if (part[4] == "log") g.log = true;
  else if (part[4] != "lin" && part[4] != "linear") throw UsageError("sweep scale must be lin or log");
  return {axis, g};
}

// ---- resolution -----------------------------------------------------------------

void SweepSpec::validate() const {
  const bool lattice_q = quantity == Quantity::MultilayerKappa || quantity == Quantity::MultilayerModes ||
                         quantity == Quantity::Kohn;
  if (axis != Axis::None) {
    if (grid.count < 2) throw UsageError("a sweep needs at least 2 points");
    if (!(grid.min < grid.max)) throw UsageError("sweep min must be below max");
    if (grid.log && !(grid.min > 0.0)) throw UsageError("a log sweep needs a positive lower bound");
    bool ok = false;
    switch (quantity) {
      case Quantity::Kappa:
      case Quantity::EffMass:
      case Quantity::ZeroSound: ok = true; break;
      case Quantity::MultilayerKappa:
      case Quantity::MultilayerModes:
      case Quantity::Kohn: ok = axis != Axis::Angle && !grid.reduced_temperature; break;
      case Quantity::TrapProfile: ok = false; break;
      case Quantity::Coulomb: ok = axis == Axis::Temperature && grid.reduced_temperature; break;
    }
    if (!ok) {
      std::string why = to_string(quantity) + " cannot be swept over " + to_string(axis);
      if (quantity == Quantity::Coulomb) why += " (only temperature, in T_F)";
      if (lattice_q && grid.reduced_temperature) why += " in T_F";
      throw UsageError(why);
    }
  }
  try {
    if (lattice_q) {
      lattice.validate();
      if (model.kz_points < 4 || model.kz_points % 2) throw std::domain_error("kz_points must be even and >= 4");
    } else if (quantity != Quantity::Coulomb) {
      params.validate();
    }
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
  if (quantity == Quantity::TrapProfile) {
    if (params.dimension == Dimension::Three) throw UsageError("trap profiles exist for dim 1 and 2");
    if (reduced_t) throw UsageError("trap temperature must be absolute, not T_F");
    if (!(trap_frequency_hz > 0.0) || !(particles > 0.0) || radii < 8)
      throw UsageError("trap needs trap_frequency > 0, particles > 0 and radii >= 8");
  }
  if (lattice_q && reduced_t) throw UsageError("lattice temperature must be absolute, not T_F");
  if (quantity == Quantity::Coulomb && !(rs > 0.0)) throw UsageError("rs must be positive");
  if (tol && !(*tol > 0.0)) throw UsageError("tol must be positive");
  if (lambda && !(*lambda >= 0.0)) throw UsageError("lambda must be non-negative");
  if (reduced_t && !(*reduced_t >= 0.0)) throw UsageError("temperature must be non-negative");
}

std::vector<std::pair<std::string, std::string>> SweepSpec::describe() const {
  std::vector<std::pair<std::string, std::string>> d;
  d.emplace_back("quantity", to_string(quantity));
  if (axis != Axis::None) {
    std::string unit = axis == Axis::Temperature ? (grid.reduced_temperature ? "T_F" : "nK")
                       : axis == Axis::Density   ? "cm^-" + std::to_string(quantity == Quantity::MultilayerKappa ||
                                                                             quantity == Quantity::MultilayerModes ||
                                                                             quantity == Quantity::Kohn
                                                                         ? 2
                                                                         : dim_value(params.dimension))
                                                 : "rad";
    d.emplace_back("sweep", to_string(axis) + ":" + fmt(grid.min) + ":" + fmt(grid.max) + ":" +
                                std::to_string(grid.count) + ":" + (grid.log ? "log" : "lin") + " (" + unit + ")");
  }
  auto temp = [&] { return reduced_t ? fmt(*reduced_t) + " T_F" : fmt(params.temperature_nK) + " nK"; };
  switch (quantity) {
    case Quantity::Kappa:
    case Quantity::EffMass:
    case Quantity::ZeroSound:
    case Quantity::TrapProfile: {
      const int dim = dim_value(params.dimension);
      d.emplace_back("dim", std::to_string(dim));
      d.emplace_back("mass", fmt(params.mass_amu) + " amu");
      d.emplace_back("dipole", fmt(params.dipole_debye) + " D");
      if (quantity != Quantity::TrapProfile) d.emplace_back("density", fmt(params.density) + " cm^-" + std::to_string(dim));
      d.emplace_back("temperature", temp());
      if (dim < 3) d.emplace_back("width", fmt(params.width_nm) + " nm");
      d.emplace_back("theta_e", fmt(params.theta_E) + " rad");
      if (quantity == Quantity::ZeroSound) {
        d.emplace_back("theta_q", fmt(params.theta_q) + " rad");
        d.emplace_back("phi_q", fmt(params.phi_q) + " rad");
      }
      if (lambda) d.emplace_back("lambda", fmt(*lambda));
      if (quantity == Quantity::Kappa || quantity == Quantity::EffMass) d.emplace_back("method", obs::to_string(method));
      if (quantity == Quantity::EffMass) {
        d.emplace_back("k", fmt(k));
        d.emplace_back("theta_k", fmt(theta_k) + " rad");
      }
      if (quantity == Quantity::TrapProfile) {
        d.emplace_back("trap_frequency", fmt(trap_frequency_hz) + " Hz");
        d.emplace_back("particles", fmt(particles));
        d.emplace_back("radii", std::to_string(radii));
      }
      break;
    }
    case Quantity::MultilayerKappa:
    case Quantity::MultilayerModes:
    case Quantity::Kohn:
      d.emplace_back("mass", fmt(lattice.mass_amu) + " amu");
      d.emplace_back("dipole", fmt(lattice.dipole_debye) + " D");
      d.emplace_back("density", fmt(lattice.n2d) + " cm^-2");
      d.emplace_back("temperature", fmt(lattice.temperature_nK) + " nK");
      d.emplace_back("lattice_depth", fmt(lattice.lattice.V0) + " E_R");
      d.emplace_back("lattice_period", fmt(lattice.lattice.lambda_nm) + " nm");
      d.emplace_back("plane_waves", std::to_string(lattice.lattice.N));
      d.emplace_back("m_size", std::to_string(lattice.lattice.M_size));
      d.emplace_back("kz_points", std::to_string(model.kz_points));
      d.emplace_back("extra_bands", std::to_string(model.extra_bands));
      if (quantity == Quantity::Kohn) d.emplace_back("qz", fmt(qz));
      if (quantity == Quantity::MultilayerModes) d.emplace_back("s_max", fmt(s_max));
      if (quantity != Quantity::MultilayerKappa && scan_points > 0) d.emplace_back("scan_points", std::to_string(scan_points));
      break;
    case Quantity::Coulomb:
      d.emplace_back("rs", fmt(rs));
      d.emplace_back("temperature", temp());
      break;
  }
  if (tol) d.emplace_back("tol", fmt(*tol));
  return d;
}

SweepSpec resolve(Quantity q, const Config& c) {
  SweepSpec s;
  s.quantity = q;
  if (c.has("quantity")) {
    const std::string v = c.get("quantity");
    if (q != Quantity::MultilayerKappa && q != Quantity::MultilayerModes)
      throw UsageError("the quantity key applies to the multilayer command only");
    if (v == "kappa") s.quantity = Quantity::MultilayerKappa;
    else if (v == "modes") s.quantity = Quantity::MultilayerModes;
    else throw UsageError("multilayer quantity must be kappa or modes");
  }
  const bool lattice_q = s.quantity == Quantity::MultilayerKappa || s.quantity == Quantity::MultilayerModes ||
                         s.quantity == Quantity::Kohn;

  int dim = s.quantity == Quantity::TrapProfile ? 2 : 3;
  if (c.has("dim")) {
    dim = parse_int("dim", c.get("dim"));
    if (dim < 1 || dim > 3) throw UsageError("dim must be 1, 2 or 3");
  }
  if (lattice_q) dim = 2;
  PhysicalParams& p = s.params;
  p.dimension = dimension_from_int(dim);
  p.density = dim == 3 ? 1e12 : dim == 2 ? 1e9 : 1e5;

  if (c.has("mass")) p.mass_amu = parse_quantity(c.get("mass"), UnitKind::Mass);
  if (c.has("dipole")) p.dipole_debye = parse_quantity(c.get("dipole"), UnitKind::Dipole);
  if (c.has("density")) p.density = parse_quantity(c.get("density"), UnitKind::Density, dim);
  if (c.has("temperature")) {
    const std::string& t = c.get("temperature");
    if (is_reduced_temperature(t)) s.reduced_t = parse_quantity(t, UnitKind::Temperature);
    else p.temperature_nK = parse_quantity(t, UnitKind::Temperature);
  } else if (lattice_q) {
    p.temperature_nK = 20.0;
  }
  if (c.has("width")) p.width_nm = parse_quantity(c.get("width"), UnitKind::Length);
  if (c.has("theta_e")) p.theta_E = parse_quantity(c.get("theta_e"), UnitKind::Angle);
  if (c.has("theta_q")) p.theta_q = parse_quantity(c.get("theta_q"), UnitKind::Angle);
  if (c.has("phi_q")) p.phi_q = parse_quantity(c.get("phi_q"), UnitKind::Angle);
  if (c.has("lambda")) s.lambda = parse_number(c.get("lambda"));
  if (c.has("method")) {
    const std::string m = c.get("method");
    if (m == "numeric") s.method = obs::KappaMethod::Numeric;
    else if (m == "lowt") s.method = obs::KappaMethod::LowT;
    else if (m == "lowt-small-width") s.method = obs::KappaMethod::LowTSmallWidth;
    else throw UsageError("method must be numeric, lowt or lowt-small-width");
  }
  if (c.has("k")) s.k = parse_number(c.get("k"));
  if (c.has("theta_k")) s.theta_k = parse_quantity(c.get("theta_k"), UnitKind::Angle);

  ml::MultilayerParams& L = s.lattice;
  L.mass_amu = p.mass_amu;
  L.dipole_debye = p.dipole_debye;
  L.n2d = p.density;
  L.temperature_nK = p.temperature_nK;
  if (c.has("lattice_depth")) L.lattice.V0 = parse_quantity(c.get("lattice_depth"), UnitKind::LatticeEnergy);
  if (c.has("lattice_period")) L.lattice.lambda_nm = parse_quantity(c.get("lattice_period"), UnitKind::Length);
  if (c.has("plane_waves")) L.lattice.N = parse_int("plane_waves", c.get("plane_waves"));
  if (c.has("m_size")) L.lattice.M_size = parse_int("m_size", c.get("m_size"));
  if (c.has("kz_points")) s.model.kz_points = parse_int("kz_points", c.get("kz_points"));
  if (c.has("extra_bands")) s.model.extra_bands = parse_int("extra_bands", c.get("extra_bands"));
  if (c.has("qz")) s.qz = parse_number(c.get("qz"));
  if (c.has("s_max")) s.s_max = parse_number(c.get("s_max"));
  if (c.has("scan_points")) s.scan_points = parse_int("scan_points", c.get("scan_points"));

  if (c.has("trap_frequency")) s.trap_frequency_hz = parse_quantity(c.get("trap_frequency"), UnitKind::Frequency);
  if (c.has("particles")) s.particles = parse_number(c.get("particles"));
  if (c.has("radii")) s.radii = parse_int("radii", c.get("radii"));
  if (c.has("rs")) s.rs = parse_number(c.get("rs"));

  if (s.quantity == Quantity::Coulomb) {
    if (c.has("temperature") && !s.reduced_t) throw UsageError("coulomb temperature must be given in T_F");
    if (!s.reduced_t) s.reduced_t = 0.1;
  }

  if (c.has("sweep")) std::tie(s.axis, s.grid) = parse_sweep(c.get("sweep"), dim);
  if (c.has("tol")) {
    s.tol = parse_number(c.get("tol"));
    s.model.rel_tol = *s.tol;
  }
  if (c.has("out")) s.output = c.get("out");
  s.validate();
  return s;
}

}  // namespace dipolar::cli
