#pragma once

// Flat key = value configuration with unit-suffixed physical quantities, and
// its resolution into a fully specified sweep.

#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dipolar/multilayer.hpp"
#include "dipolar/observables.hpp"
#include "dipolar/units.hpp"

namespace dipolar::cli {

// Bad input from the user: unknown keys, missing or wrong units, invalid
// sweep axes. Maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

enum class UnitKind { Temperature, Density, Length, Angle, Frequency, Mass, Dipole, LatticeEnergy };

// Value in the canonical unit of its kind: nK, cm^-d, nm, rad, Hz, amu,
// debye, E_R. A missing or foreign suffix throws UsageError. Density needs
// the dimension to check the exponent of the suffix.
double parse_quantity(const std::string& text, UnitKind kind, int dim = 0);
// Temperatures may be given in units of T_F ("0.25 T_F"); such values are
// reduced temperatures t rather than nK.
bool is_reduced_temperature(const std::string& text);
double parse_number(const std::string& text);

class Config {
 public:
  static Config parse(std::istream& in, const std::string& origin = "<config>");
  static Config load(const std::string& path);

  // Keys are case-insensitive and '-' is read as '_'. Unknown keys throw.
  void set(const std::string& key, const std::string& value);
  // Applies "key=value".
  void set_assignment(const std::string& assignment);
  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return values_; }

  static const std::vector<std::string>& known_keys();

 private:
  std::map<std::string, std::string> values_;
};

enum class Quantity { Kappa, EffMass, ZeroSound, MultilayerKappa, MultilayerModes, Kohn, TrapProfile, Coulomb };
enum class Axis { None, Temperature, Density, Angle };

std::string to_string(Quantity q);
std::string to_string(Axis a);
Quantity parse_quantity_name(const std::string& name);

struct Grid {
  double min = 0.0;
  double max = 0.0;
  int count = 1;
  bool log = false;
  bool reduced_temperature = false;  // temperature axis given in T_F
  std::vector<double> points() const;
};

// "axis:min:max:count:scale", scale ∈ {lin, log}. Bounds take the same unit
// suffixes as the config keys and default to nK, cm^-d and degrees.
std::pair<Axis, Grid> parse_sweep(const std::string& text, int dim);

struct SweepSpec {
  Quantity quantity = Quantity::Kappa;
  Axis axis = Axis::None;
  Grid grid;

  PhysicalParams params;
  std::optional<double> reduced_t;  // overrides T/T_F
  std::optional<double> lambda;     // overrides the coupling from d and n
  obs::KappaMethod method = obs::KappaMethod::Numeric;
  double k = 1.0;        // effective-mass momentum, k_F0
  double theta_k = 0.0;  // rad

  ml::MultilayerParams lattice;
  ml::ModelOptions model;
  double qz = 0.02;  // 2π/λ
  double s_max = 5.0;
  int scan_points = 0;  // 0: the solver default

  double trap_frequency_hz = 400.0;
  double particles = 100.0;
  int radii = 200;

  double rs = 1.0;

  std::optional<double> tol;
  std::string output;  // empty: stdout

  void validate() const;  // throws UsageError
  // Every resolved setting with its canonical unit, in a fixed order.
  std::vector<std::pair<std::string, std::string>> describe() const;
};

// Defaults < config values; the caller applies CLI overrides to the Config
// before resolving.
SweepSpec resolve(Quantity q, const Config& c);

}  // namespace dipolar::cli
