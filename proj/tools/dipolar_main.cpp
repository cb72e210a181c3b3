// dipolar: command-line front end. Exit codes: 0 success, 1 numerical
// failure (or a failing selfcheck), 2 usage error.

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dipolar/config.hpp"
#include "dipolar/selfcheck.hpp"
#include "dipolar/sweep.hpp"

namespace {

using namespace dipolar::cli;

struct Flags {
  std::string config;
  std::map<std::string, std::string> values;  // config key → flag value
  std::vector<std::string> assignments;       // --set key=value
};

struct Command {
  const char* name;
  const char* help;
  Quantity quantity;
};

const Command kCommands[] = {
    {"kappa", "compressibility ratio kappa/kappa0 of the uniform gas", Quantity::Kappa},
    {"effmass", "radial and angular effective masses", Quantity::EffMass},
    {"zerosound", "zero-sound speed and damping of the uniform gas", Quantity::ZeroSound},
    {"multilayer", "gas in a 1D optical lattice: compressibility or in-plane modes", Quantity::MultilayerKappa},
    {"kohn", "sloshing mode of the layered gas", Quantity::Kohn},
    {"trap", "local-density profile in a harmonic trap", Quantity::TrapProfile},
    {"coulomb", "Hartree-Fock compressibility of the 2D Coulomb gas", Quantity::Coulomb},
};

void add_common(CLI::App* sub, Flags& f) {
  const std::pair<const char*, const char*> keyed[] = {
      {"--dim", "dim"},         {"--density", "density"}, {"--temp", "temperature"}, {"--width", "width"},
      {"--theta-e", "theta_e"}, {"--sweep", "sweep"},     {"--out", "out"},          {"--tol", "tol"},
  };
  const std::map<std::string, std::string> help = {
      {"dim", "dimension 1, 2 or 3"},
      {"density", "density with unit, e.g. '1e9 /cm2'"},
      {"temperature", "temperature with unit (nK, uK, K or T_F)"},
      {"width", "transverse width with unit, e.g. '10 nm'"},
      {"theta_e", "dipole tilt with unit (deg or rad)"},
      {"sweep", "axis:min:max:count:scale, axis in {temperature, density, angle}, scale in {lin, log}"},
      {"out", "CSV output path (default: stdout)"},
      {"tol", "relative tolerance for root solves"},
  };
  for (const auto& [flag, key] : keyed) sub->add_option(flag, f.values[key], help.at(key));
  sub->add_option("--config", f.config, "key = value configuration file")->check(CLI::ExistingFile);
  sub->add_option("--set", f.assignments, "any configuration key, as key=value (repeatable)");
}

Config build_config(const Flags& f) {
  Config c = f.config.empty() ? Config{} : Config::load(f.config);
  for (const auto& [key, value] : f.values)
    if (!value.empty()) c.set(key, value);
  for (const auto& a : f.assignments) c.set_assignment(a);
  return c;
}

int run_command(const Command& cmd, const Flags& f) {
  const Config c = build_config(f);
  const SweepSpec spec = resolve(cmd.quantity, c);
  const SweepResult r = run_sweep(spec);

  if (spec.output.empty()) {
    write_csv(std::cout, cmd.name, spec, r);
  } else {
    std::ofstream out(spec.output);
    if (!out) throw UsageError("cannot write '" + spec.output + "'");
    write_csv(out, cmd.name, spec, r);
  }
  for (std::size_t i = 0; i < r.rows.size(); ++i)
    if (r.rows[i].kind != RowKind::Ok && !r.rows[i].diagnostic.empty())
      std::cerr << "row " << i << " (" << r.rows[i].status << "): " << r.rows[i].diagnostic << "\n";
  std::cerr << cmd.name << ": " << summary(r) << "\n";
  return r.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-temperature Hartree-Fock properties of dipolar Fermi gases"};
  app.require_subcommand(1);

  std::vector<Flags> flags(std::size(kCommands));
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(kCommands); ++i) {
    auto* sub = app.add_subcommand(kCommands[i].name, kCommands[i].help);
    add_common(sub, flags[i]);
    subs.push_back(sub);
  }
  std::string multilayer_quantity;
  subs[3]->add_option("--quantity", multilayer_quantity, "kappa or modes")->check(CLI::IsMember({"kappa", "modes"}));

  double selfcheck_scale = 1.0;
  auto* sc = app.add_subcommand("selfcheck", "run the invariant suite");
  sc->add_option("--tol", selfcheck_scale, "scale applied to every tolerance; 0.1 is ten times tighter")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (sc->parsed()) {
      SelfcheckOptions opt;
      opt.tolerance_scale = selfcheck_scale;
      const auto report = selfcheck(opt);
      print_report(std::cout, report);
      return report.all_pass() ? 0 : 1;
    }
    if (!multilayer_quantity.empty()) flags[3].assignments.push_back("quantity=" + multilayer_quantity);
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) return run_command(kCommands[i], flags[i]);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
