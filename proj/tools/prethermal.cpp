// Command-line front end. Subcommands map onto the library runners; parameters
// come from an optional `key = value` config file, named flags, and --set
// overrides (applied in that order), so a run is always reproducible from its
// manifest.
//
// Sign convention used throughout: symbol 0 maps to +1 and symbol 1 to -1
// (s = 1 - 2t) for every substitution drive.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "prethermal/cli.hpp"

namespace {

struct SubState {
  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  std::uint64_t seed = 1;
  std::string lambda_sweep;                    // lo:hi:n
  std::map<std::string, std::string> flags;    // named-flag values, keyed by param name
};

void add_common(CLI::App* sub, SubState& st) {
  sub->add_option("--config", st.config_path, "config file with `key = value` lines");
  sub->add_option("--set", st.overrides, "override, repeatable: --set key=value")->take_all();
  sub->add_option("-o,--out", st.out_dir, "output directory");
  sub->add_option("--seed", st.seed, "64-bit seed for any randomness");
}

// Registers --key flags that land in the params map under `key`.
void add_param_flags(CLI::App* sub, SubState& st, const std::vector<std::string>& keys) {
  for (const auto& key : keys) {
    std::string flag = "--" + key;
    for (auto& ch : flag)
      if (ch == '_') ch = '-';
    sub->add_option(flag, st.flags[key], "sets " + key);
  }
}

prethermal::RunConfig build_config(const std::string& command, const SubState& st) {
  prethermal::RunConfig cfg;
  cfg.command = command;
  cfg.output_dir = st.out_dir;
  cfg.seed = st.seed;
  if (!st.config_path.empty()) cfg.params = prethermal::parse_config_file(st.config_path);
  for (const auto& [key, value] : st.flags)
    if (!value.empty()) cfg.params[key] = value;
  if (!st.lambda_sweep.empty()) {
    const auto c1 = st.lambda_sweep.find(':');
    const auto c2 = st.lambda_sweep.find(':', c1 == std::string::npos ? 0 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw prethermal::parameter_error("--lambda-sweep expects lo:hi:n, got " + st.lambda_sweep);
    cfg.params["lambda_lo"] = st.lambda_sweep.substr(0, c1);
    cfg.params["lambda_hi"] = st.lambda_sweep.substr(c1 + 1, c2 - c1 - 1);
    cfg.params["points"] = st.lambda_sweep.substr(c2 + 1);
  }
  for (const auto& kv : st.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw prethermal::parameter_error("--set expects key=value, got: " + kv);
    cfg.params[prethermal::trim(kv.substr(0, eq))] = prethermal::trim(kv.substr(eq + 1));
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prethermal: aperiodic-drive spectral analysis and prethermal-lifetime bounds"};
  app.require_subcommand(1);

  std::map<std::string, SubState> states;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"spectrum", "DFT, binned-median envelope and class fits of a step drive"},
      {"fer", "discrete Fer dressing of the driven qubit, per-order spectra"},
      {"linres", "linear-response heating sweep (quadrature, Laplace, ln tau*)"},
      {"flow", "kappa-plan sweep: q*, ln tau* bound, validity"},
      {"evolve", "exact spin-chain evolution under a step drive"},
      {"check", "run the quick property/invariant suite"},
  };

  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto& st = states[name];
    add_common(sub, st);
    if (name == "spectrum")
      add_param_flags(sub, st,
                      {"drive", "depth", "iters", "r", "blocks", "bins", "omega_max",
                       "subtract_mean", "fit", "drop_decile"});
    else if (name == "fer")
      add_param_flags(sub, st, {"drive", "depth", "r", "blocks", "J", "g", "dt", "iterations",
                                "bins", "omega_max"});
    else if (name == "linres") {
      add_param_flags(sub, st, {"class", "b", "J", "g", "rel_tol"});
      sub->add_option("--lambda-sweep", st.lambda_sweep, "log-spaced sweep, lo:hi:n");
    } else if (name == "flow") {
      add_param_flags(sub, st, {"class", "b", "kappa0", "J", "c"});
      sub->add_option("--lambda-sweep", st.lambda_sweep, "log-spaced sweep, lo:hi:n");
    } else if (name == "evolve")
      add_param_flags(sub, st, {"sites", "jzz", "hz", "hx", "g", "drive", "depth", "r", "steps",
                                "dt", "record_every", "threshold"});
  }

  CLI::App* rec = app.add_subcommand("recipe", "regenerate a figure/table and check it");
  std::string recipe_name;
  auto& rec_state = states["recipe"];
  rec->add_option("name", recipe_name,
                  "fig-fibonacci | fig-thuemorse | fig-fer-loss | table1-lrt | table1-np | "
                  "fig-mori-magnus")
      ->required();
  rec->add_option("-o,--out", rec_state.out_dir, "output directory");
  rec->add_option("--seed", rec_state.seed, "64-bit seed");

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& [name, help] : commands) {
      if (app.got_subcommand(name)) return prethermal::run(build_config(name, states[name]));
    }
    if (app.got_subcommand(rec))
      return prethermal::recipe(recipe_name, rec_state.out_dir, rec_state.seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
