#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include <CLI11.hpp>
#include <json.hpp>

#include "qww/experiment.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> out, eps_list, variant;
  std::optional<std::uint64_t> seed;
  std::optional<double> mass, theta;
  std::optional<std::size_t> n_sites, steps;
  std::optional<long> window;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "flat JSON config file");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--seed", f.seed, "RNG seed");
  sub->add_option("--eps-list", f.eps_list, "comma-separated lattice spacings, e.g. 1/8,1/16,1/32,1/64");
  sub->add_option("--mass", f.mass, "physical mass m (theta = eps m)");
  sub->add_option("--theta", f.theta, "coin angle");
  sub->add_option("--n-sites", f.n_sites, "number of lattice sites N");
  sub->add_option("--steps", f.steps, "number of stored time steps J");
  sub->add_option("--window", f.window, "time window half-width M_t");
  sub->add_option("--variant", f.variant, "variant flags: ledger or printed")
      ->check(CLI::IsMember({"ledger", "printed"}));
}

nlohmann::json flag_patch(const Flags& f) {
  nlohmann::json j = nlohmann::json::object();
  if (f.out) j["out"] = *f.out;
  if (f.seed) j["seed"] = *f.seed;
  if (f.eps_list) j["eps_list"] = *f.eps_list;
  if (f.mass) j["mass"] = *f.mass;
  if (f.theta) j["theta"] = *f.theta;
  if (f.n_sites) j["n_sites"] = *f.n_sites;
  if (f.steps) j["steps"] = *f.steps;
  if (f.window) j["window"] = *f.window;
  if (f.variant) j["variant"] = *f.variant;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum walk Wigner transport audits and convergence experiments"};
  app.require_subcommand(1);
  Flags flags;
  const std::pair<const char*, const char*> commands[] = {
      {"identities", "discrete calculus and spectral identity checks"},
      {"audit", "equation-of-motion, omega and transport variant audits"},
      {"converge", "continuum residual slopes over an eps family"},
      {"dump-wigner", "write W(j0, p, k_j, k_p) for one history"},
  };
  for (const auto& [name, help] : commands) add_flags(app.add_subcommand(name, help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : qww::kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    qww::ExperimentConfig cfg = qww::default_config(command);
    if (!flags.config.empty()) {
      std::ifstream in(flags.config);
      if (!in) throw qww::ConfigError("cannot open config file '" + flags.config + "'");
      nlohmann::json file;
      try {
        file = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw qww::ConfigError(std::string("config file is not valid JSON: ") + e.what());
      }
      qww::apply_json(cfg, file);
    }
    qww::apply_json(cfg, flag_patch(flags));
    return qww::run_experiment(cfg, std::cout, std::cerr);
  } catch (const qww::PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qww::kExitConfig;
  }
}
