// huplab: batch experiments for the Gauss-type map and hyperbola uniqueness checks.
//
//   huplab <command> [--config file.json] [flags]
//
// Flags override values from the config file.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "huplab/experiments.hpp"

namespace {

struct Flags {
  std::string config;
  int p{}, q{};
  double beta{}, beta_min{}, beta_max{};
  int beta_steps{};
  std::vector<std::int64_t> n_bins;
  std::vector<double> betas;
  std::int64_t J{}, n_steps{}, N{}, samples{}, k{}, m{}, functions{}, points{};
  double tolerance{}, min_piece{};
  std::uint64_t seed{};
  std::string method, measure, output, format;
};

struct Registered {
  CLI::App* app;
  std::vector<std::pair<CLI::Option*, std::function<void(huplab::ExperimentConfig&)>>> overrides;
};

template <class T, class Apply>
void add(Registered& r, const std::string& name, T& slot, const std::string& help, Apply apply) {
  CLI::Option* opt = r.app->add_option(name, slot, help);
  r.overrides.emplace_back(opt, [&slot, apply](huplab::ExperimentConfig& c) { apply(c, slot); });
}

Registered register_command(CLI::App& root, const std::string& name, const std::string& help, Flags& f) {
  Registered r{root.add_subcommand(name, help), {}};
  using C = huplab::ExperimentConfig;
  r.app->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  add(r, "--p", f.p, "integer period p", [](C& c, int v) { c.p = v; });
  add(r, "--beta", f.beta, "window half-width beta", [](C& c, double v) { c.beta = v; });
  add(r, "--tolerance", f.tolerance, "quadrature tolerance", [](C& c, double v) { c.tolerance = v; });
  add(r, "--seed", f.seed, "RNG seed", [](C& c, std::uint64_t v) { c.seed = v; });
  add(r, "--N", f.N, "index window", [](C& c, std::int64_t v) { c.N = v; });
  add(r, "--output,-o", f.output, "output path, - for stdout", [](C& c, const std::string& v) { c.output = v; });
  add(r, "--format", f.format, "csv or json", [](C& c, const std::string& v) { c.format = v; });
  if (name == "spectrum-scan") {
    add(r, "--betas", f.betas, "explicit beta list", [](C& c, const std::vector<double>& v) { c.betas = v; });
    add(r, "--beta-min", f.beta_min, "beta range start", [](C& c, double v) { c.beta_min = v; });
    add(r, "--beta-max", f.beta_max, "beta range end", [](C& c, double v) { c.beta_max = v; });
    add(r, "--beta-steps", f.beta_steps, "beta range points", [](C& c, int v) { c.beta_steps = v; });
    add(r, "--n-bins", f.n_bins, "bin counts", [](C& c, const std::vector<std::int64_t>& v) { c.n_bins = v; });
    add(r, "--J", f.J, "branch cutoff", [](C& c, std::int64_t v) { c.J = v; });
  }
  if (name == "escape") {
    add(r, "--n-steps", f.n_steps, "number of steps", [](C& c, std::int64_t v) { c.n_steps = v; });
    add(r, "--method", f.method, "exact-intervals or monte-carlo", [](C& c, const std::string& v) { c.method = v; });
    add(r, "--samples", f.samples, "monte carlo samples", [](C& c, std::int64_t v) { c.samples = v; });
    add(r, "--min-piece", f.min_piece, "shortest expanded piece", [](C& c, double v) { c.min_piece = v; });
  }
  if (name == "cross-residual") {
    add(r, "--q", f.q, "lattice offset q", [](C& c, int v) { c.q = v; });
    add(r, "--measure", f.measure, "singular-pair, gaussian, zero or atoms",
        [](C& c, const std::string& v) { c.measure = v; });
    add(r, "--k", f.k, "singular pair k", [](C& c, std::int64_t v) { c.k = v; });
    add(r, "--m", f.m, "singular pair m", [](C& c, std::int64_t v) { c.m = v; });
  }
  if (name == "identity-check") {
    add(r, "--functions", f.functions, "random test functions", [](C& c, std::int64_t v) { c.functions = v; });
    add(r, "--points", f.points, "sample points", [](C& c, std::int64_t v) { c.points = v; });
  }
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"huplab: Gauss-type map spectra, escape sets and hyperbola uniqueness checks"};
  app.require_subcommand(1);
  Flags flags;
  std::vector<Registered> commands;
  const std::vector<std::pair<std::string, std::string>> names{
      {"spectrum-scan", "Ulam spectra over a beta x n_bins scan (CSV)"},
      {"escape", "survivor set measures |E(n)| (CSV)"},
      {"cross-residual", "Fourier transform of a hyperbola measure on the lattice cross (JSON)"},
      {"separate", "solve the two-point separation problem (JSON)"},
      {"identity-check", "operator identity residuals on random test functions (JSON)"},
      {"poisson-check", "Poisson extension against the closed forms (JSON)"}};
  for (const auto& [n, h] : names) commands.push_back(register_command(app, n, h, flags));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : huplab::kExitConfig;
  }

  const Registered* active = nullptr;
  for (const auto& r : commands)
    if (r.app->parsed()) active = &r;

  huplab::ExperimentConfig config;
  try {
    if (!flags.config.empty()) {
      std::ifstream in(flags.config);
      if (!in) {
        std::cerr << "error: cannot read " << flags.config << '\n';
        return huplab::kExitIo;
      }
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw huplab::ConfigError(std::string("config parse error: ") + e.what());
      }
      huplab::apply_json(config, j);
    }
    config.command = active->app->get_name();
    for (const auto& [opt, apply] : active->overrides)
      if (opt->count() > 0) apply(config);
    if (active->app->get_option("--beta")->count() > 0 && active->app->get_name() == "spectrum-scan" &&
        active->app->get_option("--betas")->count() == 0 && active->app->get_option("--beta-steps")->count() == 0) {
      config.betas.clear();
      config.beta_steps.reset();
    }
    huplab::resolve_config(config);
  } catch (const huplab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return huplab::kExitConfig;
  }

  std::ostringstream buffer;
  int rc = huplab::kExitOk;
  try {
    rc = huplab::run_command(config, buffer);
  } catch (const huplab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return huplab::kExitConfig;
  } catch (const huplab::ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return huplab::kExitConfig;
  } catch (const huplab::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return huplab::kExitConfig;
  } catch (const huplab::ConvergenceError& e) {
    std::cerr << "non-convergence: " << e.what() << " (residual " << e.residual() << ")\n";
    return huplab::kExitNonConvergence;
  } catch (const huplab::ResourceError& e) {
    std::cerr << "non-convergence: " << e.what() << '\n';
    return huplab::kExitNonConvergence;
  }

  if (config.output == "-") {
    std::cout << buffer.str();
    std::cout.flush();
    if (!std::cout) return huplab::kExitIo;
  } else {
    std::ofstream out(config.output, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << config.output << '\n';
      return huplab::kExitIo;
    }
    out << buffer.str();
    if (!out.flush()) {
      std::cerr << "error: write to " << config.output << " failed\n";
      return huplab::kExitIo;
    }
  }
  if (rc == huplab::kExitNonConvergence) std::cerr << "warning: some rows did not converge\n";
  return rc;
}
