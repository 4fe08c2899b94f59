// gkde: command line front end for the gamma kernel density estimator.

#include "gkde/cli.hpp"
#include "gkde/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

namespace {

using gkde::cli::RunConfig;

struct Bound
{
  RunConfig cfg;
  std::string density;
  bool seed_given = false;
};

void add_common(CLI::App* sub, Bound& s)
{
  sub->add_option("--seed", s.cfg.seed, "Master seed (overrides GKDE_SEED)")
    ->each([&s](const std::string&) { s.seed_given = true; });
  sub->add_option("--threads", s.cfg.threads, "Worker threads, 0 = hardware parallelism");
  sub->add_option("-o,--output", s.cfg.output, "CSV destination, - for stdout");
  sub->add_option("--meta", s.cfg.meta, "Sidecar path (default <output>.meta.json)");
}

void add_density(CLI::App* sub, Bound& s)
{
  sub->add_option("--density", s.density,
                  R"(Density spec, e.g. '{"kind":"MirroredGamma","params":{"alpha":4,"theta":0.2}}')");
}

template <class T>
CLI::Option* add_grid(CLI::App* sub, const std::string& name, std::vector<T>& v,
                      const std::string& help)
{
  return sub->add_option(name, v, help)->delimiter(',');
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{ "Gamma kernel density estimation: estimates, risks and rate experiments" };
  app.set_version_flag("--version", gkde::cli::version());
  app.require_subcommand(1);

  std::map<std::string, Bound> state;
  std::map<std::string, CLI::App*> subs;
  const std::map<std::string, std::string> help = {
    { "estimate", "Evaluate f_hat on a grid from a sample file" },
    { "density-eval", "Evaluate a test density on a grid" },
    { "sample", "Draw a sample from a test density" },
    { "risk", "Monte Carlo L^p risk for one (n, b, p)" },
    { "rate", "Risk along n with b = c n^{-2/(2 beta + 1)} and its log-log slope" },
    { "oracle-rate", "Per-n minimum risk over a bandwidth grid and its slope" },
    { "endpoint", "Endpoint leakage bias of the unmollified uniform" },
    { "lower-bounds", "Bias and fluctuation floor studies" },
    { "regime-map", "Minimax / non-minimax map over (p, beta)" },
    { "regularity-scan", "Hoelder quotient scan of mirrored gamma densities" },
    { "bounds-check", "Kernel bound predicates over their grids" },
  };

  for (const auto& name : gkde::cli::commands()) {
    Bound& s = state[name];
    s.cfg = gkde::cli::defaults_for(name);
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    subs[name] = sub;
    add_common(sub, s);
    RunConfig& c = s.cfg;

    if (name == "estimate") {
      sub->add_option("--input", c.input, "Sample file, one decimal per line")->required();
      sub->add_option("--b", c.b, "Bandwidth in (0, 1]");
      add_grid(sub, "--x-grid", c.x_grid, "Evaluation points (default: risk mesh nodes)");
    } else if (name == "density-eval") {
      add_density(sub, s);
      add_grid(sub, "--x-grid", c.x_grid, "Evaluation points");
    } else if (name == "sample") {
      add_density(sub, s);
      sub->add_option("--n", c.n, "Sample size");
    } else if (name == "risk") {
      add_density(sub, s);
      sub->add_option("--n", c.n, "Sample size");
      sub->add_option("--b", c.b, "Bandwidth");
      sub->add_option("--p", c.p, "Loss exponent >= 1");
      sub->add_option("--reps", c.reps, "Monte Carlo replications");
    } else if (name == "rate" || name == "oracle-rate") {
      add_density(sub, s);
      sub->add_option("--beta", c.beta, "Smoothness");
      sub->add_option("--p", c.p, "Loss exponent >= 1");
      sub->add_option("--c", c.c, "Bandwidth constant");
      sub->add_option("--reps", c.reps, "Monte Carlo replications");
      add_grid(sub, "--n-grid", c.n_grid, "Sample sizes, strictly increasing");
      if (name == "oracle-rate") {
        sub->add_option("--per-decade", c.per_decade, "Bandwidth grid points per decade");
        sub->add_option("--grid-lo", c.grid_lo, "Lowest grid offset (steps)");
        sub->add_option("--grid-hi", c.grid_hi, "Highest grid offset (steps)");
      }
    } else if (name == "endpoint") {
      sub->add_option("--p", c.p, "Loss exponent >= 1");
      add_grid(sub, "--b-grid", c.b_grid, "Bandwidths");
      sub->add_option("--control-b", c.control_b, "Bandwidth of the mollified control");
    } else if (name == "lower-bounds") {
      sub->add_option("--study", c.study,
                      "linear, bump, fluctuation, stagnant, small-bandwidth or risk-floor");
      add_density(sub, s);
      sub->add_option("--b", c.b, "Fixed bandwidth (stagnant)");
      sub->add_option("--beta", c.beta, "Smoothness (bump, stagnant)");
      sub->add_option("--p", c.p, "Loss exponent (stagnant)");
      sub->add_option("--L", c.L, "Hoelder constant of the test density");
      sub->add_option("--reps", c.reps, "Monte Carlo replications");
      sub->add_option("--s", c.s, "n sqrt(b) (small-bandwidth)");
      sub->add_option("--C0", c.C0, "Window constant (small-bandwidth)");
      sub->add_option("--min-nsqrtb", c.min_nsqrtb, "Skip (n, b) with n sqrt(b) below this");
      add_grid(sub, "--n-grid", c.n_grid, "Sample sizes");
      add_grid(sub, "--b-grid", c.b_grid, "Bandwidths");
      add_grid(sub, "--p-grid", c.p_grid, "Loss exponents (risk-floor)");
    } else if (name == "regime-map") {
      sub->add_flag("--fit,!--analytic", c.fit,
                    "Attach fitted oracle slopes (--analytic, the default, skips them)");
      add_grid(sub, "--p-grid", c.p_grid, "Loss exponents in [1, 8]");
      add_grid(sub, "--beta-grid", c.beta_grid, "Smoothness values in (0, 4]");
      add_grid(sub, "--n-grid", c.n_grid, "Sample sizes for --fit");
      sub->add_option("--reps", c.reps, "Replications for --fit");
      sub->add_option("--c", c.c, "Bandwidth grid center constant for --fit");
    } else if (name == "regularity-scan") {
      add_grid(sub, "--alpha-grid", c.alpha_grid, "Gamma shapes (> 1)");
      add_grid(sub, "--beta-grid", c.beta_grid, "Hoelder exponents");
      sub->add_option("--theta", c.theta, "Gamma scale");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return gkde::cli::kExitValidation;
  }

  for (auto& [name, sub] : subs) {
    if (!sub->parsed())
      continue;
    Bound& s = state[name];
    try {
      if (!s.density.empty()) {
        const auto spec = nlohmann::json::parse(s.density, nullptr, false);
        if (spec.is_discarded())
          throw gkde::DomainError("--density is not valid JSON");
        s.cfg.density = spec;
      }
      s.cfg.seed = gkde::cli::resolve_seed(s.seed_given, s.cfg.seed);
    } catch (const gkde::DomainError& e) {
      std::cerr << "gkde " << name << ": invalid configuration: " << e.what() << "\n";
      return gkde::cli::kExitValidation;
    }
    return gkde::cli::run(s.cfg, std::cerr);
  }
  return gkde::cli::kExitValidation;
}
