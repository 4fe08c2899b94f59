#include "gkde/cli.hpp"

#include "gkde/densities.hpp"
#include "gkde/errors.hpp"
#include "gkde/estimator.hpp"
#include "gkde/experiments.hpp"
#include "gkde/parallel.hpp"
#include "gkde/risk.hpp"
#include "gkde/rng.hpp"

#include <chrono>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <variant>

#ifndef GKDE_VERSION
#define GKDE_VERSION "0.0.0"
#endif

namespace gkde::cli {

namespace {

using json = nlohmann::json;

const json kMirroredGamma = { { "kind", "MirroredGamma" },
                              { "params", { { "alpha", 4.0 }, { "theta", 0.2 } } } };
const json kMolliLinear = { { "kind", "MolliLinear" }, { "params", { { "L", 2.0 } } } };

const std::vector<std::string> kStudies = { "linear",   "bump",           "fluctuation",
                                            "stagnant", "small-bandwidth", "risk-floor" };

std::vector<std::size_t> powers_of_two(int lo, int hi)
{
  std::vector<std::size_t> out;
  for (int k = lo; k <= hi; ++k)
    out.push_back(std::size_t{ 1 } << k);
  return out;
}

// ---------------------------------------------------------------- CSV

using Cell = std::variant<std::monostate, double, std::int64_t, std::uint64_t, std::string, bool>;

std::string quote(const std::string& s)
{
  if (s.find_first_of(",\"\r\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"')
      out += '"';
    out += ch;
  }
  return out + "\"";
}

class CsvWriter
{
public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header)
    : os_(os)
    , width_(header.size())
  {
    for (std::size_t i = 0; i < header.size(); ++i)
      os_ << (i ? "," : "") << quote(header[i]);
    os_ << "\r\n";
  }

  void row(const std::vector<Cell>& cells)
  {
    if (cells.size() != width_)
      throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i)
        os_ << ',';
      os_ << render(cells[i]);
    }
    os_ << "\r\n";
  }

private:
  static std::string render(const Cell& c)
  {
    struct Visitor
    {
      std::string operator()(std::monostate) const { return ""; }
      std::string operator()(double v) const { return format_real(v); }
      std::string operator()(std::int64_t v) const { return std::to_string(v); }
      std::string operator()(std::uint64_t v) const { return std::to_string(v); }
      std::string operator()(const std::string& v) const { return quote(v); }
      std::string operator()(bool v) const { return v ? "true" : "false"; }
    };
    return std::visit(Visitor{}, c);
  }

  std::ostream& os_;
  std::size_t width_;
};

Cell count(std::size_t v)
{
  return static_cast<std::uint64_t>(v);
}

json fit_json(const RateFit& f)
{
  return { { "slope", f.slope },
           { "intercept", f.intercept },
           { "r_squared", f.r_squared },
           { "theoretical", f.theoretical } };
}

// ---------------------------------------------------------- validation

void require(bool ok, const std::string& what)
{
  if (!ok)
    throw DomainError(what);
}

void require_bandwidth(double b, const std::string& name)
{
  require(b > 0.0 && b <= 1.0, name + " must lie in (0, 1]");
}

void require_increasing(const std::vector<std::size_t>& v, std::size_t min_size,
                        const std::string& name)
{
  require(v.size() >= min_size, name + " needs at least " + std::to_string(min_size) + " values");
  for (std::size_t i = 0; i < v.size(); ++i) {
    require(v[i] >= 1, name + " values must be positive");
    require(i == 0 || v[i] > v[i - 1], name + " must be strictly increasing");
  }
}

void require_bandwidths(const std::vector<double>& v, std::size_t min_size, const std::string& name)
{
  require(v.size() >= min_size, name + " needs at least " + std::to_string(min_size) + " values");
  for (double b : v)
    require_bandwidth(b, name + " entries");
}

void require_p(double p)
{
  require(std::isfinite(p) && p >= 1.0, "p must be >= 1");
}

void require_beta(double beta)
{
  require(std::isfinite(beta) && beta > 0.0, "beta must be positive");
}

void require_reps(std::size_t reps)
{
  require(reps >= 2, "reps must be at least 2");
}

TestDensity density_of(const RunConfig& cfg)
{
  return TestDensity::from_json(cfg.density);
}

std::vector<double> read_sample(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw DomainError("cannot open input file \"" + path + "\"");
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos)
      continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string tok = line.substr(first, last - first + 1);
    std::istringstream ss(tok);
    ss.imbue(std::locale::classic());
    double v = 0.0;
    ss >> v;
    if (!ss || !ss.eof() || !std::isfinite(v) || v < 0.0)
      throw DomainError("input line " + std::to_string(lineno) +
                        " is not a nonnegative decimal: \"" + tok + "\"");
    out.push_back(v);
  }
  if (out.empty())
    throw DomainError("input file \"" + path + "\" holds no observations");
  return out;
}

std::unique_ptr<ThreadPool> make_pool(std::size_t threads)
{
  auto pool = std::make_unique<ThreadPool>(threads);
  if (pool->size() <= 1)
    return nullptr;
  return pool;
}

McOptions mc_options(const RunConfig& cfg, ThreadPool* pool)
{
  McOptions o;
  o.seed = cfg.seed;
  o.pool = pool;
  return o;
}

// ------------------------------------------------------------ commands

json cmd_estimate(const RunConfig& cfg, std::ostream& os, ThreadPool* pool)
{
  const auto data = read_sample(cfg.input);
  const auto grid = cfg.x_grid.empty() ? default_grid(cfg.b) : cfg.x_grid;
  const auto fhat = estimate(data, EstimatorConfig(cfg.b, grid), pool);
  CsvWriter w(os, { "x", "fhat" });
  for (std::size_t i = 0; i < grid.size(); ++i)
    w.row({ grid[i], fhat[i] });
  return { { "n", data.size() }, { "points", grid.size() } };
}

json cmd_density_eval(const RunConfig& cfg, std::ostream& os)
{
  const TestDensity d = density_of(cfg);
  CsvWriter w(os, { "x", "pdf" });
  for (double x : cfg.x_grid)
    w.row({ x, d.pdf(x) });
  return { { "kind", d.kind() }, { "sup_norm", d.sup_norm() } };
}

json cmd_sample(const RunConfig& cfg, std::ostream& os)
{
  const TestDensity d = density_of(cfg);
  Rng rng = make_rng(cfg.seed, { 0 });
  const Sample s = sample(d, cfg.n, rng);
  CsvWriter w(os, { "x" });
  for (double v : s)
    w.row({ v });
  return { { "n", s.size() } };
}

const std::vector<std::string> kRiskHeader = { "n",         "b",          "p",
                                               "risk_p",    "risk_norm",  "std_error",
                                               "bias_term", "stoch_term", "tail_bound",
                                               "replications" };

std::vector<Cell> risk_cells(const RiskReport& r)
{
  return { count(r.n),  r.b,          r.p,          r.risk_p,     r.risk_norm(),
           r.std_error, r.bias_term,  r.stoch_term, r.tail_bound, count(r.replications) };
}

json cmd_risk(const RunConfig& cfg, std::ostream& os, ThreadPool* pool)
{
  const RiskReport r = mc_risk(density_of(cfg), cfg.n, cfg.b, cfg.p, cfg.reps, mc_options(cfg, pool));
  CsvWriter w(os, kRiskHeader);
  w.row(risk_cells(r));
  return { { "risk_norm", r.risk_norm() }, { "bias_term", r.bias_term } };
}

// Tables that end with a fit row share these trailing columns.
const std::vector<std::string> kFitColumns = { "slope", "intercept", "r_squared", "theoretical" };

std::vector<std::string> with_fit(std::vector<std::string> head)
{
  head.insert(head.begin(), "record");
  head.insert(head.end(), kFitColumns.begin(), kFitColumns.end());
  return head;
}

std::vector<Cell> point_row(std::vector<Cell> cells)
{
  cells.insert(cells.begin(), std::string("point"));
  for (std::size_t i = 0; i < kFitColumns.size(); ++i)
    cells.emplace_back();
  return cells;
}

std::vector<Cell> fit_row(const std::string& name, std::size_t body, const RateFit& f)
{
  std::vector<Cell> cells{ name };
  for (std::size_t i = 0; i < body; ++i)
    cells.emplace_back();
  cells.insert(cells.end(), { f.slope, f.intercept, f.r_squared, f.theoretical });
  return cells;
}

json cmd_rate(const RunConfig& cfg, std::ostream& os, ThreadPool* pool)
{
  const auto r = rate_experiment(density_of(cfg), cfg.beta, cfg.p, cfg.c, cfg.n_grid, cfg.reps,
                                 mc_options(cfg, pool));
  CsvWriter w(os, with_fit(kRiskHeader));
  for (const auto& rep : r.reports)
    w.row(point_row(risk_cells(rep)));
  w.row(fit_row("fit", kRiskHeader.size(), r.fit));
  return { { "fit", fit_json(r.fit) } };
}

json cmd_oracle(const RunConfig& cfg, std::ostream& os, ThreadPool* pool)
{
  const BandwidthGrid grid{ cfg.per_decade, cfg.grid_lo, cfg.grid_hi, cfg.c };
  const auto r = oracle_bandwidth_slope(density_of(cfg), cfg.beta, cfg.p, cfg.n_grid, grid,
                                        cfg.reps, mc_options(cfg, pool));
  const std::vector<std::string> body = { "n", "b", "risk_norm", "std_error", "best" };
  CsvWriter w(os, with_fit(body));
  for (const auto& row : r.rows)
    w.row(point_row({ count(row.n), row.b, row.risk_norm, row.std_error, row.best }));
  w.row(fit_row("fit", body.size(), r.fit));
  return { { "fit", fit_json(r.fit) },
           { "log_factor_nondecreasing", r.log_factor_nondecreasing },
           { "edge_minimum", r.edge_minimum },
           { "best_b", r.best_b } };
}

const std::vector<std::string> kBiasBody = { "b", "value", "region_value", "scaled",
                                             "region_scaled" };

void write_bias(CsvWriter& w, const BiasResult& r, bool region)
{
  for (const auto& row : r.rows)
    w.row(point_row({ row.b, row.value, row.region_value, row.scaled, row.region_scaled }));
  w.row(fit_row("fit", kBiasBody.size(), r.fit));
  if (region)
    w.row(fit_row("region_fit", kBiasBody.size(), r.region_fit));
}

json bias_json(const BiasResult& r, bool region)
{
  json j = { { "fit", fit_json(r.fit) }, { "min_scaled", r.min_scaled } };
  if (region) {
    j["region_fit"] = fit_json(r.region_fit);
    j["region_min_scaled"] = r.region_min_scaled;
  }
  return j;
}

json cmd_endpoint(const RunConfig& cfg, std::ostream& os)
{
  const auto r = endpoint_leakage(cfg.p, cfg.b_grid, cfg.control_b);
  CsvWriter w(os, with_fit(kBiasBody));
  write_bias(w, r.leakage, false);
  w.row({ std::string("control"), r.control_b, r.control_bias, r.control_interior_sup,
          std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
          std::monostate{}, std::monostate{} });
  json j = bias_json(r.leakage, false);
  j["control_b"] = r.control_b;
  j["control_bias"] = r.control_bias;
  j["control_interior_sup"] = r.control_interior_sup;
  return j;
}

json cmd_lower_bounds(const RunConfig& cfg, std::ostream& os, ThreadPool* pool)
{
  const McOptions opts = mc_options(cfg, pool);
  if (cfg.study == "linear" || cfg.study == "bump") {
    const auto r = cfg.study == "linear" ? linear_bias_experiment(cfg.b_grid, cfg.L)
                                         : bump_bias_experiment(cfg.beta, cfg.b_grid, cfg.L);
    CsvWriter w(os, with_fit(kBiasBody));
    write_bias(w, r, true);
    return bias_json(r, true);
  }
  if (cfg.study == "fluctuation") {
    const auto r = fluctuation_experiment(cfg.n_grid, cfg.b_grid, cfg.reps, opts, cfg.min_nsqrtb);
    CsvWriter w(os, { "record", "n", "b", "x", "value", "std_error", "scaled" });
    for (const auto& row : r.rows)
      w.row({ std::string("fluctuation"), count(row.n), row.b, std::monostate{}, row.value,
              row.std_error, row.scaled });
    for (const auto& row : r.variance_rows)
      w.row({ std::string("variance"), std::monostate{}, row.b, row.x, row.variance,
              std::monostate{}, row.scaled });
    return { { "min_scaled", r.min_scaled }, { "min_variance_scaled", r.min_variance_scaled } };
  }
  if (cfg.study == "stagnant") {
    const auto r =
      stagnant_bandwidth_check(density_of(cfg), cfg.b, cfg.p, cfg.beta, cfg.n_grid, cfg.reps, opts);
    const std::vector<std::string> body = { "n", "risk_norm", "std_error", "ratio" };
    CsvWriter w(os, with_fit(body));
    for (const auto& row : r.rows)
      w.row(point_row({ count(row.n), row.risk_norm, row.std_error, row.ratio }));
    w.row(fit_row("fit", body.size(), r.fit));
    return { { "fit", fit_json(r.fit) },
             { "bias_term", r.bias_term },
             { "plateau_gap", r.plateau_gap },
             { "ratio_increasing", r.ratio_increasing } };
  }
  if (cfg.study == "small-bandwidth") {
    const auto rows = small_bandwidth_diagnostics(cfg.n_grid, cfg.s, cfg.C0);
    CsvWriter w(os, { "n", "s", "b", "delta", "event_prob", "event_bound", "kernel_max",
                      "fitted_c", "exponent_positive" });
    bool all = true;
    for (const auto& r : rows) {
      w.row({ count(r.n), r.s, r.b, r.delta, r.event_prob, r.event_bound, r.kernel_max,
              r.fitted_c, r.exponent_positive });
      all = all && r.exponent_positive;
    }
    return { { "C0", cfg.C0 }, { "exponent_positive", all } };
  }
  // risk-floor
  const auto rows = risk_floor_experiment(cfg.p_grid, cfg.b_grid, cfg.n_grid, cfg.reps, opts);
  CsvWriter w(os, { "p", "b", "n", "risk_p", "bound", "ratio" });
  double min_ratio = INFINITY;
  for (const auto& r : rows) {
    w.row({ r.p, r.b, count(r.n), r.risk_p, r.bound, r.ratio });
    min_ratio = std::min(min_ratio, r.ratio);
  }
  return { { "min_ratio", min_ratio } };
}

json cmd_regime_map(const RunConfig& cfg, std::ostream& os, ThreadPool* pool)
{
  RegimeFitOptions fit;
  fit.enabled = cfg.fit;
  fit.n_grid = cfg.n_grid;
  fit.reps = cfg.reps;
  fit.grid = { cfg.per_decade, cfg.grid_lo, cfg.grid_hi, cfg.c };
  const auto cells = regime_map(cfg.p_grid, cfg.beta_grid, fit, mc_options(cfg, pool));
  CsvWriter w(os, { "p", "beta", "predicted", "fitted_slope", "oracle_b" });
  for (const auto& c : cells) {
    Cell slope = std::monostate{};
    Cell ob = std::monostate{};
    if (cfg.fit) {
      slope = c.fitted_slope;
      ob = c.oracle_b;
    }
    w.row({ c.p, c.beta, to_string(c.predicted), slope, ob });
  }
  return { { "cells", cells.size() } };
}

json cmd_regularity(const RunConfig& cfg, std::ostream& os)
{
  const auto scans = regularity_scan(cfg.alpha_grid, cfg.beta_grid, cfg.theta);
  CsvWriter w(os, { "alpha", "beta", "m", "slope", "bounded", "predicted", "agree" });
  std::size_t agree = 0;
  for (const auto& s : scans) {
    w.row({ s.alpha, s.beta, static_cast<std::int64_t>(s.m), s.slope, s.bounded, s.predicted,
            s.bounded == s.predicted });
    agree += s.bounded == s.predicted;
  }
  return { { "cells", scans.size() }, { "agree", agree } };
}

json cmd_bounds_check(std::ostream& os)
{
  const auto checks = bounds_check();
  CsvWriter w(os, { "check", "points", "worst", "threshold", "holds" });
  bool all = true;
  for (const auto& c : checks) {
    w.row({ c.name, count(c.points), c.worst, c.threshold, c.holds });
    all = all && c.holds;
  }
  return { { "all_hold", all } };
}

std::string error_name(const NumericalError& e)
{
  if (dynamic_cast<const QuadratureNonConvergence*>(&e))
    return "QuadratureNonConvergence";
  if (dynamic_cast<const NegativeMass*>(&e))
    return "NegativeMass";
  if (dynamic_cast<const EnvelopeViolation*>(&e))
    return "EnvelopeViolation";
  if (dynamic_cast<const ConvergenceError*>(&e))
    return "ConvergenceError";
  return "NumericalError";
}

template <class T>
void read_field(const json& j, const char* key, T& field)
{
  if (!j.contains(key))
    return;
  try {
    field = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DomainError(std::string("config field \"") + key + "\": " + e.what());
  }
}

} // namespace

const std::vector<std::string>& commands()
{
  static const std::vector<std::string> names = {
    "estimate",   "density-eval", "sample",          "risk",            "rate",        "oracle-rate",
    "endpoint",   "lower-bounds", "regime-map",      "regularity-scan", "bounds-check"
  };
  return names;
}

std::string version()
{
  return GKDE_VERSION;
}

std::string format_real(double v)
{
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunConfig defaults_for(const std::string& command)
{
  bool known = false;
  for (const auto& c : commands())
    known = known || c == command;
  if (!known)
    throw DomainError("unknown command \"" + command + "\"");
  RunConfig cfg;
  cfg.command = command;
  if (command == "oracle-rate") {
    cfg.p = 8.0;
    cfg.c = 0.2;
    cfg.reps = 100;
  } else if (command == "lower-bounds") {
    cfg.reps = 200;
  } else if (command == "regime-map") {
    cfg.reps = 20;
    cfg.c = 0.2;
    cfg.per_decade = 6;
    cfg.grid_lo = -4;
    cfg.grid_hi = 4;
  }
  return cfg;
}

RunConfig resolve(RunConfig cfg)
{
  const std::string& c = cfg.command;
  if (cfg.density.is_null()) {
    if (c == "lower-bounds" && cfg.study == "stagnant")
      cfg.density = kMolliLinear;
    else if (c == "density-eval" || c == "sample" || c == "risk" || c == "rate" ||
             c == "oracle-rate")
      cfg.density = kMirroredGamma;
  }
  auto fill = [](auto& grid, auto values) {
    if (grid.empty())
      grid = values;
  };
  if (c == "density-eval") {
    std::vector<double> xs;
    for (int i = 0; i <= 100; ++i)
      xs.push_back(i / 100.0);
    fill(cfg.x_grid, xs);
  } else if (c == "rate") {
    fill(cfg.n_grid, powers_of_two(8, 14));
  } else if (c == "oracle-rate") {
    fill(cfg.n_grid, powers_of_two(8, 13));
  } else if (c == "endpoint") {
    fill(cfg.b_grid, std::vector<double>{ 0.05, 0.02, 0.01, 0.005, 0.002 });
  } else if (c == "lower-bounds") {
    const std::string& s = cfg.study;
    if (s == "linear") {
      fill(cfg.b_grid, std::vector<double>{ 0.02, 0.01, 0.005, 0.002 });
    } else if (s == "bump") {
      fill(cfg.b_grid, bump_bandwidths(1, 5));
    } else if (s == "fluctuation") {
      fill(cfg.n_grid, std::vector<std::size_t>{ 1024, 4096 });
      fill(cfg.b_grid, std::vector<double>{ 0.02, 0.01, 0.005 });
    } else if (s == "stagnant") {
      fill(cfg.n_grid, powers_of_two(8, 14));
    } else if (s == "small-bandwidth") {
      fill(cfg.n_grid, std::vector<std::size_t>{ 100, 1000, 10000, 100000 });
    } else if (s == "risk-floor") {
      fill(cfg.p_grid, std::vector<double>{ 1.0, 2.0, 4.0 });
      fill(cfg.b_grid, std::vector<double>{ 0.02, 0.01, 0.005 });
      fill(cfg.n_grid, std::vector<std::size_t>{ 1024, 4096 });
    }
  } else if (c == "regime-map") {
    fill(cfg.p_grid, std::vector<double>{ 1, 1.5, 2, 2.5, 3, 3.25, 3.5, 3.75, 4, 5, 6, 8 });
    fill(cfg.beta_grid, std::vector<double>{ 0.25, 0.5, 1, 1.5, 2, 2.5, 3, 4 });
    fill(cfg.n_grid, std::vector<std::size_t>{ 256, 512, 1024, 2048 });
  } else if (c == "regularity-scan") {
    fill(cfg.alpha_grid, std::vector<double>{ 1.5, 2, 3, 4 });
    fill(cfg.beta_grid, std::vector<double>{ 0.5, 1, 2 });
  }
  return cfg;
}

json to_json(const RunConfig& cfg)
{
  return { { "command", cfg.command },
           { "density", cfg.density },
           { "n", cfg.n },
           { "b", cfg.b },
           { "beta", cfg.beta },
           { "p", cfg.p },
           { "c", cfg.c },
           { "reps", cfg.reps },
           { "L", cfg.L },
           { "theta", cfg.theta },
           { "control_b", cfg.control_b },
           { "s", cfg.s },
           { "C0", cfg.C0 },
           { "min_nsqrtb", cfg.min_nsqrtb },
           { "per_decade", cfg.per_decade },
           { "grid_lo", cfg.grid_lo },
           { "grid_hi", cfg.grid_hi },
           { "study", cfg.study },
           { "fit", cfg.fit },
           { "n_grid", cfg.n_grid },
           { "b_grid", cfg.b_grid },
           { "p_grid", cfg.p_grid },
           { "beta_grid", cfg.beta_grid },
           { "alpha_grid", cfg.alpha_grid },
           { "x_grid", cfg.x_grid },
           { "input", cfg.input },
           { "output", cfg.output },
           { "meta", cfg.meta },
           { "seed", cfg.seed },
           { "threads", cfg.threads } };
}

RunConfig config_from_json(const json& j)
{
  if (!j.is_object() || !j.contains("command") || !j["command"].is_string())
    throw DomainError("config must be an object with a string \"command\"");
  RunConfig cfg = defaults_for(j["command"].get<std::string>());
  if (j.contains("density"))
    cfg.density = j["density"];
  read_field(j, "n", cfg.n);
  read_field(j, "b", cfg.b);
  read_field(j, "beta", cfg.beta);
  read_field(j, "p", cfg.p);
  read_field(j, "c", cfg.c);
  read_field(j, "reps", cfg.reps);
  read_field(j, "L", cfg.L);
  read_field(j, "theta", cfg.theta);
  read_field(j, "control_b", cfg.control_b);
  read_field(j, "s", cfg.s);
  read_field(j, "C0", cfg.C0);
  read_field(j, "min_nsqrtb", cfg.min_nsqrtb);
  read_field(j, "per_decade", cfg.per_decade);
  read_field(j, "grid_lo", cfg.grid_lo);
  read_field(j, "grid_hi", cfg.grid_hi);
  read_field(j, "study", cfg.study);
  read_field(j, "fit", cfg.fit);
  read_field(j, "n_grid", cfg.n_grid);
  read_field(j, "b_grid", cfg.b_grid);
  read_field(j, "p_grid", cfg.p_grid);
  read_field(j, "beta_grid", cfg.beta_grid);
  read_field(j, "alpha_grid", cfg.alpha_grid);
  read_field(j, "x_grid", cfg.x_grid);
  read_field(j, "input", cfg.input);
  read_field(j, "output", cfg.output);
  read_field(j, "meta", cfg.meta);
  read_field(j, "seed", cfg.seed);
  read_field(j, "threads", cfg.threads);
  return resolve(std::move(cfg));
}

void validate(const RunConfig& cfg)
{
  const std::string& c = cfg.command;
  defaults_for(c); // rejects unknown commands
  require(!cfg.output.empty(), "output path must not be empty");
  const bool uses_density = !cfg.density.is_null();
  if (uses_density)
    density_of(cfg);

  if (c == "estimate") {
    require(!cfg.input.empty(), "estimate needs --input");
    require_bandwidth(cfg.b, "b");
    EstimatorConfig(cfg.b, cfg.x_grid.empty() ? std::vector<double>{ 0.0 } : cfg.x_grid);
  } else if (c == "density-eval") {
    require(uses_density, "density-eval needs --density");
    require(!cfg.x_grid.empty(), "x grid must not be empty");
    for (double x : cfg.x_grid)
      require(std::isfinite(x), "x grid entries must be finite");
  } else if (c == "sample") {
    require(uses_density, "sample needs --density");
    require(cfg.n >= 1, "n must be positive");
  } else if (c == "risk") {
    require(uses_density, "risk needs --density");
    require(cfg.n >= 1, "n must be positive");
    require_bandwidth(cfg.b, "b");
    require_p(cfg.p);
    require_reps(cfg.reps);
  } else if (c == "rate" || c == "oracle-rate") {
    require(uses_density, c + " needs --density");
    require_beta(cfg.beta);
    require_p(cfg.p);
    require(cfg.c > 0.0 && std::isfinite(cfg.c), "c must be positive");
    require_reps(cfg.reps);
    require_increasing(cfg.n_grid, 4, "n grid");
    if (c == "oracle-rate") {
      require(cfg.per_decade >= 1, "per-decade must be positive");
      require(cfg.grid_hi - cfg.grid_lo + 1 >= 8, "the bandwidth grid needs at least 8 values");
    }
  } else if (c == "endpoint") {
    require_p(cfg.p);
    require_bandwidths(cfg.b_grid, 4, "b grid");
    require_bandwidth(cfg.control_b, "control b");
  } else if (c == "lower-bounds") {
    bool known = false;
    for (const auto& s : kStudies)
      known = known || s == cfg.study;
    require(known, "unknown study \"" + cfg.study + "\"");
    const std::string& s = cfg.study;
    if (s == "linear") {
      require(cfg.L > 1.0, "L must exceed 1");
      require_bandwidths(cfg.b_grid, 4, "b grid");
    } else if (s == "bump") {
      require(cfg.beta > 0.0 && cfg.beta <= 2.0, "beta must lie in (0, 2] for the bump study");
      require(cfg.L > 1.0, "L must exceed 1");
      require_bandwidths(cfg.b_grid, 4, "b grid");
      for (double b : cfg.b_grid)
        bump_density(cfg.beta, b, cfg.L);
    } else if (s == "fluctuation" || s == "risk-floor") {
      require_reps(cfg.reps);
      require_increasing(cfg.n_grid, 1, "n grid");
      require_bandwidths(cfg.b_grid, 1, "b grid");
      if (s == "risk-floor") {
        require(!cfg.p_grid.empty(), "p grid must not be empty");
        for (double p : cfg.p_grid)
          require_p(p);
      }
    } else if (s == "stagnant") {
      require(uses_density, "stagnant needs a density");
      require_bandwidth(cfg.b, "b");
      require_p(cfg.p);
      require_beta(cfg.beta);
      require_reps(cfg.reps);
      require_increasing(cfg.n_grid, 4, "n grid");
    } else if (s == "small-bandwidth") {
      require(cfg.s > 0.0 && cfg.C0 > 0.0, "s and C0 must be positive");
      require_increasing(cfg.n_grid, 1, "n grid");
      require(static_cast<double>(cfg.n_grid.front()) > cfg.s, "need n > s");
    }
  } else if (c == "regime-map") {
    for (double p : cfg.p_grid)
      require(p >= 1.0 && p <= 8.0, "p grid must lie in [1, 8]");
    for (double beta : cfg.beta_grid)
      require(beta > 0.0 && beta <= 4.0, "beta grid must lie in (0, 4]");
    require(!cfg.p_grid.empty() && !cfg.beta_grid.empty(), "grids must not be empty");
    if (cfg.fit) {
      require_reps(cfg.reps);
      require_increasing(cfg.n_grid, 4, "n grid");
      require(cfg.grid_hi - cfg.grid_lo + 1 >= 8, "the bandwidth grid needs at least 8 values");
    }
  } else if (c == "regularity-scan") {
    require(!cfg.alpha_grid.empty() && !cfg.beta_grid.empty(), "grids must not be empty");
    for (double a : cfg.alpha_grid)
      require(a > 1.0, "alpha grid entries must exceed 1");
    for (double beta : cfg.beta_grid)
      require(beta > 0.0 && beta <= 4.0, "beta grid must lie in (0, 4]");
    require(cfg.theta > 0.0, "theta must be positive");
  }
}

std::uint64_t resolve_seed(bool flag_given, std::uint64_t flag_value, std::uint64_t fallback)
{
  if (flag_given)
    return flag_value;
  const char* env = std::getenv("GKDE_SEED");
  if (env == nullptr || *env == '\0')
    return fallback;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (errno != 0 || end == env || *end != '\0' || env[0] == '-')
    throw DomainError(std::string("GKDE_SEED is not an unsigned 64-bit integer: \"") + env + "\"");
  return v;
}

json execute(const RunConfig& cfg, std::ostream& csv)
{
  auto pool = make_pool(cfg.threads);
  ThreadPool* p = pool.get();
  const std::string& c = cfg.command;
  if (c == "estimate")
    return cmd_estimate(cfg, csv, p);
  if (c == "density-eval")
    return cmd_density_eval(cfg, csv);
  if (c == "sample")
    return cmd_sample(cfg, csv);
  if (c == "risk")
    return cmd_risk(cfg, csv, p);
  if (c == "rate")
    return cmd_rate(cfg, csv, p);
  if (c == "oracle-rate")
    return cmd_oracle(cfg, csv, p);
  if (c == "endpoint")
    return cmd_endpoint(cfg, csv);
  if (c == "lower-bounds")
    return cmd_lower_bounds(cfg, csv, p);
  if (c == "regime-map")
    return cmd_regime_map(cfg, csv, p);
  if (c == "regularity-scan")
    return cmd_regularity(cfg, csv);
  if (c == "bounds-check")
    return cmd_bounds_check(csv);
  throw DomainError("unknown command \"" + c + "\"");
}

std::string meta_path(const RunConfig& cfg)
{
  if (!cfg.meta.empty())
    return cfg.meta;
  if (cfg.output == "-")
    return "stdout.meta.json";
  return cfg.output + ".meta.json";
}

int run(const RunConfig& cfg_in, std::ostream& err)
{
  const auto start = std::chrono::steady_clock::now();
  RunConfig cfg;
  try {
    cfg = resolve(cfg_in);
    validate(cfg);
  } catch (const DomainError& e) {
    err << "gkde " << cfg_in.command << ": invalid configuration: " << e.what() << "\n";
    return kExitValidation;
  }

  std::ostringstream csv;
  csv.imbue(std::locale::classic());
  json results;
  try {
    results = execute(cfg, csv);
  } catch (const DomainError& e) {
    err << "gkde " << cfg.command << ": invalid configuration: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "gkde " << cfg.command << ": " << error_name(e) << ": " << e.what() << "\n";
    return kExitNumerical;
  }

  if (cfg.output == "-") {
    std::cout << csv.str() << std::flush;
  } else {
    std::ofstream out(cfg.output, std::ios::binary);
    out << csv.str();
    if (!out) {
      err << "gkde " << cfg.command << ": cannot write \"" << cfg.output << "\"\n";
      return kExitValidation;
    }
  }

  const double wall =
    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const json meta = { { "config", to_json(cfg) },
                      { "seed", cfg.seed },
                      { "wall_time_seconds", wall },
                      { "version", version() },
                      { "results", results } };
  std::ofstream side(meta_path(cfg));
  side << meta.dump(2) << "\n";
  if (!side) {
    err << "gkde " << cfg.command << ": cannot write \"" << meta_path(cfg) << "\"\n";
    return kExitValidation;
  }
  return kExitOk;
}

} // namespace gkde::cli
