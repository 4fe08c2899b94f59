#pragma once

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace gkde::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

//! Subcommand names in the order they are documented.
const std::vector<std::string>& commands();

//! Library version string.
std::string version();

//! Full configuration of one invocation. Fields a command does not use keep
//! their defaults and are ignored.
struct RunConfig
{
  std::string command;
  nlohmann::json density; // {"kind": ..., "params": {...}}; null picks the command default

  std::size_t n = 1024;
  double b = 0.01;
  double beta = 2.0;
  double p = 2.0;
  double c = 1.0;
  std::size_t reps = 200;
  double L = 2.0;
  double theta = 0.2;
  double control_b = 0.02;
  double s = 2.0;  // n sqrt(b) for the small-bandwidth study
  double C0 = 1.0; // small-bandwidth window constant
  double min_nsqrtb = 10.0;
  int per_decade = 12;
  int grid_lo = -9;
  int grid_hi = 9;
  std::string study = "linear";
  bool fit = false; // regime-map: attach oracle slopes

  std::vector<std::size_t> n_grid;
  std::vector<double> b_grid;
  std::vector<double> p_grid;
  std::vector<double> beta_grid;
  std::vector<double> alpha_grid;
  std::vector<double> x_grid;

  std::string input;
  std::string output = "-"; // "-" is stdout
  std::string meta;         // sidecar path; empty means <output>.meta.json
  std::uint64_t seed = 42;
  std::size_t threads = 0; // 0 = hardware parallelism; never affects output

  bool operator==(const RunConfig&) const = default;
};

//! Defaults of one subcommand. Throws DomainError for an unknown command.
RunConfig defaults_for(const std::string& command);

//! Fills the density and every empty grid with the defaults of the command
//! (and, for lower-bounds, of the study).
RunConfig resolve(RunConfig cfg);

nlohmann::json to_json(const RunConfig& cfg);

//! Missing keys take the command defaults; the result is resolved. Throws
//! DomainError.
RunConfig config_from_json(const nlohmann::json& j);

//! Checks every precondition of the selected command (and parses the
//! density spec) without computing anything. Throws DomainError.
void validate(const RunConfig& cfg);

//! Resolves the seed: the flag if given, else GKDE_SEED, else the default.
//! Throws DomainError for an unparsable environment value.
std::uint64_t resolve_seed(bool flag_given, std::uint64_t flag_value, std::uint64_t fallback = 42);

//! Runs the command, writing CSV to `csv`. Returns a JSON summary that is
//! stored in the sidecar under "results". Throws DomainError and
//! NumericalError subclasses.
nlohmann::json execute(const RunConfig& cfg, std::ostream& csv);

//! Validates, executes, and writes the CSV plus the sidecar. Errors are
//! reported on `err` and mapped to exit codes 2 (validation) and
//! 3 (numerical failure).
int run(const RunConfig& cfg, std::ostream& err);

//! Sidecar path for a configuration.
std::string meta_path(const RunConfig& cfg);

//! Formats a real with 17 significant digits.
std::string format_real(double v);

} // namespace gkde::cli
