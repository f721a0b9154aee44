#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "focklab/report.hpp"
#include "focklab/unitaries.hpp"

// Named check suites over parameter grids, cutoff-convergence studies, and
// persistent machine-readable run outputs.

namespace focklab {

/// Invalid suite names, malformed grids or unknown tolerance keys. The CLI
/// maps this to exit code 2.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GridSpec {
  std::vector<int> n;
  std::vector<double> r;
  std::vector<double> theta;
  std::vector<Complex> alpha;
  std::vector<int> m_block;
};

struct RunConfig {
  std::string suite = "all";
  GridSpec grid;
  CutoffSpec cutoff{20, 20};
  /// When false, each suite derives its own adequate cutoff per point; an
  /// explicit cutoff (CLI flag or config file) is used literally everywhere.
  bool cutoff_overridden = false;
  int interior_margin = 2;
  std::map<std::string, double> tolerances;  // check-id -> tolerance override
  std::filesystem::path output_dir = "reports";
  std::uint64_t seed = 1;
  int max_cutoff = 128;  // per-mode cap for convergence doubling
};

/// The grid mirrors the free parameters of the checks: excitation numbers,
/// mixing angle and phase, displacement amplitudes, and retained-family sizes.
RunConfig default_config();

const std::vector<std::string>& suite_names();
const std::vector<std::string>& known_check_ids();
const std::vector<std::string>& convergence_check_ids();

/// Throws ConfigError on invalid suite, empty/non-finite grids, bad margins
/// or unknown tolerance keys.
void validate_config(const RunConfig& config);

RunConfig config_from_json(const std::string& text);
std::string config_to_json(const RunConfig& config);

/// Evaluates the configured suite over the Cartesian grid in deterministic
/// lexicographic order (n, r, theta, alpha, m). Per-point evaluation errors
/// are recorded as failed reports; the sweep never aborts.
std::vector<CheckReport> sweep_grid(const RunConfig& config);

/// Re-evaluates one registered check while doubling the cutoff per mode,
/// capped at config.max_cutoff. Converged when successive values differ by
/// less than tolerance/10; otherwise the verdict is flagged — an inadequate
/// cap never passes silently.
CheckReport convergence_study(const std::string& check_id, const RunConfig& config);

struct RunManifest {
  std::string artifact;
  std::string version;
  std::string timestamp;
  std::string config_json;
  int pass = 0;
  int fail = 0;
  int flagged = 0;

  int total() const { return pass + fail + flagged; }
};

std::string manifest_to_json(const RunManifest& manifest);

struct RunResult {
  RunManifest manifest;
  std::vector<CheckReport> reports;
  int exit_code = 0;
};

/// Exit-code contract: 0 all pass, 1 any fail, 3 flagged with no fails.
/// (2 is reserved for usage/config errors raised before evaluation.)
int exit_code_for(const std::vector<CheckReport>& reports);

/// Runs the sweep and writes reports.json and manifest.json (and reports.csv
/// when write_csv) into config.output_dir.
RunResult run_suite(const RunConfig& config, bool write_csv = false);

}  // namespace focklab
