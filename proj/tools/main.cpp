// Command-line harness: named check suites, parameter sweeps, and cutoff
// convergence studies with machine-readable reports.
//
//   focklab verify <suite> [--n ... --r ... --theta ... --alpha ... --m-block ...]
//   focklab sweep --config <file> [overrides]
//   focklab converge <check-id> [point parameters]
//
// Exit codes: 0 all pass, 1 any fail, 2 usage/config error, 3 flagged only.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "focklab/harness.hpp"
#include "focklab/version.hpp"

namespace {

using focklab::Complex;
using focklab::ConfigError;
using focklab::RunConfig;

Complex parse_complex(const std::string& text) {
  std::string s;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  }
  if (s.empty()) throw ConfigError("empty complex literal");

  auto to_double = [](const std::string& part) {
    try {
      size_t used = 0;
      const double v = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("bad numeric literal: '" + part + "'");
    }
  };

  const char tail = s.back();
  if (tail != 'i' && tail != 'j') {
    return Complex(to_double(s), 0.0);
  }

  const std::string body = s.substr(0, s.size() - 1);
  size_t split = std::string::npos;
  for (size_t idx = body.size(); idx-- > 1;) {
    if ((body[idx] == '+' || body[idx] == '-') && body[idx - 1] != 'e' &&
        body[idx - 1] != 'E') {
      split = idx;
      break;
    }
  }
  std::string real_part = split == std::string::npos ? "" : body.substr(0, split);
  std::string imag_part = split == std::string::npos ? body : body.substr(split);
  double imag = 1.0;
  if (imag_part.empty() || imag_part == "+") imag = 1.0;
  else if (imag_part == "-") imag = -1.0;
  else imag = to_double(imag_part);
  const double real = real_part.empty() ? 0.0 : to_double(real_part);
  return Complex(real, imag);
}

struct FlagValues {
  std::vector<int> n;
  std::vector<double> r;
  std::vector<double> theta;
  std::vector<std::string> alpha;
  std::vector<int> m_block;
  int cutoff_b = 0;
  int cutoff_c = 0;
  int margin = 0;
  std::vector<std::string> tol;
  std::string out;
  std::string format = "table";
  std::uint64_t seed = 0;
  int max_cutoff = 0;
};

struct FlagOptions {
  CLI::Option* n = nullptr;
  CLI::Option* r = nullptr;
  CLI::Option* theta = nullptr;
  CLI::Option* alpha = nullptr;
  CLI::Option* m_block = nullptr;
  CLI::Option* cutoff_b = nullptr;
  CLI::Option* cutoff_c = nullptr;
  CLI::Option* margin = nullptr;
  CLI::Option* tol = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* format = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* max_cutoff = nullptr;
};

FlagOptions add_common_flags(CLI::App* cmd, FlagValues& v) {
  FlagOptions o;
  o.n = cmd->add_option("--n", v.n, "excitation numbers");
  o.r = cmd->add_option("--r", v.r, "mixing angles (radians)");
  o.theta = cmd->add_option("--theta", v.theta, "mixing phases (radians)");
  o.alpha = cmd->add_option("--alpha", v.alpha, "displacement amplitudes, e.g. 0.5+0.2i");
  o.m_block = cmd->add_option("--m-block", v.m_block, "retained displaced-family sizes");
  o.cutoff_b = cmd->add_option("--cutoff-b", v.cutoff_b, "explicit b-mode cutoff");
  o.cutoff_c = cmd->add_option("--cutoff-c", v.cutoff_c, "explicit c-mode cutoff");
  o.margin = cmd->add_option("--margin", v.margin, "interior margin");
  o.tol = cmd->add_option("--tol", v.tol, "tolerance override, check-id=value");
  o.out = cmd->add_option("--out", v.out, "output directory for reports");
  o.format = cmd->add_option("--format", v.format, "stdout format: json|csv|table")
                 ->check(CLI::IsMember({"json", "csv", "table"}));
  o.seed = cmd->add_option("--seed", v.seed, "seed for randomized probe states");
  o.max_cutoff = cmd->add_option("--max-cutoff", v.max_cutoff,
                                 "per-mode cap for convergence doubling");
  return o;
}

void apply_flags(RunConfig& cfg, const FlagValues& v, const FlagOptions& o) {
  if (o.n->count() > 0) cfg.grid.n = v.n;
  if (o.r->count() > 0) cfg.grid.r = v.r;
  if (o.theta->count() > 0) cfg.grid.theta = v.theta;
  if (o.alpha->count() > 0) {
    cfg.grid.alpha.clear();
    for (const auto& s : v.alpha) cfg.grid.alpha.push_back(parse_complex(s));
  }
  if (o.m_block->count() > 0) cfg.grid.m_block = v.m_block;
  if (o.cutoff_b->count() > 0 || o.cutoff_c->count() > 0) {
    if (o.cutoff_b->count() == 0 || o.cutoff_c->count() == 0) {
      throw ConfigError("--cutoff-b and --cutoff-c must be given together");
    }
    cfg.cutoff = focklab::CutoffSpec{v.cutoff_b, v.cutoff_c};
    cfg.cutoff_overridden = true;
  }
  if (o.margin->count() > 0) cfg.interior_margin = v.margin;
  for (size_t i = 0; i < o.tol->count(); ++i) {
    const std::string& spec = v.tol[i];
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
      throw ConfigError("--tol expects check-id=value, got '" + spec + "'");
    }
    try {
      cfg.tolerances[spec.substr(0, eq)] = std::stod(spec.substr(eq + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad tolerance value in '" + spec + "'");
    }
  }
  if (o.out->count() > 0) cfg.output_dir = v.out;
  if (o.seed->count() > 0) cfg.seed = v.seed;
  if (o.max_cutoff->count() > 0) cfg.max_cutoff = v.max_cutoff;
}

void apply_env(RunConfig& cfg) {
  if (const char* dir = std::getenv("FOCKLAB_OUTPUT_DIR")) {
    if (*dir != '\0') cfg.output_dir = dir;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"focklab: two-mode Fock-space identity verification harness"};
  app.set_version_flag("--version", focklab::kVersion);
  app.require_subcommand(1);

  std::string verify_suite;
  FlagValues verify_values;
  CLI::App* verify = app.add_subcommand("verify", "run one named check suite");
  verify->add_option("suite", verify_suite, "suite name")
      ->required()
      ->check(CLI::IsMember(focklab::suite_names()));
  const FlagOptions verify_opts = add_common_flags(verify, verify_values);

  std::string sweep_config_path;
  std::string sweep_suite;
  FlagValues sweep_values;
  CLI::App* sweep = app.add_subcommand("sweep", "run suites from a JSON config file");
  sweep->add_option("--config", sweep_config_path, "JSON config file")->required();
  CLI::Option* sweep_suite_opt = sweep->add_option("--suite", sweep_suite, "suite override");
  const FlagOptions sweep_opts = add_common_flags(sweep, sweep_values);

  std::string converge_check;
  FlagValues converge_values;
  CLI::App* converge =
      app.add_subcommand("converge", "double the cutoff until a check stabilizes");
  converge->add_option("check-id", converge_check, "registered check id")
      ->required()
      ->check(CLI::IsMember(focklab::convergence_check_ids()));
  const FlagOptions converge_opts = add_common_flags(converge, converge_values);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed()) {
      RunConfig cfg = focklab::default_config();
      cfg.suite = verify_suite;
      apply_env(cfg);
      apply_flags(cfg, verify_values, verify_opts);
      const auto result = focklab::run_suite(cfg, verify_values.format == "csv");
      if (verify_values.format == "json") std::cout << focklab::to_json(result.reports);
      else if (verify_values.format == "csv") std::cout << focklab::to_csv(result.reports);
      else std::cout << focklab::to_table(result.reports);
      return result.exit_code;
    }

    if (sweep->parsed()) {
      std::ifstream in(sweep_config_path);
      if (!in) throw ConfigError("cannot open config file: " + sweep_config_path);
      std::stringstream buffer;
      buffer << in.rdbuf();
      RunConfig cfg = focklab::config_from_json(buffer.str());
      if (sweep_suite_opt->count() > 0) cfg.suite = sweep_suite;
      apply_env(cfg);
      apply_flags(cfg, sweep_values, sweep_opts);
      const auto result = focklab::run_suite(cfg, sweep_values.format == "csv");
      if (sweep_values.format == "json") std::cout << focklab::to_json(result.reports);
      else if (sweep_values.format == "csv") std::cout << focklab::to_csv(result.reports);
      else std::cout << focklab::to_table(result.reports);
      return result.exit_code;
    }

    if (converge->parsed()) {
      RunConfig cfg = focklab::default_config();
      apply_env(cfg);
      apply_flags(cfg, converge_values, converge_opts);
      const auto report = focklab::convergence_study(converge_check, cfg);
      std::cout << focklab::to_table({report});
      for (const auto& point : report.convergence) {
        std::printf("  cutoff (%d,%d) -> %.17g\n", point.cutoff.n_b_max,
                    point.cutoff.n_c_max, point.value);
      }
      switch (report.verdict) {
        case focklab::Verdict::pass: return 0;
        case focklab::Verdict::fail: return 1;
        case focklab::Verdict::flagged: return 3;
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
