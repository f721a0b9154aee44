#pragma once

#include <chrono>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "focklab/fock.hpp"

// Machine-readable check records. JSON is the canonical serialization; CSV
// flattens parameters into columns; the table form is a human summary.

namespace focklab {

enum class Verdict { pass, fail, flagged };

std::string to_string(Verdict verdict);
Verdict verdict_from_string(const std::string& text);

struct ConvergencePoint {
  CutoffSpec cutoff;
  double value = 0.0;
};

/// One named check: a closed-form value, an independently computed numeric
/// value, the expected reference, and the resulting verdict. Parameters are
/// kept as an ordered flat list of name/value pairs so that serialization is
/// deterministic.
struct CheckReport {
  std::string check_id;
  std::string paper_anchor;
  std::vector<std::pair<std::string, double>> params;
  Complex value_closed_form{0.0, 0.0};
  Complex value_numeric{0.0, 0.0};
  double reference = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;
  double tolerance = 0.0;
  bool relative_mode = false;
  Verdict verdict = Verdict::fail;
  std::vector<ConvergencePoint> convergence;
  double wall_time = 0.0;
  std::string error;  // nonempty when evaluation threw; values are then meaningless
};

/// Builds a two-route check: abs_error is the worst disagreement among
/// closed-vs-reference, numeric-vs-reference and closed-vs-numeric, so a pass
/// certifies both route agreement and reference agreement.
CheckReport make_two_route_check(std::string check_id, std::string paper_anchor,
                                 std::vector<std::pair<std::string, double>> params,
                                 Complex value_closed_form, Complex value_numeric,
                                 double reference, double tolerance,
                                 bool relative_mode = false);

/// Builds a check whose error was measured by the caller (max deviation over
/// a matrix of elements, a residual norm, ...). The recorded values are
/// representative; abs_error is authoritative.
CheckReport make_defect_check(std::string check_id, std::string paper_anchor,
                              std::vector<std::pair<std::string, double>> params,
                              Complex value_closed_form, Complex value_numeric,
                              double reference, double abs_error, double tolerance,
                              bool relative_mode = false);

/// Builds an inequality check `value >= bound - tolerance`; abs_error is the
/// violation magnitude max(0, bound - value).
CheckReport make_bound_check(std::string check_id, std::string paper_anchor,
                             std::vector<std::pair<std::string, double>> params,
                             double value, double bound, double tolerance);

/// Records a check whose evaluation threw.
CheckReport make_error_report(std::string check_id, std::string paper_anchor,
                              std::vector<std::pair<std::string, double>> params,
                              std::string message, Verdict verdict = Verdict::fail);

/// Lap timer for attributing wall time to individual checks.
class Stopwatch {
 public:
  Stopwatch() : last_(std::chrono::steady_clock::now()) {}
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return seconds;
  }

 private:
  std::chrono::steady_clock::time_point last_;
};

enum class ReportFormat { json, csv, table };

ReportFormat report_format_from_string(const std::string& text);

std::string to_json(const std::vector<CheckReport>& reports);
std::string to_csv(const std::vector<CheckReport>& reports);
std::string to_table(const std::vector<CheckReport>& reports);

void emit_report(const std::vector<CheckReport>& reports, ReportFormat format,
                 std::ostream& out);

/// Parses the canonical JSON array back into reports (bit-exact round trip).
std::vector<CheckReport> reports_from_json(const std::string& text);

}  // namespace focklab
