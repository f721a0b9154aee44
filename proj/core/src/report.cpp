#include "focklab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace focklab {

namespace {

using ordered_json = nlohmann::ordered_json;

double rel_error_of(double abs_error, double reference) {
  return reference != 0.0 ? abs_error / std::abs(reference) : abs_error;
}

Verdict verdict_of(const CheckReport& r) {
  const double err = r.relative_mode ? r.rel_error : r.abs_error;
  return err <= r.tolerance ? Verdict::pass : Verdict::fail;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += "\"\"";
    else out += ch;
  }
  out += "\"";
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ordered_json complex_to_json(Complex z) {
  return ordered_json{{"re", z.real()}, {"im", z.imag()}};
}

Complex complex_from_json(const ordered_json& j) {
  return Complex(j.at("re").get<double>(), j.at("im").get<double>());
}

}  // namespace

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::flagged: return "flagged";
  }
  return "fail";
}

Verdict verdict_from_string(const std::string& text) {
  if (text == "pass") return Verdict::pass;
  if (text == "flagged") return Verdict::flagged;
  if (text == "fail") return Verdict::fail;
  throw std::invalid_argument("unknown verdict: " + text);
}

CheckReport make_two_route_check(std::string check_id, std::string paper_anchor,
                                 std::vector<std::pair<std::string, double>> params,
                                 Complex value_closed_form, Complex value_numeric,
                                 double reference, double tolerance, bool relative_mode) {
  CheckReport r;
  r.check_id = std::move(check_id);
  r.paper_anchor = std::move(paper_anchor);
  r.params = std::move(params);
  r.value_closed_form = value_closed_form;
  r.value_numeric = value_numeric;
  r.reference = reference;
  r.tolerance = tolerance;
  r.relative_mode = relative_mode;
  const double closed_vs_ref = std::abs(value_closed_form - Complex(reference));
  const double numeric_vs_ref = std::abs(value_numeric - Complex(reference));
  const double route_gap = std::abs(value_closed_form - value_numeric);
  r.abs_error = std::max({closed_vs_ref, numeric_vs_ref, route_gap});
  r.rel_error = rel_error_of(r.abs_error, reference);
  r.verdict = verdict_of(r);
  return r;
}

CheckReport make_defect_check(std::string check_id, std::string paper_anchor,
                              std::vector<std::pair<std::string, double>> params,
                              Complex value_closed_form, Complex value_numeric,
                              double reference, double abs_error, double tolerance,
                              bool relative_mode) {
  CheckReport r;
  r.check_id = std::move(check_id);
  r.paper_anchor = std::move(paper_anchor);
  r.params = std::move(params);
  r.value_closed_form = value_closed_form;
  r.value_numeric = value_numeric;
  r.reference = reference;
  r.tolerance = tolerance;
  r.relative_mode = relative_mode;
  r.abs_error = abs_error;
  r.rel_error = rel_error_of(abs_error, reference);
  r.verdict = verdict_of(r);
  return r;
}

CheckReport make_bound_check(std::string check_id, std::string paper_anchor,
                             std::vector<std::pair<std::string, double>> params,
                             double value, double bound, double tolerance) {
  CheckReport r;
  r.check_id = std::move(check_id);
  r.paper_anchor = std::move(paper_anchor);
  r.params = std::move(params);
  r.value_closed_form = Complex(bound);
  r.value_numeric = Complex(value);
  r.reference = bound;
  r.tolerance = tolerance;
  r.abs_error = std::max(0.0, bound - value);
  r.rel_error = rel_error_of(r.abs_error, bound);
  r.verdict = verdict_of(r);
  return r;
}

CheckReport make_error_report(std::string check_id, std::string paper_anchor,
                              std::vector<std::pair<std::string, double>> params,
                              std::string message, Verdict verdict) {
  CheckReport r;
  r.check_id = std::move(check_id);
  r.paper_anchor = std::move(paper_anchor);
  r.params = std::move(params);
  r.error = std::move(message);
  r.verdict = verdict;
  return r;
}

ReportFormat report_format_from_string(const std::string& text) {
  if (text == "json") return ReportFormat::json;
  if (text == "csv") return ReportFormat::csv;
  if (text == "table") return ReportFormat::table;
  throw std::invalid_argument("unknown report format: " + text);
}

std::string to_json(const std::vector<CheckReport>& reports) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : reports) {
    ordered_json params = ordered_json::object();
    for (const auto& [key, value] : r.params) params[key] = value;
    ordered_json conv = ordered_json::array();
    for (const auto& point : r.convergence) {
      conv.push_back(ordered_json{{"cutoff_b", point.cutoff.n_b_max},
                                  {"cutoff_c", point.cutoff.n_c_max},
                                  {"value", point.value}});
    }
    arr.push_back(ordered_json{{"check_id", r.check_id},
                               {"paper_anchor", r.paper_anchor},
                               {"params", std::move(params)},
                               {"value_closed_form", complex_to_json(r.value_closed_form)},
                               {"value_numeric", complex_to_json(r.value_numeric)},
                               {"reference", r.reference},
                               {"abs_error", r.abs_error},
                               {"rel_error", r.rel_error},
                               {"tolerance", r.tolerance},
                               {"mode", r.relative_mode ? "rel" : "abs"},
                               {"verdict", to_string(r.verdict)},
                               {"convergence", std::move(conv)},
                               {"wall_time", r.wall_time},
                               {"error", r.error}});
  }
  return arr.dump(2) + "\n";
}

std::vector<CheckReport> reports_from_json(const std::string& text) {
  const ordered_json arr = ordered_json::parse(text);
  std::vector<CheckReport> reports;
  reports.reserve(arr.size());
  for (const auto& j : arr) {
    CheckReport r;
    r.check_id = j.at("check_id").get<std::string>();
    r.paper_anchor = j.at("paper_anchor").get<std::string>();
    for (const auto& [key, value] : j.at("params").items()) {
      r.params.emplace_back(key, value.get<double>());
    }
    r.value_closed_form = complex_from_json(j.at("value_closed_form"));
    r.value_numeric = complex_from_json(j.at("value_numeric"));
    r.reference = j.at("reference").get<double>();
    r.abs_error = j.at("abs_error").get<double>();
    r.rel_error = j.at("rel_error").get<double>();
    r.tolerance = j.at("tolerance").get<double>();
    r.relative_mode = j.at("mode").get<std::string>() == "rel";
    r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    for (const auto& point : j.at("convergence")) {
      r.convergence.push_back({CutoffSpec{point.at("cutoff_b").get<int>(),
                                          point.at("cutoff_c").get<int>()},
                               point.at("value").get<double>()});
    }
    r.wall_time = j.at("wall_time").get<double>();
    r.error = j.at("error").get<std::string>();
    reports.push_back(std::move(r));
  }
  return reports;
}

std::string to_csv(const std::vector<CheckReport>& reports) {
  std::set<std::string> param_keys;
  for (const auto& r : reports) {
    for (const auto& [key, value] : r.params) param_keys.insert(key);
  }

  std::ostringstream out;
  out << "check_id,paper_anchor,verdict";
  for (const auto& key : param_keys) out << "," << key;
  out << ",value_closed_re,value_closed_im,value_numeric_re,value_numeric_im"
      << ",reference,abs_error,rel_error,tolerance,mode,wall_time,error\n";

  for (const auto& r : reports) {
    out << csv_escape(r.check_id) << "," << csv_escape(r.paper_anchor) << ","
        << to_string(r.verdict);
    for (const auto& key : param_keys) {
      out << ",";
      const auto it = std::find_if(r.params.begin(), r.params.end(),
                                   [&](const auto& kv) { return kv.first == key; });
      if (it != r.params.end()) out << fmt_double(it->second);
    }
    out << "," << fmt_double(r.value_closed_form.real())
        << "," << fmt_double(r.value_closed_form.imag())
        << "," << fmt_double(r.value_numeric.real())
        << "," << fmt_double(r.value_numeric.imag())
        << "," << fmt_double(r.reference)
        << "," << fmt_double(r.abs_error)
        << "," << fmt_double(r.rel_error)
        << "," << fmt_double(r.tolerance)
        << "," << (r.relative_mode ? "rel" : "abs")
        << "," << fmt_double(r.wall_time)
        << "," << csv_escape(r.error) << "\n";
  }
  return out.str();
}

std::string to_table(const std::vector<CheckReport>& reports) {
  std::ostringstream out;
  int pass = 0, fail = 0, flagged = 0;
  for (const auto& r : reports) {
    std::string params;
    for (const auto& [key, value] : r.params) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%s=%.6g ", key.c_str(), value);
      params += buf;
    }
    char line[512];
    if (r.error.empty()) {
      std::snprintf(line, sizeof(line), "%-7s %-34s %-44s err=%.3e tol=%.1e\n",
                    to_string(r.verdict).c_str(), r.check_id.c_str(), params.c_str(),
                    r.relative_mode ? r.rel_error : r.abs_error, r.tolerance);
    } else {
      std::snprintf(line, sizeof(line), "%-7s %-34s %-44s error: %s\n",
                    to_string(r.verdict).c_str(), r.check_id.c_str(), params.c_str(),
                    r.error.c_str());
    }
    out << line;
    switch (r.verdict) {
      case Verdict::pass: ++pass; break;
      case Verdict::fail: ++fail; break;
      case Verdict::flagged: ++flagged; break;
    }
  }
  out << "---\n" << reports.size() << " checks: " << pass << " pass, " << fail
      << " fail, " << flagged << " flagged\n";
  return out.str();
}

void emit_report(const std::vector<CheckReport>& reports, ReportFormat format,
                 std::ostream& out) {
  switch (format) {
    case ReportFormat::json: out << to_json(reports); break;
    case ReportFormat::csv: out << to_csv(reports); break;
    case ReportFormat::table: out << to_table(reports); break;
  }
}

}  // namespace focklab
