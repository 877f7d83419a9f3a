#include "mineig/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "mineig/version.hpp"

namespace mineig {

namespace {

using Json = nlohmann::ordered_json;

std::string format_sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

Json json_number(double v) { return round_sig(v); }

Json json_of_bound(const BoundResult& b) {
  Json j;
  j["theorem_id"] = b.theorem_id;
  j["value"] = json_number(b.value);
  if (b.theta_star) j["theta_star"] = json_number(*b.theta_star);
  if (b.sigma_sq) j["sigma_sq"] = json_number(*b.sigma_sq);
  if (!b.notes.empty()) j["notes"] = b.notes;
  return j;
}

Json json_of_estimate(const EmpiricalEstimate& e) {
  Json j;
  j["trials"] = e.trials;
  j["successes"] = e.successes;
  j["level"] = e.level;
  j["p_hat"] = json_number(e.p_hat);
  j["ci_low"] = json_number(e.ci_low);
  j["ci_high"] = json_number(e.ci_high);
  return j;
}

Json json_of_result(const ScenarioResult& r) {
  Json j;
  j["label"] = r.label;
  j["bound"] = json_of_bound(r.bound);
  if (r.exact_prob) j["exact_prob"] = json_number(*r.exact_prob);
  if (r.estimate) j["estimate"] = json_of_estimate(*r.estimate);
  if (r.status) {
    j["status"] = to_string(*r.status);
    j["margin"] = json_number(r.margin);
  }
  return j;
}

Json json_of_property(const PropertyReport& p) {
  Json j;
  j["name"] = p.name;
  j["instances"] = p.instances;
  j["violations"] = p.violations;
  j["worst_residual"] = json_number(p.worst_residual);
  j["pass"] = p.pass;
  if (!p.notes.empty()) j["notes"] = p.notes;
  return j;
}

Json json_of_report(const Report& report) {
  Json j;
  j["version"] = report.version.empty() ? kLibraryVersion : report.version;
  j["scenario"] = report.config.scenario;
  j["config"] = Json::parse(serialize_config(report.config));
  Json results = Json::array();
  for (const ScenarioResult& r : report.results) results.push_back(json_of_result(r));
  j["results"] = results;
  if (report.anti_order_reference) {
    const ReferenceValue& ref = *report.anti_order_reference;
    Json rj;
    rj["relation"] = ref.relation;
    rj["value"] = json_number(ref.value);
    if (!ref.note.empty()) rj["note"] = ref.note;
    j["anti_order_reference"] = rj;
  }
  if (!report.properties.empty()) {
    Json props = Json::array();
    for (const PropertyReport& p : report.properties) props.push_back(json_of_property(p));
    j["properties"] = props;
  }
  j["status"] = report.status;
  if (!report.error.empty()) j["error"] = report.error;
  j["wall_clock_ms"] = report.wall_clock_ms;
  return j;
}

void append_csv_rows(std::string& out, const Report& report) {
  for (const ScenarioResult& r : report.results) {
    std::string prob, ci_low, ci_high;
    if (r.exact_prob) {
      prob = format_sig(*r.exact_prob, 12);
      ci_low = prob;
      ci_high = prob;
    }
    if (r.estimate) {
      if (prob.empty()) prob = format_sig(r.estimate->p_hat, 12);
      ci_low = format_sig(r.estimate->ci_low, 12);
      ci_high = format_sig(r.estimate->ci_high, 12);
    }
    const std::string status = r.status ? to_string(*r.status) : "none";
    out += report.config.scenario + "," + std::to_string(report.config.dim) + "," +
           format_sig(r.bound.value, 12) + "," + prob + "," + ci_low + "," + ci_high + "," +
           status + "\n";
  }
}

constexpr const char* kCsvHeader = "scenario,d,bound,prob,ci_low,ci_high,status\n";

}  // namespace

ReportFormat report_format_from_name(const std::string& name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  throw std::invalid_argument("unknown report format '" + name + "' (expected json or csv)");
}

double round_sig(double v, int digits) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format_sig(v, digits).c_str(), nullptr);
}

std::string aggregate_status(const std::vector<ScenarioResult>& results) {
  bool any_tight = false;
  for (const ScenarioResult& r : results) {
    if (!r.status) continue;
    if (*r.status == VerdictStatus::Violation) return "violation";
    any_tight = any_tight || *r.status == VerdictStatus::Tight;
  }
  return any_tight ? "tight" : "pass";
}

std::string emit_report(const Report& report, ReportFormat format) {
  if (format == ReportFormat::Json) return json_of_report(report).dump(2) + "\n";
  std::string out = kCsvHeader;
  append_csv_rows(out, report);
  return out;
}

void write_report(const Report& report, const std::string& path, ReportFormat format) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << emit_report(report, format);
  if (!out) throw std::runtime_error("write failed for output file '" + path + "'");
}

std::string emit_suite_summary(const SuiteSummary& suite, ReportFormat format) {
  if (format == ReportFormat::Csv) {
    std::string out = kCsvHeader;
    for (const Report& r : suite.reports) append_csv_rows(out, r);
    return out;
  }
  Json j;
  j["version"] = kLibraryVersion;
  Json aggregate;
  aggregate["configs"] = suite.files.size();
  aggregate["passes"] = suite.passes;
  aggregate["tights"] = suite.tights;
  aggregate["violations"] = suite.violations;
  aggregate["errors"] = suite.errors.size();
  j["aggregate"] = aggregate;
  if (!suite.errors.empty()) j["errors"] = suite.errors;
  Json reports = Json::array();
  for (const Report& r : suite.reports) reports.push_back(json_of_report(r));
  j["reports"] = reports;
  j["status"] = suite.ok() ? (suite.tights > 0 ? "tight" : "pass")
                           : (suite.violations > 0 ? "violation" : "error");
  return j.dump(2) + "\n";
}

}  // namespace mineig
