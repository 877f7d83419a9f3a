#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mineig/config.hpp"
#include "mineig/verify.hpp"

namespace mineig {

// One verified claim: a bound, the probability evidence gathered for it, and
// the verdict. Estimate/exact/status are absent in bounds-only runs.
struct ScenarioResult {
  std::string label;
  BoundResult bound;
  std::optional<EmpiricalEstimate> estimate;
  std::optional<double> exact_prob;
  std::optional<VerdictStatus> status;
  double margin = 0.0;
};

// The prior anti-order bound expressed relative to ours. The value is computed
// from the unrounded bound so the algebraic relation holds exactly on the
// report columns.
struct ReferenceValue {
  std::string relation;  // "d_times_bound" or "2d_times_bound"
  double value = 0.0;
  std::string note;
};

struct Report {
  std::string version;
  ExperimentConfig config;
  std::vector<ScenarioResult> results;
  std::vector<PropertyReport> properties;
  std::optional<ReferenceValue> anti_order_reference;
  std::string status;  // worst of the per-result verdicts, or "error"
  std::string error;
  double wall_clock_ms = 0.0;

  bool ok() const { return status != "violation" && status != "error"; }
};

enum class ReportFormat { Json, Csv };

ReportFormat report_format_from_name(const std::string& name);

// Nearest double to the 12-significant-digit decimal rounding of v.
double round_sig(double v, int digits = 12);

// Aggregate status from the individual results ("pass" when none carry a
// verdict at all).
std::string aggregate_status(const std::vector<ScenarioResult>& results);

std::string emit_report(const Report& report, ReportFormat format);
void write_report(const Report& report, const std::string& path, ReportFormat format);

// Suite-level rollup over one report per config file.
struct SuiteSummary {
  std::vector<std::string> files;
  std::vector<Report> reports;
  std::vector<std::string> errors;  // "<file>: <message>" for configs that failed to run
  int passes = 0;
  int tights = 0;
  int violations = 0;

  bool ok() const { return violations == 0 && errors.empty(); }
};

std::string emit_suite_summary(const SuiteSummary& suite, ReportFormat format);

}  // namespace mineig
