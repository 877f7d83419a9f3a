#include <CLI11.hpp>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mineig/scenarios.hpp"
#include "mineig/verify.hpp"
#include "mineig/version.hpp"

namespace {

using namespace mineig;

struct CliOptions {
  std::string config_path;
  std::string out;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::optional<double> ci_level;
  std::optional<int> workers;
};

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument(what + " is not an unsigned integer: '" + text + "'");
  }
  if (pos != text.size()) {
    throw std::invalid_argument(what + " is not an unsigned integer: '" + text + "'");
  }
  return v;
}

// Seed precedence: --seed beats MINEIG_SEED beats the config value.
void apply_overrides(const CliOptions& opts, ExperimentConfig& config) {
  if (opts.seed) {
    config.seed.master_seed = *opts.seed;
  } else if (const char* env = std::getenv("MINEIG_SEED")) {
    config.seed.master_seed = parse_u64(env, "MINEIG_SEED");
  }
  if (opts.trials) config.trials = *opts.trials;
  if (opts.ci_level) config.ci_level = *opts.ci_level;
  if (opts.workers) config.workers = *opts.workers;
}

void deliver(const std::string& text, const std::string& path, ReportFormat format) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  (void)format;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << text;
}

int run_config(const CliOptions& opts, RunMode mode) {
  ExperimentConfig config = load_config_file(opts.config_path);
  apply_overrides(opts, config);
  const Report report = run_scenario(config, mode);
  const ReportFormat format = report_format_from_name(opts.format);
  const std::string target = !opts.out.empty() ? opts.out : config.out;
  if (!target.empty()) {
    write_report(report, target, format);
  } else {
    std::cout << emit_report(report, format);
  }
  return report.status == "violation" ? 1 : 0;
}

int run_suite_cmd(const CliOptions& opts, const std::string& dir) {
  const SuiteSummary suite =
      run_suite(dir, RunMode::Verify, [&](ExperimentConfig& c) { apply_overrides(opts, c); });
  const ReportFormat format = report_format_from_name(opts.format);
  deliver(emit_suite_summary(suite, format), opts.out, format);
  if (!suite.errors.empty()) {
    for (const std::string& err : suite.errors) std::cerr << "error: " << err << "\n";
    return 2;
  }
  return suite.violations > 0 ? 1 : 0;
}

int run_properties(const CliOptions& opts, const std::vector<std::string>& tag_names,
                   int instances) {
  std::vector<PropertyTag> tags;
  if (tag_names.empty()) {
    tags = all_property_tags();
  } else {
    for (const std::string& name : tag_names) tags.push_back(property_tag_from_name(name));
  }
  std::uint64_t master = SeedSpec{}.master_seed;
  if (opts.seed) {
    master = *opts.seed;
  } else if (const char* env = std::getenv("MINEIG_SEED")) {
    master = parse_u64(env, "MINEIG_SEED");
  }

  Report report;
  report.config.scenario = "properties";
  report.config.seed.master_seed = master;
  report.config.trials = 0;
  bool all_pass = true;
  std::uint64_t stream = 0;
  for (PropertyTag tag : tags) {
    report.properties.push_back(property_run(tag, instances, SeedSpec{master, stream++}));
    all_pass = all_pass && report.properties.back().pass;
  }
  report.status = all_pass ? "pass" : "violation";
  const ReportFormat format = report_format_from_name(opts.format);
  deliver(emit_report(report, format), opts.out, format);
  return all_pass ? 0 : 1;
}

void add_common_options(CLI::App* cmd, CliOptions& opts) {
  cmd->add_option("--seed", opts.seed, "Master seed override (beats MINEIG_SEED and the config)");
  cmd->add_option("--out", opts.out, "Output path (default: config 'out' field, else stdout)");
  cmd->add_option("--format", opts.format, "Report format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
}

void add_run_options(CLI::App* cmd, CliOptions& opts) {
  add_common_options(cmd, opts);
  cmd->add_option("config", opts.config_path, "Experiment config file")->required();
  cmd->add_option("--trials", opts.trials, "Monte Carlo trial count override");
  cmd->add_option("--ci-level", opts.ci_level, "Binomial confidence level override");
  cmd->add_option("--workers", opts.workers, "Worker thread count (output is identical for any)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("mineig ") + kLibraryVersion +
               ": minimum-eigenvalue tail bounds, verified by Monte Carlo and exact enumeration"};
  app.require_subcommand(1);

  CliOptions opts;
  std::string suite_dir;
  std::vector<std::string> tag_names;
  int instances = 1000;

  CLI::App* bound = app.add_subcommand("bound", "Compute the scenario's bound formulas only");
  add_run_options(bound, opts);

  CLI::App* verify = app.add_subcommand(
      "verify", "Monte Carlo verification plus the exact oracle where the support is enumerable");
  add_run_options(verify, opts);

  CLI::App* enumerate_cmd =
      app.add_subcommand("enumerate", "Exact oracle only; errors when no oracle exists");
  add_run_options(enumerate_cmd, opts);

  CLI::App* properties =
      app.add_subcommand("properties", "Run the proof-step property checks on random instances");
  add_common_options(properties, opts);
  properties->add_option("--tags", tag_names,
                         "Property names to run (default: all)")
      ->delimiter(',');
  properties->add_option("--instances", instances, "Random instances per property");

  CLI::App* suite = app.add_subcommand("suite", "Run every *.json config in a directory");
  add_common_options(suite, opts);
  suite->add_option("dir", suite_dir, "Directory of config files")->required();
  suite->add_option("--trials", opts.trials, "Monte Carlo trial count override");
  suite->add_option("--ci-level", opts.ci_level, "Binomial confidence level override");
  suite->add_option("--workers", opts.workers, "Worker thread count (output is identical for any)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Collapse CLI11's per-error exit codes onto the documented contract:
    // 0 for --help, 2 for any usage error.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (bound->parsed()) return run_config(opts, RunMode::BoundsOnly);
    if (verify->parsed()) return run_config(opts, RunMode::Verify);
    if (enumerate_cmd->parsed()) return run_config(opts, RunMode::EnumerateOnly);
    if (properties->parsed()) return run_properties(opts, tag_names, instances);
    if (suite->parsed()) return run_suite_cmd(opts, suite_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
