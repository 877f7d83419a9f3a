#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mineig/discrete_dist.hpp"
#include "mineig/processes.hpp"
#include "mineig/rng.hpp"
#include "mineig/samplers.hpp"
#include "mineig/sym_matrix.hpp"

namespace mineig {

// Distribution literal. Kinds: tight_example (needs a, p), bounded_iid
// (needs m), explicit_atoms (needs atoms).
struct DistSpec {
  std::string kind;
  double p = 0.0;
  double m = 0.0;
  std::optional<SymMatrix> a;
  std::vector<Atom> atoms;

  DiscreteMatrixDist build(int dim) const;
};

struct StoppingConfig {
  std::string kind = "fixed_n";  // fixed_n | first_hit
  std::size_t horizon = 1;

  StoppingRule build() const;
};

struct SuperUniformConfig {
  std::string kind = "scalar_times_identity";  // | diagonal_plus_psd | identity
  std::optional<SymMatrix> psd_part;

  SuperUniformSpec build(int dim) const;
};

// One experiment: a scenario tag plus everything needed to rebuild it.
// Parsed from a JSON config file; serializes back to an equal config.
struct ExperimentConfig {
  std::string scenario;
  int dim = 1;
  std::int64_t trials = 100000;
  int workers = 1;
  double ci_level = 0.99;
  SeedSpec seed{};
  std::string out;  // optional output path; empty means stdout

  std::map<std::string, double> params;
  std::map<std::string, SymMatrix> matrices;
  std::map<std::string, std::vector<SymMatrix>> matrix_lists;
  std::optional<DistSpec> distribution;
  std::vector<DistSpec> distributions;  // heterogeneous factors (master)
  std::optional<SuperUniformConfig> super_uniform;
  std::optional<ScalarDist> factors;
  std::optional<StoppingConfig> stopping;
  std::vector<double> gammas;

  bool has_param(const std::string& name) const;
  double param(const std::string& name) const;  // throws naming the field
  double param_or(const std::string& name, double fallback) const;
  const SymMatrix& matrix(const std::string& name) const;
  const std::vector<SymMatrix>& matrix_list(const std::string& name) const;
  const DistSpec& dist_spec() const;
};

std::vector<std::string> known_scenarios();

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

// Scenario-specific required-field and range checks. Throws
// std::invalid_argument naming the offending field.
void validate_config(const ExperimentConfig& config);

}  // namespace mineig
