#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mineig/bounds.hpp"
#include "mineig/discrete_dist.hpp"
#include "mineig/rng.hpp"
#include "mineig/sym_matrix.hpp"

namespace mineig {

// Monte Carlo estimate with an exact (tail-inversion) binomial confidence
// interval at the given two-sided level.
struct EmpiricalEstimate {
  std::int64_t trials = 0;
  std::int64_t successes = 0;
  double level = 0.99;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;

  double std_err() const;  // sqrt(p_hat (1 - p_hat) / trials)
};

// Counts event occurrences over per-trial substreams. Deterministic given the
// seed: trial k always draws from substream (seed, k), so the result is
// bit-identical for any worker count.
EmpiricalEstimate estimate_event_probability(const std::function<bool(RngStream&)>& event_sampler,
                                             std::int64_t trials, const SeedSpec& seed,
                                             double level = 0.99, int workers = 1);

// Exact event probability by summing product-atom weights where the event
// holds, over the full length-n support.
double enumerate_exact_probability(
    const DiscreteMatrixDist& dist, int n,
    const std::function<bool(const std::vector<SymMatrix>&)>& event);

enum class VerdictStatus { Pass, Tight, Violation };
const char* to_string(VerdictStatus status);

// Comparison of an estimated or exact event probability against a bound.
// Violation requires statistical significance (ci_low above the bound) or an
// exact excess beyond 1e-9; tight means |prob - bound| <= max(2 SE, 1e-9).
struct VerificationVerdict {
  BoundResult bound;
  std::optional<EmpiricalEstimate> estimate;
  std::optional<double> exact_prob;
  VerdictStatus status = VerdictStatus::Pass;
  double margin = 0.0;
};

VerificationVerdict check_bound_holds(const EmpiricalEstimate& estimate, const BoundResult& bound);
VerificationVerdict check_bound_holds(double exact_prob, const BoundResult& bound);

// Max over tree nodes of E[L(prefix + X) | prefix] - L(prefix), with the
// conditional expectation computed exactly over the atom branching. A
// supermartingale claim holds when the result is <= 1e-9.
// Caps: depth <= 6, branching <= 4.
double conditional_supermartingale_check(
    const DiscreteMatrixDist& dist, std::size_t depth,
    const std::function<double(const std::vector<SymMatrix>&)>& l_fn);

// Proof-step property checks over random instances.
enum class PropertyTag {
  GoldenThompson,
  CgfSubadditivity,
  MinEigExpIdentity,
  TraceMonotone,
  OperatorMonotoneQ,
  SimilarityTraceConsistency,
  ChebyshevRemarkTraces,
};

const char* to_string(PropertyTag tag);
PropertyTag property_tag_from_name(const std::string& name);
std::vector<PropertyTag> all_property_tags();

struct PropertyReport {
  std::string name;
  int instances = 0;
  int violations = 0;
  double worst_residual = 0.0;  // signed; positive means violation direction
  bool pass = true;
  std::string notes;
};

PropertyReport property_run(PropertyTag tag, int instances, const SeedSpec& seed);

}  // namespace mineig
