#include "mineig/verify.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mineig {

namespace {

constexpr double kExactSlack = 1e-9;

SymMatrix random_sym(RngStream& rng, int d, double scale = 1.0) {
  Matrix m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = scale * rng.normal();
  }
  return SymMatrix(m);  // construction symmetrizes
}

SymMatrix random_psd(RngStream& rng, int d, double scale = 1.0) {
  Matrix g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = scale * rng.normal();
  }
  return SymMatrix(Matrix(g * g.transpose() / d));
}

DiscreteMatrixDist random_discrete(RngStream& rng, int d, int n_atoms, double scale) {
  std::vector<double> weights(static_cast<std::size_t>(n_atoms));
  double total = 0.0;
  for (double& w : weights) {
    w = 0.05 + rng.uniform01();
    total += w;
  }
  std::vector<Atom> atoms;
  atoms.reserve(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double p = weights[i] / total;
    if (i + 1 == weights.size()) p = 1.0 - acc;  // exact unit sum
    acc += p;
    atoms.push_back({p, random_sym(rng, d, scale)});
  }
  return DiscreteMatrixDist(std::move(atoms));
}

}  // namespace

double EmpiricalEstimate::std_err() const {
  if (trials <= 0) return 0.0;
  return std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(trials));
}

EmpiricalEstimate estimate_event_probability(const std::function<bool(RngStream&)>& event_sampler,
                                             std::int64_t trials, const SeedSpec& seed,
                                             double level, int workers) {
  if (trials < 1) throw std::invalid_argument("estimate_event_probability: trials must be >= 1");
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("estimate_event_probability: level must lie in (0, 1)");
  }
  if (workers < 1) workers = 1;
  if (static_cast<std::int64_t>(workers) > trials) workers = static_cast<int>(trials);

  std::vector<std::int64_t> counts(static_cast<std::size_t>(workers), 0);
  std::exception_ptr first_error;
  std::mutex error_mutex;

  const auto run_range = [&](int w, std::int64_t lo, std::int64_t hi) {
    try {
      std::int64_t hits = 0;
      for (std::int64_t k = lo; k < hi; ++k) {
        RngStream stream(seed, static_cast<std::uint64_t>(k));
        if (event_sampler(stream)) ++hits;
      }
      counts[static_cast<std::size_t>(w)] = hits;
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  if (workers == 1) {
    run_range(0, 0, trials);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const std::int64_t chunk = (trials + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::int64_t lo = static_cast<std::int64_t>(w) * chunk;
      const std::int64_t hi = std::min(trials, lo + chunk);
      pool.emplace_back(run_range, w, lo, hi);
    }
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::int64_t successes = 0;
  for (std::int64_t c : counts) successes += c;

  EmpiricalEstimate est;
  est.trials = trials;
  est.successes = successes;
  est.level = level;
  est.p_hat = static_cast<double>(successes) / static_cast<double>(trials);
  const double tail = (1.0 - level) / 2.0;
  using Binom = boost::math::binomial_distribution<double>;
  est.ci_low = Binom::find_lower_bound_on_p(static_cast<double>(trials),
                                            static_cast<double>(successes), tail);
  est.ci_high = Binom::find_upper_bound_on_p(static_cast<double>(trials),
                                             static_cast<double>(successes), tail);
  return est;
}

double enumerate_exact_probability(
    const DiscreteMatrixDist& dist, int n,
    const std::function<bool(const std::vector<SymMatrix>&)>& event) {
  double prob = 0.0;
  enumerate_product_support(dist, n,
                            [&](double p, const std::vector<const SymMatrix*>& values) {
                              std::vector<SymMatrix> seq;
                              seq.reserve(values.size());
                              for (const SymMatrix* v : values) seq.push_back(*v);
                              if (event(seq)) prob += p;
                            });
  return prob;
}

const char* to_string(VerdictStatus status) {
  switch (status) {
    case VerdictStatus::Pass: return "pass";
    case VerdictStatus::Tight: return "tight";
    case VerdictStatus::Violation: return "violation";
  }
  return "unknown";
}

VerificationVerdict check_bound_holds(const EmpiricalEstimate& estimate,
                                      const BoundResult& bound) {
  VerificationVerdict v;
  v.bound = bound;
  v.estimate = estimate;
  v.margin = std::max(2.0 * estimate.std_err(), kExactSlack);
  if (estimate.ci_low > bound.value) {
    v.status = VerdictStatus::Violation;
  } else if (std::abs(estimate.p_hat - bound.value) <= v.margin) {
    v.status = VerdictStatus::Tight;
  } else {
    v.status = VerdictStatus::Pass;
  }
  return v;
}

VerificationVerdict check_bound_holds(double exact_prob, const BoundResult& bound) {
  VerificationVerdict v;
  v.bound = bound;
  v.exact_prob = exact_prob;
  v.margin = kExactSlack;
  if (exact_prob > bound.value + kExactSlack) {
    v.status = VerdictStatus::Violation;
  } else if (std::abs(exact_prob - bound.value) <= v.margin) {
    v.status = VerdictStatus::Tight;
  } else {
    v.status = VerdictStatus::Pass;
  }
  return v;
}

double conditional_supermartingale_check(
    const DiscreteMatrixDist& dist, std::size_t depth,
    const std::function<double(const std::vector<SymMatrix>&)>& l_fn) {
  if (depth > 6) {
    throw std::length_error("conditional_supermartingale_check: depth " + std::to_string(depth) +
                            " exceeds cap 6");
  }
  if (dist.atoms().size() > 4) {
    throw std::length_error("conditional_supermartingale_check: branching " +
                            std::to_string(dist.atoms().size()) + " exceeds cap 4");
  }
  double worst = 0.0;
  std::vector<SymMatrix> prefix;
  const std::function<void()> walk = [&]() {
    if (prefix.size() >= depth) return;
    const double l_here = l_fn(prefix);
    double expected_next = 0.0;
    for (const Atom& atom : dist.atoms()) {
      prefix.push_back(atom.value);
      expected_next += atom.prob * l_fn(prefix);
      prefix.pop_back();
    }
    worst = std::max(worst, expected_next - l_here);
    for (const Atom& atom : dist.atoms()) {
      prefix.push_back(atom.value);
      walk();
      prefix.pop_back();
    }
  };
  walk();
  return worst;
}

const char* to_string(PropertyTag tag) {
  switch (tag) {
    case PropertyTag::GoldenThompson: return "golden_thompson";
    case PropertyTag::CgfSubadditivity: return "cgf_subadditivity";
    case PropertyTag::MinEigExpIdentity: return "min_eig_exp_identity";
    case PropertyTag::TraceMonotone: return "trace_monotone";
    case PropertyTag::OperatorMonotoneQ: return "operator_monotone_q";
    case PropertyTag::SimilarityTraceConsistency: return "similarity_trace_consistency";
    case PropertyTag::ChebyshevRemarkTraces: return "chebyshev_remark_traces";
  }
  return "unknown";
}

PropertyTag property_tag_from_name(const std::string& name) {
  for (PropertyTag tag : all_property_tags()) {
    if (name == to_string(tag)) return tag;
  }
  throw std::invalid_argument("unknown property tag: " + name);
}

std::vector<PropertyTag> all_property_tags() {
  return {PropertyTag::GoldenThompson,     PropertyTag::CgfSubadditivity,
          PropertyTag::MinEigExpIdentity,  PropertyTag::TraceMonotone,
          PropertyTag::OperatorMonotoneQ,  PropertyTag::SimilarityTraceConsistency,
          PropertyTag::ChebyshevRemarkTraces};
}

namespace {

PropertyReport run_golden_thompson(int instances, const SeedSpec& seed) {
  PropertyReport rep{"golden_thompson", instances, 0, 0.0, true, ""};
  for (int i = 0; i < instances; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    const int d = 2 + i % 5;
    const SymMatrix a = random_sym(rng, d);
    const SymMatrix b = random_sym(rng, d);
    const double lhs = trace_of(sym_exp(a + b));
    const double rhs = (sym_exp(a).mat() * sym_exp(b).mat()).trace();
    const double residual = (lhs - rhs) / std::max(1.0, std::abs(rhs));
    rep.worst_residual = std::max(rep.worst_residual, residual);
    if (residual > 1e-8) ++rep.violations;
  }
  rep.pass = rep.violations == 0;
  return rep;
}

PropertyReport run_cgf_subadditivity(int instances, const SeedSpec& seed) {
  PropertyReport rep{"cgf_subadditivity", instances, 0, 0.0, true, ""};
  static constexpr double kThetas[] = {0.5, -0.5, 1.0, -1.0, 2.0, -2.0};
  for (int i = 0; i < instances; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    const int d = 1 + i % 3;
    const int factors = 1 + i % 3;
    const double theta = kThetas[i % 6];
    std::vector<DiscreteMatrixDist> dists;
    dists.reserve(static_cast<std::size_t>(factors));
    for (int k = 0; k < factors; ++k) {
      dists.push_back(random_discrete(rng, d, 2 + (i + k) % 2, 0.7));
    }
    double lhs = 0.0;
    enumerate_product_support(dists, [&](double p, const std::vector<const SymMatrix*>& xs) {
      SymMatrix sum = SymMatrix::zero(d);
      for (const SymMatrix* x : xs) sum = sum + *x;
      lhs += p * trace_of(sym_exp(sum.scaled(theta)));
    });
    SymMatrix cgf = SymMatrix::zero(d);
    for (const DiscreteMatrixDist& dist : dists) cgf = cgf + sym_log(dist.exact_mgf(theta));
    const double rhs = trace_of(sym_exp(cgf));
    const double residual = (lhs - rhs) / std::max(1.0, std::abs(rhs));
    rep.worst_residual = std::max(rep.worst_residual, residual);
    if (residual > 1e-8) ++rep.violations;
  }
  rep.pass = rep.violations == 0;
  return rep;
}

PropertyReport run_min_eig_exp_identity(int instances, const SeedSpec& seed) {
  PropertyReport rep{"min_eig_exp_identity", instances, 0, 0.0, true, ""};
  for (int i = 0; i < instances; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    const int d = 1 + i % 6;
    // The identity is scale-free; keep theta * (lmax - lmin) moderate so the
    // e^{theta lmax} roundoff in the reconstructed exponential cannot swamp
    // the e^{theta lmin} reference.
    const SymMatrix y_raw = random_sym(rng, d);
    const SymMatrix y = y_raw.scaled(1.0 / std::max(1.0, op_norm(y_raw) / 1.5));
    const double theta = 0.1 + 2.9 * rng.uniform01();
    const double lhs = min_eig(sym_exp(y.scaled(theta)));
    const double rhs = std::exp(theta * min_eig(y));
    const double residual = std::abs(lhs - rhs) / rhs;
    rep.worst_residual = std::max(rep.worst_residual, residual);
    if (residual > 1e-9) ++rep.violations;
  }
  rep.pass = rep.violations == 0;
  return rep;
}

PropertyReport run_trace_monotone(int instances, const SeedSpec& seed) {
  PropertyReport rep{"trace_monotone", instances, 0, 0.0, true, ""};
  for (int i = 0; i < instances; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    const int d = 1 + i % 6;
    const SymMatrix a = random_sym(rng, d);
    const SymMatrix b = a + random_psd(rng, d);
    const double tr_a = trace_of(sym_exp(a));
    const double tr_b = trace_of(sym_exp(b));
    const double residual = (tr_a - tr_b) / std::max(1.0, tr_b);
    rep.worst_residual = std::max(rep.worst_residual, residual);
    if (residual > 1e-8) ++rep.violations;
  }
  rep.pass = rep.violations == 0;
  return rep;
}

PropertyReport run_operator_monotone_q(int instances, const SeedSpec& seed) {
  PropertyReport rep{"operator_monotone_q", instances, 0, 0.0, true, ""};
  for (int i = 0; i < instances; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    const int d = 1 + i % 6;
    const SymMatrix a = random_psd(rng, d);
    const SymMatrix b = a + random_psd(rng, d);
    const double q = 0.1 * (1 + i % 10);
    const SymMatrix diff = sym_pow(b, q) - sym_pow(a, q);
    const double residual = -min_eig(diff) / std::max(1.0, op_norm(diff));
    rep.worst_residual = std::max(rep.worst_residual, residual);
    if (residual > 1e-8) ++rep.violations;
  }
  rep.pass = rep.violations == 0;
  return rep;
}

PropertyReport run_similarity_trace_consistency(int instances, const SeedSpec& seed) {
  PropertyReport rep{"similarity_trace_consistency", instances, 0, 0.0, true, ""};
  for (int i = 0; i < instances; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    const int d = 1 + i % 6;
    const SymMatrix b = random_psd(rng, d);
    const SymMatrix a = random_psd(rng, d) + SymMatrix::identity(d).scaled(0.5);
    const int p = 1 + i % 3;
    const double via_similarity = similarity_power_trace(b, a, static_cast<double>(p));
    const Matrix factor = b.mat() * a.mat().inverse();
    Matrix prod = Matrix::Identity(d, d);
    for (int k = 0; k < p; ++k) prod = prod * factor;
    const double direct = prod.trace();
    const double residual = std::abs(via_similarity - direct) / std::max(1.0, std::abs(direct));
    rep.worst_residual = std::max(rep.worst_residual, residual);
    if (residual > 1e-8) ++rep.violations;
  }
  rep.pass = rep.violations == 0;
  return rep;
}

PropertyReport run_chebyshev_remark_traces() {
  // Fixed two-atom instance: X = diag(-2, 1) w.p. 4/5, diag(1, -10) w.p. 1/5,
  // A = diag(1, 1/2). Both trace expressions are evaluated through
  // independent code paths; all matrices here are diagonal, hence commute,
  // and the two values coincide (= 1972/25).
  PropertyReport rep{"chebyshev_remark_traces", 1, 0, 0.0, true, ""};
  const SymMatrix x1 = SymMatrix::diagonal({-2.0, 1.0});
  const SymMatrix x2 = SymMatrix::diagonal({1.0, -10.0});
  const SymMatrix a = SymMatrix::diagonal({1.0, 0.5});
  const DiscreteMatrixDist dist({{0.8, x1}, {0.2, x2}});
  const SymMatrix mean = dist.exact_mean();

  // Route 1: E tr((|X - EX| A^{-1})^2) with the explicit non-symmetric product.
  const Matrix a_inv = a.mat().inverse();
  double direct = 0.0;
  for (const Atom& atom : dist.atoms()) {
    const Matrix m = sym_abs(atom.value - mean).mat() * a_inv;
    direct += atom.prob * (m * m).trace();
  }

  // Route 2: tr(E(X - EX)^2 A^{-2}).
  Matrix second_moment = Matrix::Zero(2, 2);
  for (const Atom& atom : dist.atoms()) {
    second_moment += atom.prob * (atom.value - mean).squared().mat();
  }
  const double moment_route = (second_moment * a_inv * a_inv).trace();

  std::ostringstream notes;
  notes.precision(12);
  notes << "direct=" << direct << " moment=" << moment_route
        << "; matrices commute, values coincide (1972/25); the claimed "
           "inequality does not hold on this instance";
  rep.notes = notes.str();
  rep.worst_residual = std::abs(direct - moment_route) / std::max(1.0, std::abs(moment_route));
  rep.pass = true;  // recorded observation, not an asserted inequality
  return rep;
}

}  // namespace

PropertyReport property_run(PropertyTag tag, int instances, const SeedSpec& seed) {
  if (instances < 1 && tag != PropertyTag::ChebyshevRemarkTraces) {
    throw std::invalid_argument("property_run: instances must be >= 1");
  }
  switch (tag) {
    case PropertyTag::GoldenThompson: return run_golden_thompson(instances, seed);
    case PropertyTag::CgfSubadditivity: return run_cgf_subadditivity(instances, seed);
    case PropertyTag::MinEigExpIdentity: return run_min_eig_exp_identity(instances, seed);
    case PropertyTag::TraceMonotone: return run_trace_monotone(instances, seed);
    case PropertyTag::OperatorMonotoneQ: return run_operator_monotone_q(instances, seed);
    case PropertyTag::SimilarityTraceConsistency:
      return run_similarity_trace_consistency(instances, seed);
    case PropertyTag::ChebyshevRemarkTraces: return run_chebyshev_remark_traces();
  }
  throw std::logic_error("property_run: unknown tag");
}

}  // namespace mineig
