#include "mineig/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "mineig/matrix_exp.hpp"
#include "mineig/processes.hpp"
#include "mineig/samplers.hpp"
#include "mineig/version.hpp"

namespace mineig {

namespace {

// One verifiable inequality: the bound, a per-trial event sampler, and an
// exact oracle. Either evidence channel may be absent.
struct Claim {
  std::string label;
  BoundResult bound;
  std::function<bool(RngStream&)> sampler;
  std::function<double()> exact;
};

struct ScenarioPlan {
  std::vector<Claim> claims;
  std::optional<ReferenceValue> reference;
  std::vector<PropertyReport> properties;
};

ReferenceValue d_times(const BoundResult& b, int d, std::string note) {
  return {"d_times_bound", d * b.value, std::move(note)};
}

// Visits every sign vector in {-1,+1}^k with weight 2^-k.
void enumerate_sign_vectors(std::size_t k,
                            const std::function<void(double, const std::vector<int>&)>& visit) {
  if (k >= 63 || (std::size_t{1} << k) > kEnumerationCap) {
    throw std::length_error("sign enumeration: 2^" + std::to_string(k) +
                            " sequences exceed the cap of " + std::to_string(kEnumerationCap));
  }
  const double weight = std::ldexp(1.0, -static_cast<int>(k));
  std::vector<int> signs(k, -1);
  const std::size_t total = std::size_t{1} << k;
  for (std::size_t mask = 0; mask < total; ++mask) {
    for (std::size_t i = 0; i < k; ++i) signs[i] = (mask >> i) & 1 ? 1 : -1;
    visit(weight, signs);
  }
}

bool signs_fit_cap(std::size_t k) { return k < 63 && (std::size_t{1} << k) <= kEnumerationCap; }

// Visits every length-n factor sequence of a scalar distribution with its
// product probability.
void enumerate_factor_sequences(
    const ScalarDist& factors, std::size_t n,
    const std::function<void(double, const std::vector<double>&)>& visit) {
  const std::size_t arity = factors.values.size();
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) {
    count *= arity;
    if (count > kEnumerationCap) {
      throw std::length_error("factor enumeration: " + std::to_string(arity) + "^" +
                              std::to_string(n) + " sequences exceed the cap of " +
                              std::to_string(kEnumerationCap));
    }
  }
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> ws(n);
  for (;;) {
    double prob = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      ws[i] = factors.values[idx[i]];
      prob *= factors.probs[idx[i]];
    }
    visit(prob, ws);
    std::size_t pos = 0;
    while (pos < n && ++idx[pos] == arity) idx[pos++] = 0;
    if (pos == n) break;
  }
}

bool factors_fit_cap(const ScalarDist& factors, std::size_t n) {
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) {
    count *= factors.values.size();
    if (count > kEnumerationCap) return false;
  }
  return true;
}

bool iid_fits_cap(const DiscreteMatrixDist& dist, int n) {
  return product_support_size(dist, n) <= kEnumerationCap;
}

double atom_event_probability(const DiscreteMatrixDist& dist,
                              const std::function<bool(const SymMatrix&)>& event) {
  double p = 0.0;
  for (const Atom& atom : dist.atoms()) {
    if (event(atom.value)) p += atom.prob;
  }
  return p;
}

std::vector<SymMatrix> draw_iid(const DiscreteMatrixDist& dist, int n, RngStream& rng) {
  std::vector<SymMatrix> xs;
  xs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xs.push_back(dist.sample(rng));
  return xs;
}

SuperUniformSpec super_uniform_of(const ExperimentConfig& c) {
  if (c.super_uniform) return c.super_uniform->build(c.dim);
  return SuperUniformSpec::scalar_times_identity(c.dim);
}

bool is_identity_randomizer(const SuperUniformSpec& spec) {
  return spec.kind == SuperUniformSpec::Kind::Identity;
}

int int_param(const ExperimentConfig& c, const std::string& name) {
  const double v = c.param(name);
  const int n = static_cast<int>(std::llround(v));
  if (std::abs(v - n) > 1e-9) {
    throw std::invalid_argument("scenario '" + c.scenario + "': field 'params." + name +
                                "' must be an integer");
  }
  return n;
}

ScenarioPlan build_markov(const ExperimentConfig& c) {
  const SymMatrix a = c.matrix("a");
  const DiscreteMatrixDist dist = c.dist_spec().build(c.dim);
  Claim cl;
  cl.label = "P(X >= A)";
  cl.bound = markov_bound(dist.exact_mean(), a);
  cl.sampler = [dist, a](RngStream& rng) { return loewner_geq(dist.sample(rng), a); };
  cl.exact = [dist, a] {
    return atom_event_probability(dist, [&](const SymMatrix& x) { return loewner_geq(x, a); });
  };
  ScenarioPlan plan;
  plan.claims.push_back(std::move(cl));
  plan.reference =
      d_times(plan.claims[0].bound, c.dim, "prior trace bound tr((E X) A^-1), factor d above ours");
  return plan;
}

ScenarioPlan build_chebyshev(const ExperimentConfig& c) {
  const SymMatrix a = c.matrix("a");
  const DiscreteMatrixDist dist = c.dist_spec().build(c.dim);
  const SymMatrix mean = dist.exact_mean();
  if (!c.has_param("q") && !c.has_param("p")) {
    throw std::invalid_argument(
        "scenario 'chebyshev': at least one of 'params.q' and 'params.p' is required");
  }
  const auto sampler = [dist, a, mean](RngStream& rng) {
    return loewner_geq(sym_abs(dist.sample(rng) - mean), a);
  };
  const auto exact = [dist, a, mean] {
    return atom_event_probability(
        dist, [&](const SymMatrix& x) { return loewner_geq(sym_abs(x - mean), a); });
  };
  ScenarioPlan plan;
  if (c.has_param("q")) {
    const double q = c.param("q");
    Claim cl;
    cl.label = "P(|X - EX| >= A), root-q moment";
    cl.bound = chebyshev_bound(dist, a, ChebyshevMode::RootQ, q);
    cl.sampler = sampler;
    cl.exact = exact;
    plan.claims.push_back(std::move(cl));
    if (q == 1.0) {
      plan.reference = d_times(plan.claims[0].bound, c.dim,
                               "prior trace bound at q = 1, factor d above ours");
    }
  }
  if (c.has_param("p")) {
    Claim cl;
    cl.label = "P(|X - EX| >= A), power-p moment";
    cl.bound = chebyshev_bound(dist, a, ChebyshevMode::PowerP, c.param("p"));
    cl.sampler = sampler;
    cl.exact = exact;
    plan.claims.push_back(std::move(cl));
  }
  return plan;
}

ScenarioPlan build_chernoff(const ExperimentConfig& c) {
  const SymMatrix a = c.matrix("a");
  const SymMatrix t1 = c.matrix("t_conj");
  const SymMatrix t2 = c.matrix("t_conj2");
  const int n = int_param(c, "n");
  const DiscreteMatrixDist dist = c.dist_spec().build(c.dim);
  const SymMatrix threshold = a.scaled(n);
  const auto event = [threshold](const std::vector<SymMatrix>& xs) {
    SymMatrix sum = SymMatrix::zero(threshold.dim());
    for (const SymMatrix& x : xs) sum = sum + x;
    return loewner_geq(sum, threshold);
  };
  Claim cl;
  cl.label = "P(sum X_i >= n A)";
  cl.bound = chernoff_bound(dist, a, t1, t2, n);
  cl.sampler = [dist, n, event](RngStream& rng) { return event(draw_iid(dist, n, rng)); };
  if (iid_fits_cap(dist, n)) {
    cl.exact = [dist, n, event] { return enumerate_exact_probability(dist, n, event); };
  }
  ScenarioPlan plan;
  plan.claims.push_back(std::move(cl));
  plan.reference = d_times(plan.claims[0].bound, c.dim,
                           "prior bound d ||E exp(T(X-A)T~)||^n, factor d above ours");
  return plan;
}

ScenarioPlan build_chernoff_kl(const ExperimentConfig& c) {
  const int n = int_param(c, "n");
  const double m = c.param("m");
  const double a = c.param("a");
  const DiscreteMatrixDist dist = bounded_iid_dist(c.dim, m);
  const SymMatrix threshold = SymMatrix::identity(c.dim).scaled(a * n);
  const auto event = [threshold](const std::vector<SymMatrix>& xs) {
    SymMatrix sum = SymMatrix::zero(threshold.dim());
    for (const SymMatrix& x : xs) sum = sum + x;
    return loewner_geq(sum, threshold);
  };
  const auto sampler = [dist, n, event](RngStream& rng) { return event(draw_iid(dist, n, rng)); };
  const bool capable = iid_fits_cap(dist, n);
  const auto exact = [dist, n, event] { return enumerate_exact_probability(dist, n, event); };

  ScenarioPlan plan;
  {
    Claim cl;
    cl.label = "P(sum X_i >= n a I)";
    cl.bound = chernoff_kl_bound(n, a, m);
    cl.sampler = sampler;
    if (capable) cl.exact = exact;
    plan.claims.push_back(std::move(cl));
  }
  {
    // The conjugated exponential form at the KL-optimal tilt
    // t = log(a(1-m) / (m(1-a))) evaluates to the same exp(-n D(a||m)).
    const double t_opt = std::log(a * (1.0 - m) / (m * (1.0 - a)));
    const SymMatrix t_mat = SymMatrix::identity(c.dim).scaled(std::sqrt(t_opt));
    Claim cl;
    cl.label = "P(sum X_i >= n a I), conjugated exponential form";
    cl.bound = chernoff_bound(dist, SymMatrix::identity(c.dim).scaled(a), t_mat, t_mat, n);
    cl.sampler = sampler;
    if (capable) cl.exact = exact;
    plan.claims.push_back(std::move(cl));
  }
  plan.reference =
      d_times(plan.claims[0].bound, c.dim, "prior bound d exp(-n D(a||m)), factor d above ours");
  return plan;
}

ScenarioPlan build_laplace(const ExperimentConfig& c) {
  const double t = c.param("t");
  const DiscreteMatrixDist dist = c.dist_spec().build(c.dim);
  const auto tr_mgf = [dist](double theta) { return trace_of(dist.exact_mgf(theta)); };
  Claim cl;
  cl.label = "P(lmin(Y) >= t)";
  cl.bound = laplace_bound(tr_mgf, t, c.dim);
  cl.sampler = [dist, t](RngStream& rng) {
    return partial_sum_min_eig_event({dist.sample(rng)}, t);
  };
  cl.exact = [dist, t] {
    return atom_event_probability(
        dist, [&](const SymMatrix& x) { return partial_sum_min_eig_event({x}, t); });
  };
  ScenarioPlan plan;
  plan.claims.push_back(std::move(cl));
  plan.reference = d_times(plan.claims[0].bound, c.dim,
                           "prior max-eigenvalue Laplace bound, factor d above ours");
  return plan;
}

ScenarioPlan build_master(const ExperimentConfig& c) {
  const double t = c.param("t");
  std::vector<DiscreteMatrixDist> dists;
  for (const DistSpec& spec : c.distributions) dists.push_back(spec.build(c.dim));
  const int d = c.dim;
  const auto cgf_sum = [dists, d](double theta) {
    SymMatrix acc = SymMatrix::zero(d);
    for (const DiscreteMatrixDist& dist : dists) acc = acc + sym_log(dist.exact_mgf(theta));
    return acc;
  };
  Claim cl;
  cl.label = "P(lmin(sum X_k) >= t)";
  cl.bound = master_bound(cgf_sum, t, d);
  cl.sampler = [dists, t](RngStream& rng) {
    std::vector<SymMatrix> xs;
    xs.reserve(dists.size());
    for (const DiscreteMatrixDist& dist : dists) xs.push_back(dist.sample(rng));
    return partial_sum_min_eig_event(xs, t);
  };
  std::size_t combos = 1;
  bool capable = true;
  for (const DiscreteMatrixDist& dist : dists) {
    combos *= dist.atoms().size();
    capable = capable && combos <= kEnumerationCap;
  }
  if (capable) {
    cl.exact = [dists, t] {
      double p = 0.0;
      enumerate_product_support(dists, [&](double prob, const std::vector<const SymMatrix*>& xs) {
        std::vector<SymMatrix> draws;
        draws.reserve(xs.size());
        for (const SymMatrix* x : xs) draws.push_back(*x);
        if (partial_sum_min_eig_event(draws, t)) p += prob;
      });
      return p;
    };
  }
  ScenarioPlan plan;
  plan.claims.push_back(std::move(cl));
  plan.reference = d_times(plan.claims[0].bound, c.dim,
                           "prior max-eigenvalue master bound, factor d above ours");
  return plan;
}

double max_factor_norm(const std::vector<SymMatrix>& mats) {
  double r = 0.0;
  for (const SymMatrix& m : mats) r = std::max(r, op_norm(m));
  return r;
}

void add_rademacher_evidence(Claim& cl, const RademacherSequence& seq, double t, double scale) {
  cl.sampler = [seq, t, scale](RngStream& rng) {
    return partial_sum_min_eig_event(seq.draw(rng), t, scale);
  };
  if (signs_fit_cap(seq.length())) {
    cl.exact = [seq, t, scale] {
      double p = 0.0;
      enumerate_sign_vectors(seq.length(), [&](double prob, const std::vector<int>& signs) {
        if (partial_sum_min_eig_event(seq.from_signs(signs), t, scale)) p += prob;
      });
      return p;
    };
  }
}

ScenarioPlan build_bernstein_bounded(const ExperimentConfig& c) {
  const RademacherSequence seq(c.matrix_list("a_k"));
  const double t = c.param("t");
  const double r = max_factor_norm(seq.a_mats());
  const auto [h_form, simplified] = bernstein_bounded_bound(seq.sigma_sq(), r, t);
  ScenarioPlan plan;
  Claim first;
  first.label = "P(lmin(sum X_k) >= t), Bennett h-form";
  first.bound = h_form;
  add_rademacher_evidence(first, seq, t, 1.0);
  Claim second;
  second.label = "P(lmin(sum X_k) >= t), simplified form";
  second.bound = simplified;
  second.sampler = first.sampler;
  second.exact = first.exact;
  plan.claims.push_back(std::move(first));
  plan.claims.push_back(std::move(second));
  plan.reference = d_times(plan.claims[0].bound, c.dim,
                           "prior max-eigenvalue Bernstein bound, factor d above ours");
  return plan;
}

ScenarioPlan build_bernstein_subexp(const ExperimentConfig& c) {
  const RademacherSequence seq(c.matrix_list("a_k"));
  const double t = c.param("t");
  const double r = max_factor_norm(seq.a_mats());
  Claim cl;
  cl.label = "P(lmin(sum X_k) >= t)";
  cl.bound = bernstein_subexp_bound(seq.sigma_sq(), r, t);
  add_rademacher_evidence(cl, seq, t, 1.0);
  ScenarioPlan plan;
  plan.claims.push_back(std::move(cl));
  plan.reference = d_times(plan.claims[0].bound, c.dim,
                           "prior max-eigenvalue Bernstein bound, factor d above ours");
  return plan;
}

ScenarioPlan build_azuma(const ExperimentConfig& c) {
  const RademacherSequence seq(c.matrix_list("a_k"));
  const double t = c.param("t");
  const BoundResult bound = azuma_bound(seq.sigma_sq(), t);
  ScenarioPlan plan;
  Claim lower;
  lower.label = "P(lmin(sum X_k) >= t)";
  lower.bound = bound;
  add_rademacher_evidence(lower, seq, t, 1.0);
  Claim upper;
  upper.label = "P(lmax(sum X_k) <= -t)";
  upper.bound = bound;
  add_rademacher_evidence(upper, seq, t, -1.0);
  plan.claims.push_back(std::move(lower));
  plan.claims.push_back(std::move(upper));
  plan.reference = d_times(plan.claims[0].bound, c.dim,
                           "prior bound d exp(-t^2 / 8 sigma^2), factor d above ours");
  return plan;
}

ScenarioPlan build_mcdiarmid(const ExperimentConfig& c) {
  const McDiarmidFamily family(c.matrix_list("b_k"));
  const double t = c.param("t");
  BoundResult bound = azuma_bound(family.sigma_sq(), t);
  bound.theorem_id = "mcdiarmid";
  const auto make_claim = [&](const std::string& label, double scale) {
    Claim cl;
    cl.label = label;
    cl.bound = bound;
    cl.sampler = [family, t, scale](RngStream& rng) {
      return partial_sum_min_eig_event({family.h(family.draw_signs(rng))}, t, scale);
    };
    if (signs_fit_cap(family.arity())) {
      cl.exact = [family, t, scale] {
        double p = 0.0;
        enumerate_sign_vectors(family.arity(), [&](double prob, const std::vector<int>& signs) {
          if (partial_sum_min_eig_event({family.h(signs)}, t, scale)) p += prob;
        });
        return p;
      };
    }
    return cl;
  };
  ScenarioPlan plan;
  plan.claims.push_back(make_claim("P(lmin(H - EH) >= t)", 1.0));
  plan.claims.push_back(make_claim("P(lmax(H - EH) <= -t)", -1.0));
  plan.reference = d_times(plan.claims[0].bound, c.dim,
                           "prior bound d exp(-t^2 / 8 sigma^2), factor d above ours");
  return plan;
}

ScenarioPlan build_hoeffding(const ExperimentConfig& c) {
  const std::vector<SymMatrix>& b_mats = c.matrix_list("b_i");
  const double t = c.param("t");
  const int n = static_cast<int>(b_mats.size());
  std::vector<SubGaussianFactorDist> dists;
  std::vector<SymMatrix> v_mats;
  for (const SymMatrix& b : b_mats) {
    dists.emplace_back(b);
    v_mats.push_back(dists.back().v());
  }
  Claim cl;
  cl.label = "P(lmin(mean X_i) >= t)";
  cl.bound = hoeffding_bound(v_mats, n, t);
  cl.sampler = [dists, t, n](RngStream& rng) {
    std::vector<SymMatrix> xs;
    xs.reserve(dists.size());
    for (const SubGaussianFactorDist& dist : dists) xs.push_back(dist.sample(rng));
    return partial_sum_min_eig_event(xs, t, 1.0 / n);
  };
  ScenarioPlan plan;
  plan.claims.push_back(std::move(cl));
  plan.reference = {ReferenceValue{
      "2d_times_bound", 2.0 * c.dim * plan.claims[0].bound.value,
      "prior two-sided operator-norm bound 2d exp(-n t^2 / 2 sigma^2), factor 2d above ours"}};
  return plan;
}

ScenarioPlan build_doob(const ExperimentConfig& c, bool enumerating) {
  const SymMatrix b = c.matrix("b");
  const SymMatrix a = c.matrix("a");
  const std::size_t horizon = static_cast<std::size_t>(int_param(c, "horizon"));
  const MultiplicativePsdProcess proc(b, *c.factors, horizon,
                                      MultiplicativePsdProcess::Kind::Submartingale);
  const bool capable = factors_fit_cap(proc.factors(), horizon);
  const auto sampler = [proc, a, horizon](RngStream& rng) {
    return doob_maximal_event(proc.draw(rng), a, horizon);
  };
  const auto exact = [proc, a, horizon] {
    double p = 0.0;
    enumerate_factor_sequences(proc.factors(), horizon,
                               [&](double prob, const std::vector<double>& ws) {
                                 if (doob_maximal_event(proc.from_factors(ws), a, horizon)) {
                                   p += prob;
                                 }
                               });
    return p;
  };

  ScenarioPlan plan;
  {
    Claim cl;
    cl.label = "P(exists n <= N: Y_n >= A)";
    cl.bound = markov_bound(proc.exact_mean_at(horizon), a);
    cl.bound.theorem_id = "doob";
    cl.sampler = sampler;
    if (capable) cl.exact = exact;
    plan.claims.push_back(std::move(cl));
  }
  if (enumerating && capable) {
    // Intermediate form: the trace is taken against E[Y_N 1_event], computable
    // only by enumeration, and sits between the probability and the E[Y_N] form.
    SymMatrix mean_on_event = SymMatrix::zero(c.dim);
    enumerate_factor_sequences(proc.factors(), horizon,
                               [&](double prob, const std::vector<double>& ws) {
                                 const std::vector<SymMatrix> path = proc.from_factors(ws);
                                 if (doob_maximal_event(path, a, horizon)) {
                                   mean_on_event = mean_on_event + path.back().scaled(prob);
                                 }
                               });
    Claim cl;
    cl.label = "P(exists n <= N: Y_n >= A), indicator form";
    cl.bound = markov_bound(mean_on_event, a);
    cl.bound.theorem_id = "doob_indicator";
    cl.sampler = sampler;
    cl.exact = exact;
    plan.claims.push_back(std::move(cl));
  }
  plan.reference = d_times(plan.claims[0].bound, c.dim,
                           "prior maximal trace bound tr((E Y_N) A^-1), factor d above ours");
  return plan;
}

struct VilleSetup {
  MultiplicativePsdProcess proc;
  StoppingRule rule;
};

VilleSetup ville_setup(const ExperimentConfig& c) {
  const std::size_t horizon = static_cast<std::size_t>(int_param(c, "horizon"));
  StoppingRule rule = c.stopping ? c.stopping->build() : StoppingRule::first_hit_capped(horizon);
  if (rule.horizon > horizon) {
    throw std::invalid_argument("scenario '" + c.scenario +
                                "': field 'stopping.horizon' exceeds 'params.horizon'");
  }
  return {MultiplicativePsdProcess(c.matrix("b"), *c.factors, horizon,
                                   MultiplicativePsdProcess::Kind::Supermartingale),
          rule};
}

std::string ville_label(const StoppingRule& rule) {
  return rule.kind == StoppingRule::Kind::FixedN ? "P(Y_N >= A)"
                                                 : "P(exists n <= N: Y_n >= A)";
}

ScenarioPlan build_ville(const ExperimentConfig& c) {
  const SymMatrix a = c.matrix("a");
  const VilleSetup setup = ville_setup(c);
  const MultiplicativePsdProcess proc = setup.proc;
  const StoppingRule rule = setup.rule;
  Claim cl;
  cl.label = ville_label(rule);
  cl.bound = markov_bound(proc.b(), a);
  cl.bound.theorem_id = "ville";
  cl.sampler = [proc, rule, a](RngStream& rng) {
    return ville_stopped_event(proc.draw(rng), rule, a, std::nullopt);
  };
  if (factors_fit_cap(proc.factors(), proc.horizon())) {
    cl.exact = [proc, rule, a] {
      double p = 0.0;
      enumerate_factor_sequences(
          proc.factors(), proc.horizon(), [&](double prob, const std::vector<double>& ws) {
            if (ville_stopped_event(proc.from_factors(ws), rule, a, std::nullopt)) p += prob;
          });
      return p;
    };
  }
  ScenarioPlan plan;
  plan.claims.push_back(std::move(cl));
  plan.reference = d_times(plan.claims[0].bound, c.dim,
                           "prior stopped trace bound tr((E Y_0) A^-1), factor d above ours");
  return plan;
}

// Shared empirical-Bernstein machinery: iid draws, conditional mean E X, and
// the running-mean predictor X_hat_i = mean of the previous draws.
struct EbSetup {
  DiscreteMatrixDist dist;
  SymMatrix mean;
  std::vector<double> gammas;
  double alpha;

  ProcessPath make_path(const std::vector<SymMatrix>& draws) const {
    std::vector<ProcessStep> steps;
    steps.reserve(draws.size());
    SymMatrix running = SymMatrix::zero(mean.dim());
    for (std::size_t i = 0; i < draws.size(); ++i) {
      const SymMatrix x_hat =
          i == 0 ? SymMatrix::zero(mean.dim()) : running.scaled(1.0 / static_cast<double>(i));
      steps.push_back({draws[i], mean, x_hat, gammas[i]});
      running = running + draws[i];
    }
    return ProcessPath(std::move(steps));
  }

  bool level_event(const std::vector<SymMatrix>& draws, std::optional<double> u) const {
    const EBState state = eb_trace(make_path(draws)).back().second;
    const double threshold = eb_threshold(gammas, state.quad_sum, alpha, u);
    return partial_sum_min_eig_event({state.z_sum}, threshold, 1.0 / state.gamma_sum);
  }
};

EbSetup eb_setup(const ExperimentConfig& c) {
  return {c.dist_spec().build(c.dim), c.dist_spec().build(c.dim).exact_mean(), c.gammas,
          c.param("alpha")};
}

ScenarioPlan build_eb(const ExperimentConfig& c, bool randomized, bool enumerating) {
  const EbSetup setup = eb_setup(c);
  const int n = static_cast<int>(setup.gammas.size());
  Claim cl;
  cl.label = "P(lmin(Xbar - Mbar) >= EB threshold)";
  cl.bound = {randomized ? "randomized_eb" : "eb", setup.alpha, std::nullopt, std::nullopt,
              "level-alpha event over a fixed horizon"};
  if (randomized) {
    cl.sampler = [setup, n](RngStream& rng) {
      const std::vector<SymMatrix> draws = draw_iid(setup.dist, n, rng);
      return setup.level_event(draws, sample_super_uniform_scalar(rng));
    };
  } else {
    cl.sampler = [setup, n](RngStream& rng) {
      return setup.level_event(draw_iid(setup.dist, n, rng), std::nullopt);
    };
    if (iid_fits_cap(setup.dist, n)) {
      cl.exact = [setup, n] {
        return enumerate_exact_probability(
            setup.dist, n,
            [&](const std::vector<SymMatrix>& draws) { return setup.level_event(draws, std::nullopt); });
      };
    }
  }
  ScenarioPlan plan;
  plan.claims.push_back(std::move(cl));
  if (enumerating && setup.dist.atoms().size() <= 4 && setup.gammas.size() <= 6) {
    // Exact conditional-drift check of the underlying supermartingale over the
    // full atom tree, attached as a property of the report.
    const auto l_fn = [setup](const std::vector<SymMatrix>& prefix) {
      // An empty prefix carries no dimension, so eb_trace cannot recover
      // L_0 = d from it; hand the root value back directly.
      if (prefix.empty()) return static_cast<double>(setup.dist.dim());
      std::vector<double> gammas(setup.gammas.begin(),
                                 setup.gammas.begin() + static_cast<std::ptrdiff_t>(prefix.size()));
      EbSetup truncated{setup.dist, setup.mean, gammas, setup.alpha};
      return eb_trace(truncated.make_path(prefix)).back().first;
    };
    const double drift =
        conditional_supermartingale_check(setup.dist, setup.gammas.size(), l_fn);
    PropertyReport prop;
    prop.name = "eb_conditional_supermartingale";
    prop.instances = 1;
    prop.violations = drift > 1e-9 ? 1 : 0;
    prop.worst_residual = drift;
    prop.pass = drift <= 1e-9;
    prop.notes = "max conditional drift of L over the full atom tree";
    plan.properties.push_back(std::move(prop));
  }
  return plan;
}

ScenarioPlan build_randomized_markov(const ExperimentConfig& c) {
  const SymMatrix a = c.matrix("a");
  const DiscreteMatrixDist dist = c.dist_spec().build(c.dim);
  const SuperUniformSpec su = super_uniform_of(c);
  Claim cl;
  cl.label = "P(X >= A^1/2 U A^1/2)";
  cl.bound = markov_bound(dist.exact_mean(), a);
  cl.bound.theorem_id = "randomized_markov";
  cl.sampler = [dist, a, su](RngStream& rng) {
    const SymMatrix x = dist.sample(rng);
    return randomized_event(x, a, sample_super_uniform(su, rng), RandomizedForm::Markov, {});
  };
  if (is_identity_randomizer(su)) {
    const SymMatrix eye = SymMatrix::identity(c.dim);
    cl.exact = [dist, a, eye] {
      return atom_event_probability(dist, [&](const SymMatrix& x) {
        return randomized_event(x, a, eye, RandomizedForm::Markov, {});
      });
    };
  }
  ScenarioPlan plan;
  plan.claims.push_back(std::move(cl));
  plan.reference = d_times(plan.claims[0].bound, c.dim,
                           "prior trace-super-uniform bound, factor d above ours");
  return plan;
}

ScenarioPlan build_randomized_chebyshev(const ExperimentConfig& c) {
  const SymMatrix a = c.matrix("a");
  const DiscreteMatrixDist dist = c.dist_spec().build(c.dim);
  const double q = c.param("q");
  const SuperUniformSpec su = super_uniform_of(c);
  RandomizedParams params;
  params.q = q;
  params.ex = dist.exact_mean();
  Claim cl;
  cl.label = "P(|X - EX| >= (A^q/2 U A^q/2)^1/q)";
  cl.bound = chebyshev_bound(dist, a, ChebyshevMode::RootQ, q);
  cl.bound.theorem_id = "randomized_chebyshev";
  cl.sampler = [dist, a, su, params](RngStream& rng) {
    const SymMatrix x = dist.sample(rng);
    return randomized_event(x, a, sample_super_uniform(su, rng), RandomizedForm::ChebyshevQ,
                            params);
  };
  if (is_identity_randomizer(su)) {
    const SymMatrix eye = SymMatrix::identity(c.dim);
    cl.exact = [dist, a, eye, params] {
      return atom_event_probability(dist, [&](const SymMatrix& x) {
        return randomized_event(x, a, eye, RandomizedForm::ChebyshevQ, params);
      });
    };
  }
  ScenarioPlan plan;
  plan.claims.push_back(std::move(cl));
  return plan;
}

ScenarioPlan build_randomized_chernoff(const ExperimentConfig& c) {
  const SymMatrix a = c.matrix("a");
  const DiscreteMatrixDist dist = c.dist_spec().build(c.dim);
  const double gamma = c.param("gamma");
  const SuperUniformSpec su = super_uniform_of(c);
  RandomizedParams params;
  params.gamma = gamma;
  const double value =
      (dist.exact_mgf(gamma).mat() * sym_exp(a.scaled(-gamma)).mat()).trace() / c.dim;
  Claim cl;
  cl.label = "P(exp(gamma X) >= exp(gamma A/2) U exp(gamma A/2))";
  cl.bound = {"randomized_chernoff", value, std::nullopt, std::nullopt, ""};
  cl.sampler = [dist, a, su, params](RngStream& rng) {
    const SymMatrix x = dist.sample(rng);
    return randomized_event(x, a, sample_super_uniform(su, rng), RandomizedForm::Chernoff, params);
  };
  if (is_identity_randomizer(su)) {
    const SymMatrix eye = SymMatrix::identity(c.dim);
    cl.exact = [dist, a, eye, params] {
      return atom_event_probability(dist, [&](const SymMatrix& x) {
        return randomized_event(x, a, eye, RandomizedForm::Chernoff, params);
      });
    };
  }
  ScenarioPlan plan;
  plan.claims.push_back(std::move(cl));
  return plan;
}

ScenarioPlan build_randomized_chernoff_hoeffding(const ExperimentConfig& c) {
  const DiscreteMatrixDist dist = c.dist_spec().build(c.dim);
  const double gamma = c.param("gamma");
  const double beta = c.param("beta");
  const int n = int_param(c, "n");
  const SuperUniformSpec su = super_uniform_of(c);
  const SymMatrix mean = dist.exact_mean();

  std::vector<Atom> centered_atoms;
  for (const Atom& atom : dist.atoms()) centered_atoms.push_back({atom.prob, atom.value - mean});
  const DiscreteMatrixDist centered(centered_atoms);
  const SymMatrix log_g = sym_log(centered.exact_mgf(gamma / n));
  const double value = trace_of(sym_exp(log_g.scaled(n))) / (beta * c.dim);

  RandomizedParams params;
  params.gamma = gamma;
  params.beta = beta;
  params.ex = mean;
  const SymMatrix eye = SymMatrix::identity(c.dim);
  const auto mean_of = [n](const std::vector<SymMatrix>& xs) {
    SymMatrix sum = SymMatrix::zero(xs.front().dim());
    for (const SymMatrix& x : xs) sum = sum + x;
    return sum.scaled(1.0 / n);
  };

  Claim cl;
  cl.label = "P(exp(gamma (Xbar - M)) >= beta U)";
  cl.bound = {"randomized_chernoff_hoeffding", value, std::nullopt, std::nullopt, ""};
  cl.sampler = [dist, su, params, eye, mean_of, n](RngStream& rng) {
    const std::vector<SymMatrix> xs = draw_iid(dist, n, rng);
    return randomized_event(mean_of(xs), eye, sample_super_uniform(su, rng),
                            RandomizedForm::Hoeffding, params);
  };
  if (is_identity_randomizer(su) && iid_fits_cap(dist, n)) {
    cl.exact = [dist, params, eye, mean_of, n] {
      return enumerate_exact_probability(dist, n, [&](const std::vector<SymMatrix>& xs) {
        return randomized_event(mean_of(xs), eye, eye, RandomizedForm::Hoeffding, params);
      });
    };
  }
  ScenarioPlan plan;
  plan.claims.push_back(std::move(cl));
  return plan;
}

ScenarioPlan build_randomized_ville(const ExperimentConfig& c) {
  const SymMatrix a = c.matrix("a");
  const VilleSetup setup = ville_setup(c);
  const MultiplicativePsdProcess proc = setup.proc;
  const StoppingRule rule = setup.rule;
  const SuperUniformSpec su = super_uniform_of(c);
  Claim cl;
  cl.label = ville_label(rule) + " against A^1/2 U A^1/2";
  cl.bound = markov_bound(proc.b(), a);
  cl.bound.theorem_id = "randomized_ville";
  cl.sampler = [proc, rule, a, su](RngStream& rng) {
    return ville_stopped_event(proc.draw(rng), rule, a, sample_super_uniform(su, rng));
  };
  if (is_identity_randomizer(su) && factors_fit_cap(proc.factors(), proc.horizon())) {
    const SymMatrix eye = SymMatrix::identity(c.dim);
    cl.exact = [proc, rule, a, eye] {
      double p = 0.0;
      enumerate_factor_sequences(
          proc.factors(), proc.horizon(), [&](double prob, const std::vector<double>& ws) {
            if (ville_stopped_event(proc.from_factors(ws), rule, a, eye)) p += prob;
          });
      return p;
    };
  }
  ScenarioPlan plan;
  plan.claims.push_back(std::move(cl));
  plan.reference = d_times(plan.claims[0].bound, c.dim,
                           "prior trace-super-uniform stopped bound, factor d above ours");
  return plan;
}

ScenarioPlan build_plan(const ExperimentConfig& c, bool enumerating) {
  const std::string& s = c.scenario;
  if (s == "markov") return build_markov(c);
  if (s == "chebyshev") return build_chebyshev(c);
  if (s == "chernoff") return build_chernoff(c);
  if (s == "chernoff_kl") return build_chernoff_kl(c);
  if (s == "laplace") return build_laplace(c);
  if (s == "master") return build_master(c);
  if (s == "bernstein_bounded") return build_bernstein_bounded(c);
  if (s == "bernstein_subexp") return build_bernstein_subexp(c);
  if (s == "azuma") return build_azuma(c);
  if (s == "mcdiarmid") return build_mcdiarmid(c);
  if (s == "hoeffding") return build_hoeffding(c);
  if (s == "doob") return build_doob(c, enumerating);
  if (s == "ville") return build_ville(c);
  if (s == "eb") return build_eb(c, false, enumerating);
  if (s == "randomized_markov") return build_randomized_markov(c);
  if (s == "randomized_chebyshev") return build_randomized_chebyshev(c);
  if (s == "randomized_chernoff") return build_randomized_chernoff(c);
  if (s == "randomized_chernoff_hoeffding") return build_randomized_chernoff_hoeffding(c);
  if (s == "randomized_ville") return build_randomized_ville(c);
  if (s == "randomized_eb") return build_eb(c, true, enumerating);
  throw std::invalid_argument("unknown scenario tag '" + s + "'");
}

Report run_scenario_impl(const ExperimentConfig& config, RunMode mode) {
  validate_config(config);
  const bool enumerating = mode != RunMode::BoundsOnly;
  ScenarioPlan plan = build_plan(config, enumerating);

  Report report;
  report.version = kLibraryVersion;
  report.config = config;
  report.properties = std::move(plan.properties);
  report.anti_order_reference = std::move(plan.reference);

  std::uint64_t claim_index = 0;
  for (const Claim& claim : plan.claims) {
    ScenarioResult result;
    result.label = claim.label;
    result.bound = claim.bound;
    if (mode == RunMode::EnumerateOnly && !claim.exact) {
      throw std::runtime_error("no exact oracle is available for '" + claim.label + "'");
    }
    if (enumerating && claim.exact) result.exact_prob = claim.exact();
    if (mode == RunMode::Verify && config.trials > 0) {
      const SeedSpec seed{config.seed.master_seed, config.seed.stream_id + claim_index};
      result.estimate = estimate_event_probability(claim.sampler, config.trials, seed,
                                                   config.ci_level, config.workers);
    }
    if (result.exact_prob) {
      const VerificationVerdict verdict = check_bound_holds(*result.exact_prob, result.bound);
      result.status = verdict.status;
      result.margin = verdict.margin;
    } else if (result.estimate) {
      const VerificationVerdict verdict = check_bound_holds(*result.estimate, result.bound);
      result.status = verdict.status;
      result.margin = verdict.margin;
    } else if (mode == RunMode::Verify) {
      throw std::runtime_error("nothing to verify for '" + claim.label +
                               "': trials = 0 and no exact oracle");
    }
    report.results.push_back(std::move(result));
    ++claim_index;
  }
  report.status = mode == RunMode::BoundsOnly ? "bounds_only" : aggregate_status(report.results);
  return report;
}

}  // namespace

Report run_scenario(const ExperimentConfig& config, RunMode mode) {
  const auto start = std::chrono::steady_clock::now();
  try {
    Report report = run_scenario_impl(config, mode);
    const auto elapsed = std::chrono::steady_clock::now() - start;
    report.wall_clock_ms = std::chrono::duration<double, std::milli>(elapsed).count();
    return report;
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    if (msg.rfind("scenario '", 0) == 0 || msg.rfind("unknown scenario", 0) == 0) throw;
    throw std::runtime_error("scenario '" + config.scenario + "': " + msg);
  }
}

SuiteSummary run_suite(const std::string& dir, RunMode mode,
                       const std::function<void(ExperimentConfig&)>& adjust) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw std::invalid_argument("suite path '" + dir + "' is not a directory");
  }
  std::vector<std::string> paths;
  for (const fs::directory_entry& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      paths.push_back(entry.path().string());
    }
  }
  std::sort(paths.begin(), paths.end());

  SuiteSummary suite;
  for (const std::string& path : paths) {
    suite.files.push_back(path);
    try {
      ExperimentConfig config = load_config_file(path);
      if (adjust) adjust(config);
      Report report = run_scenario(config, mode);
      if (report.status == "violation") {
        ++suite.violations;
      } else if (report.status == "tight") {
        ++suite.tights;
      } else {
        ++suite.passes;
      }
      suite.reports.push_back(std::move(report));
    } catch (const std::exception& e) {
      suite.errors.push_back(path + ": " + e.what());
    }
  }
  return suite;
}

}  // namespace mineig
