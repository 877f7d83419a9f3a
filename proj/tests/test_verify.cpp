#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mineig/bounds.hpp"
#include "mineig/discrete_dist.hpp"
#include "mineig/processes.hpp"
#include "mineig/rng.hpp"
#include "mineig/sym_matrix.hpp"
#include "mineig/verify.hpp"

using namespace mineig;

namespace {

double binom_coeff(int n, int k) {
  double acc = 1.0;
  for (int i = 1; i <= k; ++i) acc = acc * (n - k + i) / i;
  return acc;
}

double binom_tail(int n, double p, int k_min) {
  double acc = 0.0;
  for (int k = k_min; k <= n; ++k) {
    acc += binom_coeff(n, k) * std::pow(p, k) * std::pow(1.0 - p, n - k);
  }
  return acc;
}

}  // namespace

TEST_CASE("estimate_event_probability degenerate events") {
  const SeedSpec seed{61, 0};
  const auto est_true =
      estimate_event_probability([](RngStream&) { return true; }, 1000, seed);
  CHECK_EQ(est_true.p_hat, 1.0);
  CHECK_EQ(est_true.successes, 1000);
  CHECK_EQ(est_true.ci_high, 1.0);
  CHECK_LE(est_true.ci_low, 1.0);

  const auto est_false =
      estimate_event_probability([](RngStream&) { return false; }, 1000, seed);
  CHECK_EQ(est_false.p_hat, 0.0);
  CHECK_EQ(est_false.ci_low, 0.0);
  CHECK_GT(est_false.ci_high, 0.0);

  CHECK_THROWS_AS(estimate_event_probability([](RngStream&) { return true; }, 0, seed),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_event_probability([](RngStream&) { return true; }, 10, seed, 1.0),
                  std::invalid_argument);
}

TEST_CASE("fair coin at 1e5 trials") {
  const auto est = estimate_event_probability(
      [](RngStream& rng) { return rng.uniform01() < 0.5; }, 100000, SeedSpec{62, 0});
  // 99.9% binomial window around 1/2.
  CHECK_GE(est.p_hat, 0.494);
  CHECK_LE(est.p_hat, 0.506);
  CHECK_LE(est.ci_low, 0.5);
  CHECK_GE(est.ci_high, 0.5);
  CHECK_GT(est.std_err(), 0.0);
  // Interval invariant: 0 <= ci_low <= p_hat <= ci_high <= 1.
  CHECK_LE(est.ci_low, est.p_hat);
  CHECK_LE(est.p_hat, est.ci_high);
}

TEST_CASE("estimates are bit-identical across worker counts") {
  const auto event = [](RngStream& rng) { return rng.normal() > 0.7; };
  const SeedSpec seed{63, 5};
  const auto one = estimate_event_probability(event, 20001, seed, 0.99, 1);
  const auto three = estimate_event_probability(event, 20001, seed, 0.99, 3);
  const auto eight = estimate_event_probability(event, 20001, seed, 0.99, 8);
  CHECK_EQ(one.successes, three.successes);
  CHECK_EQ(one.successes, eight.successes);
  CHECK_EQ(one.p_hat, three.p_hat);
  CHECK_EQ(one.ci_low, eight.ci_low);
  CHECK_EQ(one.ci_high, eight.ci_high);
}

TEST_CASE("worker errors propagate") {
  const auto event = [](RngStream&) -> bool { throw std::runtime_error("sampler failed"); };
  CHECK_THROWS_AS(estimate_event_probability(event, 100, SeedSpec{64, 0}, 0.99, 4),
                  std::runtime_error);
}

TEST_CASE("enumerate_exact_probability oracles") {
  const SymMatrix a = SymMatrix::from_rows({{2.0, 0.5}, {0.5, 1.0}});
  // Tight example: P(X >= A) = P(X = A) = p, exactly.
  for (double p : {0.1, 0.25, 0.5, 0.9}) {
    const DiscreteMatrixDist dist = tight_example_dist(a, p);
    const double exact = enumerate_exact_probability(
        dist, 1, [&](const std::vector<SymMatrix>& xs) { return loewner_geq(xs[0], a); });
    CHECK_EQ(exact, p);  // single-atom weight, no accumulation error
    // ... and it matches the bound value (the tightness instance).
    CHECK_EQ(markov_bound(dist.exact_mean(), a).value, doctest::Approx(p).epsilon(1e-12));
  }

  // Impossible event.
  CHECK_EQ(enumerate_exact_probability(tight_example_dist(a, 0.5), 3,
                                       [](const std::vector<SymMatrix>&) { return false; }),
           0.0);

  // Binomial tail: sum of n bounded_iid draws >= k I iff at least k identity draws.
  const DiscreteMatrixDist iid = bounded_iid_dist(2, 0.3);
  for (int k_min : {2, 4}) {
    const double exact = enumerate_exact_probability(
        iid, 6, [&](const std::vector<SymMatrix>& xs) {
          return partial_sum_min_eig_event(xs, static_cast<double>(k_min));
        });
    CHECK_EQ(exact, doctest::Approx(binom_tail(6, 0.3, k_min)).epsilon(1e-12));
  }
}

TEST_CASE("check_bound_holds on exact probabilities") {
  const BoundResult half{"markov", 0.5, std::nullopt, std::nullopt, ""};
  CHECK_EQ(check_bound_holds(0.3, BoundResult{"markov", 0.3, {}, {}, ""}).status,
           VerdictStatus::Tight);
  CHECK_EQ(check_bound_holds(0.1, half).status, VerdictStatus::Pass);
  CHECK_EQ(check_bound_holds(0.6, half).status, VerdictStatus::Violation);
  // The 1e-9 slack absorbs roundoff on both sides of the boundary.
  CHECK_EQ(check_bound_holds(0.5 + 5e-10, half).status, VerdictStatus::Tight);
  CHECK_EQ(check_bound_holds(0.5 + 2e-9, half).status, VerdictStatus::Violation);
  const auto v = check_bound_holds(0.6, half);
  CHECK_EQ(*v.exact_prob, 0.6);
  CHECK_EQ(v.margin, 1e-9);
}

TEST_CASE("check_bound_holds on estimates") {
  EmpiricalEstimate est;
  est.trials = 10000;
  est.successes = 1000;
  est.level = 0.99;
  est.p_hat = 0.1;
  est.ci_low = 0.0925;
  est.ci_high = 0.1079;

  // Bound far above: pass.
  CHECK_EQ(check_bound_holds(est, BoundResult{"t", 0.5, {}, {}, ""}).status,
           VerdictStatus::Pass);
  // Bound within 2 SE of p_hat: tight.
  CHECK_EQ(check_bound_holds(est, BoundResult{"t", 0.102, {}, {}, ""}).status,
           VerdictStatus::Tight);
  // ci_low above the bound: statistically significant violation.
  CHECK_EQ(check_bound_holds(est, BoundResult{"t", 0.05, {}, {}, ""}).status,
           VerdictStatus::Violation);
  // p_hat above the bound but ci_low below: not significant, and within the
  // tight margin here.
  EmpiricalEstimate close = est;
  close.ci_low = 0.0999;
  CHECK_NE(check_bound_holds(close, BoundResult{"t", 0.09995, {}, {}, ""}).status,
           VerdictStatus::Violation);
  CHECK_EQ(to_string(VerdictStatus::Pass), std::string("pass"));
  CHECK_EQ(to_string(VerdictStatus::Tight), std::string("tight"));
  CHECK_EQ(to_string(VerdictStatus::Violation), std::string("violation"));
}

TEST_CASE("conditional_supermartingale_check") {
  const DiscreteMatrixDist pm({{0.5, SymMatrix::diagonal({1.0})},
                               {0.5, SymMatrix::diagonal({-1.0})}});

  // Constant L: drift identically zero.
  CHECK_EQ(conditional_supermartingale_check(pm, 3,
                                             [](const std::vector<SymMatrix>&) { return 7.0; }),
           0.0);

  // Fair-tree martingale L = sum of increments: drift 0 within 1e-12.
  const auto linear = [](const std::vector<SymMatrix>& xs) {
    double acc = 0.0;
    for (const SymMatrix& x : xs) acc += x(0, 0);
    return acc;
  };
  CHECK_LE(conditional_supermartingale_check(pm, 4, linear), 1e-12);

  // Scalar EB with X_hat = M = 0 and +-1 increments: strictly negative drift,
  // so the max over nodes stays at the 0 floor.
  const double gamma = 0.5;
  const auto eb = [&](const std::vector<SymMatrix>& xs) {
    double z = 0.0, q = 0.0;
    for (const SymMatrix& x : xs) {
      z += gamma * x(0, 0);
      q += g_eb(gamma) * x(0, 0) * x(0, 0);
    }
    return std::exp(z - q);
  };
  CHECK_LE(conditional_supermartingale_check(pm, 4, eb), 1e-9);

  // A strict submartingale is flagged with its positive drift.
  const auto growing = [](const std::vector<SymMatrix>& xs) {
    return static_cast<double>(xs.size());
  };
  CHECK_EQ(conditional_supermartingale_check(pm, 2, growing), doctest::Approx(1.0));

  // Caps: depth <= 6, branching <= 4.
  CHECK_THROWS_AS(conditional_supermartingale_check(
                      pm, 7, [](const std::vector<SymMatrix>&) { return 0.0; }),
                  std::length_error);
  const DiscreteMatrixDist five({{0.2, SymMatrix::diagonal({1.0})},
                                 {0.2, SymMatrix::diagonal({2.0})},
                                 {0.2, SymMatrix::diagonal({3.0})},
                                 {0.2, SymMatrix::diagonal({4.0})},
                                 {0.2, SymMatrix::diagonal({5.0})}});
  CHECK_THROWS_AS(conditional_supermartingale_check(
                      five, 2, [](const std::vector<SymMatrix>&) { return 0.0; }),
                  std::length_error);
}

TEST_CASE("cgf subadditivity holds exactly on enumerable products") {
  const SymMatrix b1 = SymMatrix::from_rows({{0.6, 0.2}, {0.2, 0.3}});
  const SymMatrix b2 = SymMatrix::from_rows({{0.4, -0.1}, {-0.1, 0.8}});
  const DiscreteMatrixDist d1({{0.3, b1}, {0.7, -b1.scaled(0.5)}});
  const DiscreteMatrixDist d2({{0.6, b2}, {0.4, -b2}});
  const std::vector<DiscreteMatrixDist> dists{d1, d2};

  for (double theta : {0.5, -0.5, 1.0, -1.0, 2.0, -2.0}) {
    double lhs = 0.0;
    enumerate_product_support(dists, [&](double p, const std::vector<const SymMatrix*>& xs) {
      SymMatrix sum = SymMatrix::zero(2);
      for (const SymMatrix* x : xs) sum = sum + *x;
      lhs += p * trace_of(sym_exp(sum.scaled(theta)));
    });
    SymMatrix cgf = SymMatrix::zero(2);
    for (const DiscreteMatrixDist& d : dists) cgf = cgf + sym_log(d.exact_mgf(theta));
    const double rhs = trace_of(sym_exp(cgf));
    CHECK_LE(lhs - rhs, 1e-9 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("property tags round-trip and the suite passes") {
  for (PropertyTag tag : all_property_tags()) {
    CHECK_EQ(property_tag_from_name(to_string(tag)), tag);
  }
  CHECK_THROWS_AS(property_tag_from_name("no_such_property"), std::invalid_argument);
  CHECK_EQ(all_property_tags().size(), 7);

  const SeedSpec seed{65, 0};
  for (PropertyTag tag : all_property_tags()) {
    const PropertyReport rep = property_run(tag, 200, seed);
    CAPTURE(rep.name);
    CHECK(rep.pass);
    CHECK_EQ(rep.violations, 0);
    CHECK_EQ(rep.name, to_string(tag));
  }
  CHECK_THROWS_AS(property_run(PropertyTag::GoldenThompson, 0, seed), std::invalid_argument);
}

TEST_CASE("chebyshev remark traces: both routes agree on the diagonal instance") {
  const PropertyReport rep = property_run(PropertyTag::ChebyshevRemarkTraces, 1, SeedSpec{});
  CHECK(rep.pass);
  // 1972/25 = 78.88 via both code paths; the notes record both values.
  CHECK_LE(rep.worst_residual, 1e-12);
  CHECK_NE(rep.notes.find("78.88"), std::string::npos);
}
