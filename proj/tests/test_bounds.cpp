#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mineig/bounds.hpp"
#include "mineig/discrete_dist.hpp"
#include "mineig/rng.hpp"
#include "mineig/sym_matrix.hpp"

using namespace mineig;

namespace {

SymMatrix random_psd(RngStream& rng, int d, double scale = 1.0) {
  Matrix g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = scale * rng.normal();
  }
  return SymMatrix(Matrix(g * g.transpose() / d));
}

}  // namespace

TEST_CASE("optimize_theta") {
  // Calculus oracle: e^{-theta} e^{theta^2/2} is minimized at theta = 1.
  const auto objective = [](double theta) { return std::exp(-theta + theta * theta / 2.0); };
  const ThetaOptimum opt = optimize_theta(objective);
  CHECK_EQ(opt.theta_star, doctest::Approx(1.0).epsilon(1e-6));
  CHECK_EQ(opt.value, doctest::Approx(std::exp(-0.5)).epsilon(1e-9));
  CHECK_FALSE(opt.boundary_hit);

  // Monotone decreasing: the infimum sits at the top grid edge and is flagged.
  const ThetaOptimum mono = optimize_theta([](double theta) { return std::exp(-theta); });
  CHECK(mono.boundary_hit);
  CHECK_EQ(mono.theta_star, doctest::Approx(1e4).epsilon(1e-9));
  CHECK_EQ(mono.value, 0.0);  // e^{-1e4} underflows to the true infimum

  const ThetaOptimum flat = optimize_theta([](double) { return 1.0; });
  CHECK_EQ(flat.value, 1.0);

  CHECK_THROWS_AS(
      optimize_theta([](double) { return std::numeric_limits<double>::quiet_NaN(); }),
      std::runtime_error);
  ThetaGrid bad;
  bad.points = 1;
  CHECK_THROWS_AS(optimize_theta([](double) { return 1.0; }, bad), std::invalid_argument);
}

TEST_CASE("markov_bound oracles") {
  const SymMatrix a = SymMatrix::from_rows({{2.0, 0.5}, {0.5, 1.0}});
  // Tightness instance: mean = p A against threshold A gives exactly p.
  CHECK_EQ(markov_bound(a.scaled(0.3), a).value, doctest::Approx(0.3).epsilon(1e-12));
  CHECK_EQ(markov_bound(SymMatrix::zero(2), a).value, doctest::Approx(0.0));
  CHECK_EQ(markov_bound(SymMatrix::identity(2), SymMatrix::identity(2).scaled(2.0)).value,
           doctest::Approx(0.5).epsilon(1e-12));
  CHECK_EQ(markov_bound(a.scaled(0.3), a).theorem_id, "markov");

  CHECK_THROWS_AS(markov_bound(a, SymMatrix::zero(2)), std::domain_error);
  CHECK_THROWS_AS(markov_bound(SymMatrix::diagonal({-1.0, 1.0}), a), std::domain_error);
  CHECK_THROWS_AS(markov_bound(SymMatrix::identity(3), a), std::invalid_argument);
}

TEST_CASE("markov_bound times d equals the direct anti-order trace") {
  RngStream rng(SeedSpec{31, 0}, 0);
  for (int i = 0; i < 100; ++i) {
    const int d = 1 + i % 6;
    const SymMatrix mean = random_psd(rng, d);
    const SymMatrix a = random_psd(rng, d) + SymMatrix::identity(d).scaled(0.5);
    const double direct = (mean.mat() * a.mat().inverse()).trace();
    CHECK_EQ(markov_bound(mean, a).value * d, doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("chebyshev_bound oracles") {
  const SymMatrix i2 = SymMatrix::identity(2);
  // Constant X: |X - EX| = 0, both modes give 0.
  const DiscreteMatrixDist constant({{1.0, SymMatrix::from_rows({{2.0, 1.0}, {1.0, 2.0}})}});
  CHECK_EQ(chebyshev_bound(constant, i2, ChebyshevMode::PowerP, 2.0).value,
           doctest::Approx(0.0));
  CHECK_EQ(chebyshev_bound(constant, i2, ChebyshevMode::RootQ, 1.0).value, doctest::Approx(0.0));

  // X = +-I each w.p. 1/2: |X - EX| = I.
  const DiscreteMatrixDist pm({{0.5, i2}, {0.5, -i2}});
  CHECK_EQ(chebyshev_bound(pm, i2, ChebyshevMode::PowerP, 2.0).value,
           doctest::Approx(1.0).epsilon(1e-12));
  CHECK_EQ(chebyshev_bound(pm, i2.scaled(2.0), ChebyshevMode::RootQ, 1.0).value,
           doctest::Approx(0.5).epsilon(1e-12));
  CHECK_EQ(chebyshev_bound(pm, i2, ChebyshevMode::PowerP, 2.0).theorem_id, "chebyshev_p");
  CHECK_EQ(chebyshev_bound(pm, i2, ChebyshevMode::RootQ, 0.5).theorem_id, "chebyshev_q");

  CHECK_THROWS_AS(chebyshev_bound(pm, i2, ChebyshevMode::PowerP, 0.5), std::domain_error);
  CHECK_THROWS_AS(chebyshev_bound(pm, i2, ChebyshevMode::RootQ, 1.5), std::domain_error);
  CHECK_THROWS_AS(chebyshev_bound(pm, SymMatrix::zero(2), ChebyshevMode::RootQ, 1.0),
                  std::domain_error);
}

TEST_CASE("chernoff_bound oracles") {
  const SymMatrix i2 = SymMatrix::identity(2);
  // X identically A: the exponent is zero, bound 1 for any n.
  const DiscreteMatrixDist at_a({{1.0, i2}});
  CHECK_EQ(chernoff_bound(at_a, i2, i2, i2, 1).value, doctest::Approx(1.0).epsilon(1e-12));
  CHECK_EQ(chernoff_bound(at_a, i2, i2, i2, 7).value, doctest::Approx(1.0).epsilon(1e-12));

  // X = I w.p. 0.5 else 0, A = I, T = T~ = I:
  // ||0.5 I + 0.5 e^{-I}|| = 0.5 + 0.5 e^{-1}.
  const DiscreteMatrixDist half({{0.5, i2}, {0.5, SymMatrix::zero(2)}});
  const double expect1 = 0.5 + 0.5 * std::exp(-1.0);
  CHECK_EQ(chernoff_bound(half, i2, i2, i2, 1).value, doctest::Approx(expect1).epsilon(1e-12));
  CHECK_EQ(chernoff_bound(half, i2, i2, i2, 1).value, doctest::Approx(0.68394).epsilon(1e-5));
  CHECK_EQ(chernoff_bound(half, i2, i2, i2, 2).value,
           doctest::Approx(expect1 * expect1).epsilon(1e-12));
  CHECK_EQ(chernoff_bound(half, i2, i2, i2, 2).value, doctest::Approx(0.46777).epsilon(1e-4));

  CHECK_THROWS_AS(chernoff_bound(half, i2, i2, i2, 0), std::invalid_argument);
  CHECK_THROWS_AS(chernoff_bound(half, SymMatrix::identity(3), i2, i2, 1),
                  std::invalid_argument);
}

TEST_CASE("kl_div oracles") {
  CHECK_EQ(kl_div(0.37, 0.37), doctest::Approx(0.0));
  CHECK_EQ(kl_div(1.0, 0.5), doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK_EQ(kl_div(0.8, 0.5), doctest::Approx(0.192745).epsilon(1e-5));
  CHECK_EQ(kl_div(0.0, 0.5), doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK_GE(kl_div(0.3, 0.7), 0.0);
  CHECK_THROWS_AS(kl_div(1.2, 0.5), std::domain_error);
  CHECK_THROWS_AS(kl_div(0.5, 0.0), std::domain_error);
  CHECK_THROWS_AS(kl_div(0.5, 1.0), std::domain_error);
}

TEST_CASE("chernoff_kl_bound oracles") {
  CHECK_EQ(chernoff_kl_bound(5, 0.4, 0.4).value, doctest::Approx(1.0));
  // Value is exp(-n D(a||m)); the KL factor is the independently tested oracle.
  CHECK_EQ(chernoff_kl_bound(10, 0.8, 0.5).value,
           doctest::Approx(std::exp(-10.0 * kl_div(0.8, 0.5))).epsilon(1e-14));
  CHECK_EQ(chernoff_kl_bound(10, 0.8, 0.5).value, doctest::Approx(0.1455).epsilon(1e-3));
  CHECK_EQ(chernoff_kl_bound(1, 1.0, 0.5).value, doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(chernoff_kl_bound(0, 0.8, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(chernoff_kl_bound(5, 0.4, 0.6), std::domain_error);  // a < m
  CHECK_THROWS_AS(chernoff_kl_bound(5, 0.4, 0.0), std::domain_error);
}

TEST_CASE("laplace_bound oracles") {
  // Y identically 0 at t = 0: inf e^0 d / d = 1.
  CHECK_EQ(laplace_bound([](double) { return 2.0; }, 0.0, 2).value,
           doctest::Approx(1.0).epsilon(1e-12));

  // Rademacher +-I, d = 2: tr mgf = 2 cosh(theta), infimum e^{-theta} cosh -> 1/2.
  const BoundResult rad =
      laplace_bound([](double theta) { return 2.0 * std::cosh(theta); }, 1.0, 2);
  CHECK_EQ(rad.value, doctest::Approx(0.5).epsilon(1e-3));
  CHECK_GE(rad.value, 0.5);  // the infimum is approached from above, never crossed
  CHECK_EQ(rad.theorem_id, "laplace");

  // Scalar standard normal: tr mgf = e^{theta^2/2}, optimum at theta = t.
  const BoundResult gauss =
      laplace_bound([](double theta) { return std::exp(theta * theta / 2.0); }, 1.0, 1);
  CHECK_EQ(gauss.value, doctest::Approx(std::exp(-0.5)).epsilon(1e-9));
  REQUIRE(gauss.theta_star.has_value());
  CHECK_EQ(*gauss.theta_star, doctest::Approx(1.0).epsilon(1e-6));

  // A mgf that overflows at large theta is skipped, not fatal.
  const BoundResult wide = laplace_bound(
      [](double theta) { return std::exp(theta * theta / 2.0 + theta * 5.0); }, 10.0, 1);
  CHECK(std::isfinite(wide.value));

  CHECK_THROWS_AS(
      laplace_bound([](double) { return std::numeric_limits<double>::quiet_NaN(); }, 1.0, 2),
      std::runtime_error);
  CHECK_THROWS_AS(laplace_bound([](double) { return 1.0; }, 0.0, 0), std::invalid_argument);
}

TEST_CASE("master_bound with one factor equals laplace_bound of that factor") {
  const SymMatrix b = SymMatrix::from_rows({{0.8, 0.2}, {0.2, 0.4}});
  const DiscreteMatrixDist dist({{0.4, b}, {0.6, -b.scaled(0.5)}});
  const auto cgf = [&](double theta) { return sym_log(dist.exact_mgf(theta)); };
  const auto tr_mgf = [&](double theta) { return trace_of(dist.exact_mgf(theta)); };
  for (double t : {0.1, 0.3, 0.7}) {
    const BoundResult m = master_bound(cgf, t, 2);
    const BoundResult l = laplace_bound(tr_mgf, t, 2);
    // tr exp(log M) = tr M, so the two objectives agree pointwise.
    CHECK_EQ(m.value, doctest::Approx(l.value).epsilon(1e-10));
  }
  CHECK_EQ(master_bound(cgf, 0.1, 2).theorem_id, "master");

  // Single zero factor at t = 0: bound 1.
  const DiscreteMatrixDist zero({{1.0, SymMatrix::zero(2)}});
  const auto zero_cgf = [&](double theta) { return sym_log(zero.exact_mgf(theta)); };
  CHECK_EQ(master_bound(zero_cgf, 0.0, 2).value, doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("h_bennett oracles") {
  CHECK_EQ(h_bennett(0.0), doctest::Approx(0.0));
  CHECK_EQ(h_bennett(1.0), doctest::Approx(2.0 * std::log(2.0) - 1.0).epsilon(1e-14));
  CHECK_EQ(h_bennett(1.0), doctest::Approx(0.386294).epsilon(1e-6));
  CHECK_EQ(h_bennett(std::exp(1.0) - 1.0), doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(h_bennett(-0.1), std::domain_error);
}

TEST_CASE("bernstein_bounded_bound oracles") {
  const auto [h0, s0] = bernstein_bounded_bound(1.0, 1.0, 0.0);
  CHECK_EQ(h0.value, doctest::Approx(1.0));
  CHECK_EQ(s0.value, doctest::Approx(1.0));

  const auto [h1, s1] = bernstein_bounded_bound(1.0, 1.0, 1.0);
  CHECK_EQ(h1.value, doctest::Approx(0.67957).epsilon(1e-5));
  CHECK_EQ(h1.value, doctest::Approx(std::exp(-h_bennett(1.0))).epsilon(1e-12));
  CHECK_EQ(s1.value, doctest::Approx(0.68729).epsilon(1e-5));
  CHECK_EQ(s1.value, doctest::Approx(std::exp(-0.375)).epsilon(1e-12));
  CHECK_EQ(h1.theorem_id, "bernstein_bounded_h");
  CHECK_EQ(s1.theorem_id, "bernstein_bounded_simplified");
  REQUIRE(h1.sigma_sq.has_value());
  CHECK_EQ(*h1.sigma_sq, 1.0);

  const auto [h2, s2] = bernstein_bounded_bound(4.0, 1.0, 2.0);
  CHECK_EQ(s2.value, doctest::Approx(std::exp(-2.0 / (4.0 + 2.0 / 3.0))).epsilon(1e-12));
  CHECK_EQ(s2.value, doctest::Approx(0.65144).epsilon(1e-5));
  CHECK_LE(h2.value, s2.value);

  CHECK_THROWS_AS(bernstein_bounded_bound(0.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(bernstein_bounded_bound(1.0, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(bernstein_bounded_bound(1.0, 1.0, -1.0), std::domain_error);
}

TEST_CASE("h-form never exceeds the simplified form") {
  RngStream rng(SeedSpec{32, 0}, 0);
  for (int i = 0; i < 300; ++i) {
    const double sigma_sq = 0.05 + 4.0 * rng.uniform01();
    const double r = 0.05 + 3.0 * rng.uniform01();
    const double t = 5.0 * rng.uniform01();
    const auto [h, s] = bernstein_bounded_bound(sigma_sq, r, t);
    CHECK_LE(h.value, s.value + 1e-12);
  }
}

TEST_CASE("bernstein_subexp_bound oracles") {
  CHECK_EQ(bernstein_subexp_bound(1.0, 1.0, 0.0).value, doctest::Approx(1.0));
  CHECK_EQ(bernstein_subexp_bound(1.0, 1.0, 1.0).value,
           doctest::Approx(std::exp(-0.25)).epsilon(1e-12));
  CHECK_EQ(bernstein_subexp_bound(1.0, 1.0, 1.0).value, doctest::Approx(0.77880).epsilon(1e-5));
  // R -> 0 limit recovers the sub-Gaussian rate e^{-t^2 / 2 sigma^2}.
  CHECK_EQ(bernstein_subexp_bound(1.0, 1e-12, 1.0).value,
           doctest::Approx(std::exp(-0.5)).epsilon(1e-9));
  CHECK_EQ(bernstein_subexp_bound(1.0, 1.0, 1.0).theorem_id, "bernstein_subexp");
  CHECK_THROWS_AS(bernstein_subexp_bound(-1.0, 1.0, 1.0), std::domain_error);
}

TEST_CASE("azuma_bound oracles") {
  CHECK_EQ(azuma_bound(1.0, 0.0).value, doctest::Approx(1.0));
  CHECK_EQ(azuma_bound(1.0, 2.0).value, doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK_EQ(azuma_bound(1.0, 2.0).value, doctest::Approx(0.60653).epsilon(1e-5));
  CHECK_EQ(azuma_bound(2.0, 4.0).value, doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK_EQ(azuma_bound(2.0, 4.0).value, doctest::Approx(0.36788).epsilon(1e-4));
  CHECK_EQ(azuma_bound(1.0, 1.0).theorem_id, "azuma");
  CHECK_THROWS_AS(azuma_bound(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(azuma_bound(1.0, -1.0), std::domain_error);
}

TEST_CASE("hoeffding_bound oracles") {
  const SymMatrix i2 = SymMatrix::identity(2);
  CHECK_EQ(hoeffding_bound({i2, i2}, 2, 0.0).value, doctest::Approx(1.0));

  // n = 4, all V = I: sigma^2 = 1, value e^{-4/2} = e^{-2}.
  const BoundResult four = hoeffding_bound({i2, i2, i2, i2}, 4, 1.0);
  CHECK_EQ(four.value, doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  CHECK_EQ(four.value, doctest::Approx(0.13534).epsilon(1e-4));
  REQUIRE(four.sigma_sq.has_value());
  CHECK_EQ(*four.sigma_sq, doctest::Approx(1.0).epsilon(1e-12));

  // n = 1, V = diag(1,4): sigma^2 = 4, value e^{-1/8}.
  const BoundResult one = hoeffding_bound({SymMatrix::diagonal({1.0, 4.0})}, 1, 1.0);
  CHECK_EQ(one.value, doctest::Approx(std::exp(-0.125)).epsilon(1e-12));
  CHECK_EQ(one.value, doctest::Approx(0.88250).epsilon(1e-5));

  // Degenerate sigma^2 = 0: limit convention, recorded in the notes.
  const BoundResult degenerate = hoeffding_bound({SymMatrix::zero(2)}, 1, 1.0);
  CHECK_EQ(degenerate.value, 0.0);
  CHECK_FALSE(degenerate.notes.empty());
  CHECK_EQ(hoeffding_bound({SymMatrix::zero(2)}, 1, 0.0).value, 1.0);

  CHECK_THROWS_AS(hoeffding_bound({i2}, 2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(hoeffding_bound({SymMatrix::diagonal({-1.0, 1.0})}, 1, 1.0),
                  std::domain_error);
  CHECK_THROWS_AS(hoeffding_bound({i2}, 1, -0.5), std::domain_error);
}

TEST_CASE("g_eb oracles and quadratic minorant") {
  CHECK_EQ(g_eb(0.0), doctest::Approx(0.0));
  CHECK_EQ(g_eb(0.5), doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-14));
  CHECK_EQ(g_eb(0.5), doctest::Approx(0.193147).epsilon(1e-6));
  CHECK_EQ(g_eb(0.9), doctest::Approx(std::log(10.0) - 0.9).epsilon(1e-12));
  CHECK_EQ(g_eb(0.9), doctest::Approx(1.402585).epsilon(1e-6));
  CHECK_THROWS_AS(g_eb(1.0), std::domain_error);
  CHECK_THROWS_AS(g_eb(-0.1), std::domain_error);
  // g(x) >= x^2 / 2 across [0, 0.999].
  for (int i = 0; i <= 999; ++i) {
    const double x = i / 1000.0;
    CHECK_GE(g_eb(x), x * x / 2.0 - 1e-15);
  }
}

TEST_CASE("eb_threshold oracles") {
  const std::vector<double> gammas{0.5, 0.5};
  CHECK_EQ(eb_threshold(gammas, SymMatrix::zero(2), std::exp(-1.0)),
           doctest::Approx(1.0).epsilon(1e-12));
  CHECK_EQ(eb_threshold(gammas, SymMatrix::diagonal({0.0, 2.0}), 0.05),
           doctest::Approx(std::log(20.0) + 2.0).epsilon(1e-12));
  CHECK_EQ(eb_threshold(gammas, SymMatrix::diagonal({0.0, 2.0}), 0.05),
           doctest::Approx(4.99573).epsilon(1e-5));
  // u = alpha cancels the log term.
  CHECK_EQ(eb_threshold(gammas, SymMatrix::diagonal({0.0, 2.0}), 0.05, 0.05),
           doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS(eb_threshold(gammas, SymMatrix::zero(2), 0.0), std::domain_error);
  CHECK_THROWS_AS(eb_threshold({1.5}, SymMatrix::zero(2), 0.1), std::domain_error);
  CHECK_THROWS_AS(eb_threshold(gammas, SymMatrix::zero(2), 0.1, 0.0), std::domain_error);
}
