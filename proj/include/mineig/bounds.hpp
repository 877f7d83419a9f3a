#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mineig/discrete_dist.hpp"
#include "mineig/sym_matrix.hpp"

namespace mineig {

/// A computed tail-bound value plus its provenance. Values above 1 are
/// vacuous but returned as-is; clamping would break the algebraic identities
/// the tests rely on.
struct BoundResult {
  std::string theorem_id;
  double value = 0.0;
  std::optional<double> theta_star;
  std::optional<double> sigma_sq;
  std::string notes;
};

/// Search window for inf over theta > 0: log-spaced scan then golden-section
/// refinement on the best bracketing triple.
struct ThetaGrid {
  double log10_min = -4.0;
  double log10_max = 4.0;
  int points = 200;
  int refine_iters = 60;
};

struct ThetaOptimum {
  double theta_star = 0.0;
  double value = 0.0;
  bool boundary_hit = false;
};

/// Deterministic minimizer over the grid. Non-finite objective values are
/// skipped; throws std::runtime_error when every grid point is non-finite.
ThetaOptimum optimize_theta(const std::function<double(double)>& objective, ThetaGrid grid = {});

/// tr((E X) A^{-1}) / d for PSD mean and PD threshold, computed through the
/// symmetric conjugation A^{-1/2} (E X) A^{-1/2}.
BoundResult markov_bound(const SymMatrix& mean_x, const SymMatrix& a);

enum class ChebyshevMode { PowerP, RootQ };

/// PowerP (p >= 1): (1/d) E[tr((|X-EX| A^{-1})^p)] via the similarity power
/// trace. RootQ (0 < q <= 1): (1/d) tr(E|X-EX|^q A^{-q}). Expectations are
/// exact atom-weighted sums.
BoundResult chebyshev_bound(const DiscreteMatrixDist& dist, const SymMatrix& a, ChebyshevMode mode,
                            double exponent);

/// || sum_i p_i exp(T (X_i - A) T~) ||^n with the operator norm of the
/// (possibly non-symmetric) expectation taken as its largest singular value.
BoundResult chernoff_bound(const DiscreteMatrixDist& dist, const SymMatrix& a,
                           const SymMatrix& t_conj, const SymMatrix& t_conj2, int n);

/// Bernoulli KL divergence D(x||y) with the 0 log 0 = 0 convention.
double kl_div(double x, double y);

/// exp(-n D(a||m)) for 0 <= m <= a <= 1, m in (0,1).
BoundResult chernoff_kl_bound(int n, double a, double m);

/// (1/d) inf_{theta>0} e^{-theta t} tr_mgf(theta). The caller supplies
/// theta -> E tr(e^{theta Y}) (exact or estimated); the infimum is taken over
/// sampled points only, in log space for stability near the overflow edge.
BoundResult laplace_bound(const std::function<double(double)>& tr_mgf, double t, int d,
                          ThetaGrid grid = {});

/// (1/d) inf_{theta>0} e^{-theta t} tr exp(cgf_sum(theta)) where cgf_sum is
/// theta -> sum_k log E e^{theta X_k}.
BoundResult master_bound(const std::function<SymMatrix(double)>& cgf_sum, double t, int d,
                         ThetaGrid grid = {});

/// h(x) = (1+x) log(1+x) - x, x >= 0.
double h_bennett(double x);

/// Bounded-increment Bernstein: h-form exp(-(sigma^2/R^2) h(Rt/sigma^2)) and
/// the weaker simplified form exp(-t^2/2 / (sigma^2 + Rt/3)).
std::pair<BoundResult, BoundResult> bernstein_bounded_bound(double sigma_sq, double r, double t);

/// Subexponential-moment Bernstein: exp(-t^2/2 / (sigma^2 + Rt)).
BoundResult bernstein_subexp_bound(double sigma_sq, double r, double t);

/// exp(-t^2 / (8 sigma^2)); also serves the bounded-difference (McDiarmid)
/// setting with sigma^2 from the function-difference matrices.
BoundResult azuma_bound(double sigma_sq, double t);

/// sigma^2 = ||(1/n) sum V_i||, value exp(-n t^2 / (2 sigma^2)). When
/// sigma^2 = 0 and t > 0 the limit value 0 is returned (noted in the result).
BoundResult hoeffding_bound(const std::vector<SymMatrix>& v_mats, int n, double t);

/// g(x) = -log(1-x) - x on [0, 1).
double g_eb(double x);

/// Empirical-Bernstein threshold (log(u/alpha) + lambda_max(quad_sum)) /
/// sum(gammas), with u = 1 unless a randomizer value is supplied.
double eb_threshold(const std::vector<double>& gammas, const SymMatrix& quad_sum, double alpha,
                    std::optional<double> randomizer_u = std::nullopt);

}  // namespace mineig
