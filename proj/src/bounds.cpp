#include "mineig/bounds.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mineig/matrix_exp.hpp"

namespace mineig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double eval_or_inf(const std::function<double(double)>& f, double theta) {
  const double v = f(theta);
  return std::isfinite(v) ? v : kInf;
}

// Golden-section refinement of a minimum bracketed by (lo, mid, hi) in
// log-theta coordinates. Returns the best (theta, value) seen.
std::pair<double, double> golden_refine(const std::function<double(double)>& f, double log_lo,
                                        double log_mid, double log_hi, double mid_val,
                                        int iters) {
  constexpr double kInvPhi = 0.6180339887498949;
  double best_log = log_mid;
  double best_val = mid_val;

  double a = log_lo, b = log_hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = eval_or_inf(f, std::exp(c));
  double fd = eval_or_inf(f, std::exp(d));
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = eval_or_inf(f, std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = eval_or_inf(f, std::exp(d));
    }
    if (fc < best_val) {
      best_val = fc;
      best_log = c;
    }
    if (fd < best_val) {
      best_val = fd;
      best_log = d;
    }
  }
  return {std::exp(best_log), best_val};
}

ThetaOptimum minimize_on_grid(const std::function<double(double)>& objective, ThetaGrid grid) {
  if (grid.points < 2 || !(grid.log10_min < grid.log10_max)) {
    throw std::invalid_argument("optimize_theta: malformed ThetaGrid");
  }
  const double ln10 = std::log(10.0);
  std::vector<double> logs(static_cast<std::size_t>(grid.points));
  std::vector<double> vals(static_cast<std::size_t>(grid.points));
  int best = -1;
  for (int i = 0; i < grid.points; ++i) {
    const double frac = static_cast<double>(i) / (grid.points - 1);
    const double lg = (grid.log10_min + frac * (grid.log10_max - grid.log10_min)) * ln10;
    logs[static_cast<std::size_t>(i)] = lg;
    const double v = eval_or_inf(objective, std::exp(lg));
    vals[static_cast<std::size_t>(i)] = v;
    // Ties prefer the later grid point so monotone-decreasing objectives
    // surface as boundary hits rather than stopping at the first flat value.
    if (v < kInf && (best < 0 || v <= vals[static_cast<std::size_t>(best)])) best = i;
  }
  if (best < 0) throw std::runtime_error("optimize_theta: objective non-finite on entire grid");

  ThetaOptimum opt;
  opt.boundary_hit = (best == 0 || best == grid.points - 1);
  if (opt.boundary_hit) {
    opt.theta_star = std::exp(logs[static_cast<std::size_t>(best)]);
    opt.value = vals[static_cast<std::size_t>(best)];
    return opt;
  }
  const auto ib = static_cast<std::size_t>(best);
  const auto [theta, value] = golden_refine(objective, logs[ib - 1], logs[ib], logs[ib + 1],
                                            vals[ib], grid.refine_iters);
  opt.theta_star = theta;
  opt.value = value;
  return opt;
}

std::string boundary_note(const ThetaOptimum& opt) {
  return opt.boundary_hit ? "theta at grid boundary" : "";
}

}  // namespace

ThetaOptimum optimize_theta(const std::function<double(double)>& objective, ThetaGrid grid) {
  return minimize_on_grid(objective, grid);
}

BoundResult markov_bound(const SymMatrix& mean_x, const SymMatrix& a) {
  if (mean_x.dim() != a.dim()) throw std::invalid_argument("markov_bound: dimension mismatch");
  if (!is_pd(a)) throw std::domain_error("markov_bound: a is not positive definite");
  if (!is_psd(mean_x)) throw std::domain_error("markov_bound: mean is not positive semidefinite");
  const SymMatrix a_inv_sqrt = sym_pow(a, -0.5);
  const double tr = trace_of(conjugate_sym(a_inv_sqrt, mean_x));
  return {"markov", tr / a.dim(), std::nullopt, std::nullopt, ""};
}

BoundResult chebyshev_bound(const DiscreteMatrixDist& dist, const SymMatrix& a,
                            ChebyshevMode mode, double exponent) {
  if (dist.dim() != a.dim()) throw std::invalid_argument("chebyshev_bound: dimension mismatch");
  if (!is_pd(a)) throw std::domain_error("chebyshev_bound: a is not positive definite");
  const int d = dist.dim();
  const SymMatrix mean = dist.exact_mean();

  if (mode == ChebyshevMode::PowerP) {
    if (exponent < 1.0) throw std::domain_error("chebyshev_bound: p must be >= 1");
    double acc = 0.0;
    for (const Atom& atom : dist.atoms()) {
      acc += atom.prob * similarity_power_trace(sym_abs(atom.value - mean), a, exponent);
    }
    return {"chebyshev_p", acc / d, std::nullopt, std::nullopt, ""};
  }

  if (!(exponent > 0.0 && exponent <= 1.0)) {
    throw std::domain_error("chebyshev_bound: q must lie in (0, 1]");
  }
  const SymMatrix moment = dist.exact_abs_centered_moment(exponent);
  const SymMatrix a_neg_q = sym_pow(a, -exponent);
  const double tr = (moment.mat() * a_neg_q.mat()).trace();
  return {"chebyshev_q", tr / d, std::nullopt, std::nullopt, ""};
}

BoundResult chernoff_bound(const DiscreteMatrixDist& dist, const SymMatrix& a,
                           const SymMatrix& t_conj, const SymMatrix& t_conj2, int n) {
  if (dist.dim() != a.dim() || a.dim() != t_conj.dim() || a.dim() != t_conj2.dim()) {
    throw std::invalid_argument("chernoff_bound: dimension mismatch");
  }
  if (n < 1) throw std::invalid_argument("chernoff_bound: n must be >= 1");
  Matrix expectation = Matrix::Zero(a.dim(), a.dim());
  for (const Atom& atom : dist.atoms()) {
    const Matrix exponent = t_conj.mat() * (atom.value - a).mat() * t_conj2.mat();
    expectation += atom.prob * general_exp(exponent);
  }
  const double norm = singular_norm(expectation);
  return {"chernoff", std::pow(norm, n), std::nullopt, std::nullopt, ""};
}

double kl_div(double x, double y) {
  if (x < 0.0 || x > 1.0) throw std::domain_error("kl_div: x must lie in [0, 1]");
  if (!(y > 0.0 && y < 1.0)) throw std::domain_error("kl_div: y must lie in (0, 1)");
  double acc = 0.0;
  if (x > 0.0) acc += x * (std::log(x) - std::log(y));
  if (x < 1.0) acc += (1.0 - x) * (std::log(1.0 - x) - std::log(1.0 - y));
  return acc;
}

BoundResult chernoff_kl_bound(int n, double a, double m) {
  if (n < 1) throw std::invalid_argument("chernoff_kl_bound: n must be >= 1");
  if (!(0.0 <= m && m <= a && a <= 1.0)) {
    throw std::domain_error("chernoff_kl_bound: need 0 <= m <= a <= 1");
  }
  if (!(m > 0.0 && m < 1.0)) throw std::domain_error("chernoff_kl_bound: m must lie in (0, 1)");
  return {"chernoff_kl", std::exp(-static_cast<double>(n) * kl_div(a, m)), std::nullopt,
          std::nullopt, ""};
}

BoundResult laplace_bound(const std::function<double(double)>& tr_mgf, double t, int d,
                          ThetaGrid grid) {
  if (d < 1) throw std::invalid_argument("laplace_bound: d must be >= 1");
  // Work with -theta*t + log tr_mgf(theta); the exp of the minimum equals the
  // product-form infimum but survives magnitudes the product form cannot.
  // A tr_mgf that throws past the representable range reads as +inf.
  const auto log_objective = [&](double theta) {
    double tr = kInf;
    try {
      tr = tr_mgf(theta);
    } catch (const std::exception&) {
      return kInf;
    }
    if (!std::isfinite(tr) || tr < 0.0) return kInf;
    if (tr == 0.0) return -kInf;
    return -theta * t + std::log(tr);
  };
  const ThetaOptimum opt = minimize_on_grid(log_objective, grid);
  return {"laplace", std::exp(opt.value) / d, opt.theta_star, std::nullopt, boundary_note(opt)};
}

BoundResult master_bound(const std::function<SymMatrix(double)>& cgf_sum, double t, int d,
                         ThetaGrid grid) {
  if (d < 1) throw std::invalid_argument("master_bound: d must be >= 1");
  // log_tr_exp itself is shift-stable, but cgf_sum can overflow internally
  // before the shift; such theta read as +inf.
  const auto log_objective = [&](double theta) -> double {
    try {
      return -theta * t + log_tr_exp(cgf_sum(theta));
    } catch (const std::exception&) {
      return kInf;
    }
  };
  const ThetaOptimum opt = minimize_on_grid(log_objective, grid);
  return {"master", std::exp(opt.value) / d, opt.theta_star, std::nullopt, boundary_note(opt)};
}

double h_bennett(double x) {
  if (x < 0.0) throw std::domain_error("h_bennett: x must be >= 0");
  return (1.0 + x) * std::log1p(x) - x;
}

std::pair<BoundResult, BoundResult> bernstein_bounded_bound(double sigma_sq, double r, double t) {
  if (!(sigma_sq > 0.0)) throw std::domain_error("bernstein_bounded_bound: sigma^2 must be > 0");
  if (!(r > 0.0)) throw std::domain_error("bernstein_bounded_bound: R must be > 0");
  if (t < 0.0) throw std::domain_error("bernstein_bounded_bound: t must be >= 0");
  BoundResult h_form{"bernstein_bounded_h",
                     std::exp(-(sigma_sq / (r * r)) * h_bennett(r * t / sigma_sq)), std::nullopt,
                     sigma_sq, ""};
  BoundResult simplified{"bernstein_bounded_simplified",
                         std::exp(-0.5 * t * t / (sigma_sq + r * t / 3.0)), std::nullopt,
                         sigma_sq, ""};
  return {h_form, simplified};
}

BoundResult bernstein_subexp_bound(double sigma_sq, double r, double t) {
  if (!(sigma_sq > 0.0)) throw std::domain_error("bernstein_subexp_bound: sigma^2 must be > 0");
  if (!(r > 0.0)) throw std::domain_error("bernstein_subexp_bound: R must be > 0");
  if (t < 0.0) throw std::domain_error("bernstein_subexp_bound: t must be >= 0");
  return {"bernstein_subexp", std::exp(-0.5 * t * t / (sigma_sq + r * t)), std::nullopt, sigma_sq,
          ""};
}

BoundResult azuma_bound(double sigma_sq, double t) {
  if (!(sigma_sq > 0.0)) throw std::domain_error("azuma_bound: sigma^2 must be > 0");
  if (t < 0.0) throw std::domain_error("azuma_bound: t must be >= 0");
  return {"azuma", std::exp(-t * t / (8.0 * sigma_sq)), std::nullopt, sigma_sq, ""};
}

BoundResult hoeffding_bound(const std::vector<SymMatrix>& v_mats, int n, double t) {
  if (n < 1 || static_cast<int>(v_mats.size()) != n) {
    throw std::invalid_argument("hoeffding_bound: need n >= 1 matrices");
  }
  if (t < 0.0) throw std::domain_error("hoeffding_bound: t must be >= 0");
  Matrix acc = Matrix::Zero(v_mats.front().dim(), v_mats.front().dim());
  for (const SymMatrix& v : v_mats) {
    if (!is_psd(v)) throw std::domain_error("hoeffding_bound: V_i must be PSD");
    acc += v.mat();
  }
  const double sigma_sq = op_norm(SymMatrix(acc / n));
  if (sigma_sq == 0.0) {
    // Degenerate family: X_i = 0 a.s., so the t > 0 event has probability 0.
    return {"hoeffding", t > 0.0 ? 0.0 : 1.0, std::nullopt, 0.0,
            "sigma^2 = 0, limit value by convention"};
  }
  return {"hoeffding", std::exp(-n * t * t / (2.0 * sigma_sq)), std::nullopt, sigma_sq, ""};
}

double g_eb(double x) {
  if (!(x >= 0.0 && x < 1.0)) throw std::domain_error("g_eb: x must lie in [0, 1)");
  return -std::log1p(-x) - x;
}

double eb_threshold(const std::vector<double>& gammas, const SymMatrix& quad_sum, double alpha,
                    std::optional<double> randomizer_u) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("eb_threshold: alpha must lie in (0, 1)");
  double gamma_sum = 0.0;
  for (double g : gammas) {
    if (!(g > 0.0 && g < 1.0)) throw std::domain_error("eb_threshold: gammas must lie in (0, 1)");
    gamma_sum += g;
  }
  if (!(gamma_sum > 0.0)) throw std::domain_error("eb_threshold: sum of gammas must be > 0");
  const double u = randomizer_u.value_or(1.0);
  if (!(u > 0.0)) throw std::domain_error("eb_threshold: randomizer must be > 0");
  return (std::log(u / alpha) + max_eig(quad_sum)) / gamma_sum;
}

}  // namespace mineig
