#include "mineig/processes.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mineig/bounds.hpp"

namespace mineig {

ProcessPath::ProcessPath(std::vector<ProcessStep> steps, double tol) : steps_(std::move(steps)) {
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    const ProcessStep& s = steps_[i];
    if (s.m.dim() != s.x.dim() || s.x.dim() != steps_.front().x.dim()) {
      throw std::invalid_argument("ProcessPath: dimension mismatch at step " + std::to_string(i));
    }
    if (s.x_hat) {
      if (s.x_hat->dim() != s.x.dim()) {
        throw std::invalid_argument("ProcessPath: x_hat dimension mismatch at step " +
                                    std::to_string(i));
      }
      const double lam = min_eig(s.x - *s.x_hat);
      if (lam < -1.0 - tol) {
        std::ostringstream msg;
        msg << "ProcessPath: lambda_min(x - x_hat) = " << lam << " < -1 at step " << i;
        throw std::invalid_argument(msg.str());
      }
    }
    if (s.gamma && !(*s.gamma > 0.0 && *s.gamma < 1.0)) {
      throw std::invalid_argument("ProcessPath: gamma outside (0, 1) at step " +
                                  std::to_string(i));
    }
  }
}

int ProcessPath::dim() const {
  if (steps_.empty()) throw std::logic_error("ProcessPath: dim of empty path");
  return steps_.front().x.dim();
}

EBState EBState::initial(int dim) {
  return {SymMatrix::zero(dim), SymMatrix::zero(dim), 0.0, 0};
}

std::vector<std::pair<double, EBState>> eb_trace(const ProcessPath& path) {
  const int d = path.length() == 0 ? 1 : path.dim();
  std::vector<std::pair<double, EBState>> out;
  out.reserve(path.length() + 1);
  EBState state = EBState::initial(d);
  out.emplace_back(static_cast<double>(d), state);
  for (std::size_t i = 0; i < path.length(); ++i) {
    const ProcessStep& s = path.steps()[i];
    if (!s.x_hat || !s.gamma) {
      throw std::invalid_argument("eb_trace: step " + std::to_string(i) +
                                  " lacks x_hat or gamma");
    }
    const double g = *s.gamma;
    const SymMatrix diff_hat = s.x - *s.x_hat;
    state.z_sum = state.z_sum + (s.x - s.m).scaled(g);
    state.quad_sum = state.quad_sum + diff_hat.squared().scaled(g_eb(g));
    state.gamma_sum += g;
    state.n += 1;
    const double l_n = trace_of(sym_exp(state.z_sum - state.quad_sum));
    out.emplace_back(l_n, state);
  }
  return out;
}

double generic_supermartingale_L(const std::vector<SymMatrix>& z_list,
                                 const std::vector<SymMatrix>& c_list,
                                 const std::vector<SymMatrix>& c_prime_list) {
  if (z_list.size() != c_list.size() || z_list.size() != c_prime_list.size()) {
    throw std::invalid_argument("generic_supermartingale_L: list length mismatch");
  }
  if (z_list.empty()) {
    throw std::invalid_argument("generic_supermartingale_L: empty input");
  }
  const int d = z_list.front().dim();
  SymMatrix z_sum = SymMatrix::zero(d);
  SymMatrix comp_sum = SymMatrix::zero(d);
  for (std::size_t i = 0; i < z_list.size(); ++i) {
    if (z_list[i].dim() != d || c_list[i].dim() != d || c_prime_list[i].dim() != d) {
      throw std::invalid_argument("generic_supermartingale_L: dimension mismatch at index " +
                                  std::to_string(i));
    }
    z_sum = z_sum + z_list[i];
    comp_sum = comp_sum + c_list[i] + c_prime_list[i];
  }
  const double l_n = trace_of(sym_exp(z_sum - comp_sum));
  const double lower = d * std::exp(min_eig(z_sum) - max_eig(comp_sum));
  if (l_n < lower * (1.0 - 1e-9) - 1e-300) {
    std::ostringstream msg;
    msg << "generic_supermartingale_L: trace " << l_n << " below lower bound " << lower;
    throw std::logic_error(msg.str());
  }
  return l_n;
}

StoppingRule StoppingRule::fixed(std::size_t n) {
  if (n < 1) throw std::invalid_argument("StoppingRule: horizon must be >= 1");
  return {Kind::FixedN, n};
}

StoppingRule StoppingRule::first_hit_capped(std::size_t horizon) {
  if (horizon < 1) throw std::invalid_argument("StoppingRule: horizon must be >= 1");
  return {Kind::FirstHitCapped, horizon};
}

bool doob_maximal_event(const std::vector<SymMatrix>& path, const SymMatrix& a,
                        std::size_t horizon, PsdTolerance tol) {
  if (horizon + 1 > path.size()) {
    throw std::invalid_argument("doob_maximal_event: horizon " + std::to_string(horizon) +
                                " exceeds path length " + std::to_string(path.size()));
  }
  for (std::size_t n = 1; n <= horizon; ++n) {
    if (loewner_geq(path[n], a, tol)) return true;
  }
  return false;
}

bool ville_stopped_event(const std::vector<SymMatrix>& path, const StoppingRule& rule,
                         const SymMatrix& a, const std::optional<SymMatrix>& u_conjugate,
                         PsdTolerance tol) {
  SymMatrix threshold = a;
  if (u_conjugate) {
    threshold = conjugate_sym(sym_sqrt(a), *u_conjugate);
  }
  if (rule.horizon + 1 > path.size()) {
    throw std::invalid_argument("ville_stopped_event: horizon " + std::to_string(rule.horizon) +
                                " exceeds path length " + std::to_string(path.size()));
  }
  if (rule.kind == StoppingRule::Kind::FixedN) {
    return loewner_geq(path[rule.horizon], threshold, tol);
  }
  for (std::size_t n = 1; n <= rule.horizon; ++n) {
    if (loewner_geq(path[n], threshold, tol)) return true;
  }
  return false;
}

bool randomized_event(const SymMatrix& x, const SymMatrix& a, const SymMatrix& u,
                      RandomizedForm form, const RandomizedParams& params, PsdTolerance tol) {
  switch (form) {
    case RandomizedForm::Markov: {
      if (!is_pd(a)) throw std::domain_error("randomized_event: a must be PD for markov form");
      return loewner_geq(x, conjugate_sym(sym_sqrt(a), u), tol);
    }
    case RandomizedForm::ChebyshevQ: {
      if (!is_pd(a)) throw std::domain_error("randomized_event: a must be PD for chebyshev form");
      if (!(params.q > 0.0 && params.q <= 1.0)) {
        throw std::domain_error("randomized_event: q must lie in (0, 1]");
      }
      if (!params.ex) throw std::invalid_argument("randomized_event: chebyshev form needs ex");
      const SymMatrix inner = conjugate_sym(sym_pow(a, params.q / 2.0), u);
      const SymMatrix threshold = sym_pow(inner, 1.0 / params.q);
      return loewner_geq(sym_abs(x - *params.ex), threshold, tol);
    }
    case RandomizedForm::Chernoff: {
      const SymMatrix threshold = conjugate_sym(sym_exp(a.scaled(params.gamma / 2.0)), u);
      return loewner_geq(sym_exp(x.scaled(params.gamma)), threshold, tol);
    }
    case RandomizedForm::Hoeffding: {
      if (!(params.beta > 0.0)) throw std::domain_error("randomized_event: beta must be > 0");
      if (!params.ex) throw std::invalid_argument("randomized_event: hoeffding form needs ex");
      const SymMatrix lhs = sym_exp((x - *params.ex).scaled(params.gamma));
      return loewner_geq(lhs, u.scaled(params.beta), tol);
    }
  }
  throw std::logic_error("randomized_event: unknown form");
}

bool partial_sum_min_eig_event(const std::vector<SymMatrix>& xs, double t, double scale,
                               PsdTolerance tol) {
  if (xs.empty()) throw std::invalid_argument("partial_sum_min_eig_event: empty list");
  const int d = xs.front().dim();
  SymMatrix sum = SymMatrix::zero(d);
  for (const SymMatrix& x : xs) {
    if (x.dim() != d) throw std::invalid_argument("partial_sum_min_eig_event: dim mismatch");
    sum = sum + x;
  }
  const SymMatrix scaled = sum.scaled(scale);
  const double slack = tol.rel_eps * std::max(1.0, op_norm(scaled));
  return min_eig(scaled) >= t - slack;
}

}  // namespace mineig
