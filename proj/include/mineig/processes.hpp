#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "mineig/sym_matrix.hpp"

namespace mineig {

// One step of an adapted matrix sequence: observation X_n, its conditional
// mean M_n (known by construction), and optionally a predictable prediction
// X_hat_n plus tuning weight gamma_n for the empirical-Bernstein process.
struct ProcessStep {
  SymMatrix x;
  SymMatrix m;
  std::optional<SymMatrix> x_hat;
  std::optional<double> gamma;
};

// Validated adapted path. Construction enforces the hypothesis guards:
// matching dims, gamma in (0,1), and lambda_min(x - x_hat) >= -1 - tol.
class ProcessPath {
 public:
  ProcessPath() = default;
  explicit ProcessPath(std::vector<ProcessStep> steps, double tol = 1e-9);

  const std::vector<ProcessStep>& steps() const { return steps_; }
  std::size_t length() const { return steps_.size(); }
  int dim() const;

 private:
  std::vector<ProcessStep> steps_;
};

// Running sums of the empirical-Bernstein supermartingale
// L_n = tr exp(z_sum - quad_sum).
struct EBState {
  SymMatrix z_sum;     // sum gamma_i (X_i - M_i)
  SymMatrix quad_sum;  // sum g(gamma_i) (X_i - X_hat_i)^2
  double gamma_sum = 0.0;
  std::size_t n = 0;

  static EBState initial(int dim);
};

// Trace process of the empirical-Bernstein supermartingale along a path.
// Entry 0 is (L_0 = d, initial state); entry k is the state after k steps.
std::vector<std::pair<double, EBState>> eb_trace(const ProcessPath& path);

// L_n = tr exp(sum Z_i - sum (C_i + C'_i)) for caller-supplied compensators.
// Also asserts the lower bound d * exp(lambda_min(sum Z) - lambda_max(sum C + C'));
// a violation beyond 1e-9 relative is a logic error, not a data error.
double generic_supermartingale_L(const std::vector<SymMatrix>& z_list,
                                 const std::vector<SymMatrix>& c_list,
                                 const std::vector<SymMatrix>& c_prime_list);

// Stopping rules with a finite horizon. FirstHitCapped stops at the first
// index whose predicate fires, or at the horizon if none does.
struct StoppingRule {
  enum class Kind { FixedN, FirstHitCapped };
  Kind kind = Kind::FixedN;
  std::size_t horizon = 1;

  static StoppingRule fixed(std::size_t n);
  static StoppingRule first_hit_capped(std::size_t horizon);
};

// True iff Y_n >= a in the Loewner order for some n in 1..horizon.
// path[0] is Y_0 and is not part of the event.
bool doob_maximal_event(const std::vector<SymMatrix>& path, const SymMatrix& a,
                        std::size_t horizon, PsdTolerance tol = {});

// Stopped-event form: under FirstHitCapped the event is a first hit of the
// threshold within the horizon; under FixedN it is Y_N >= threshold. The
// threshold is a itself, or a^{1/2} u a^{1/2} when a randomizer is supplied.
bool ville_stopped_event(const std::vector<SymMatrix>& path, const StoppingRule& rule,
                         const SymMatrix& a, const std::optional<SymMatrix>& u_conjugate,
                         PsdTolerance tol = {});

// Randomized-inequality events, each a Loewner comparison against a
// super-uniform-randomized threshold.
enum class RandomizedForm { Markov, ChebyshevQ, Chernoff, Hoeffding };

struct RandomizedParams {
  double q = 1.0;                // ChebyshevQ exponent, in (0, 1]
  double gamma = 1.0;            // Chernoff / Hoeffding exponential rate
  double beta = 1.0;             // Hoeffding threshold scale, > 0
  std::optional<SymMatrix> ex;   // E X (ChebyshevQ) or M (Hoeffding)
};

bool randomized_event(const SymMatrix& x, const SymMatrix& a, const SymMatrix& u,
                      RandomizedForm form, const RandomizedParams& params,
                      PsdTolerance tol = {});

// True iff lambda_min(scale * sum xs) >= t - rel_eps * max(1, ||scale * sum xs||).
bool partial_sum_min_eig_event(const std::vector<SymMatrix>& xs, double t, double scale = 1.0,
                               PsdTolerance tol = {});

}  // namespace mineig
