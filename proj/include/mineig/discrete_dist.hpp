#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "mineig/rng.hpp"
#include "mineig/sym_matrix.hpp"

namespace mineig {

struct Atom {
  double prob;
  SymMatrix value;
};

/// Finite list of (probability, SymMatrix) atoms. Enables exact expectations,
/// exact MGFs, and exact event probabilities by enumeration.
class DiscreteMatrixDist {
public:
  /// Probabilities must be positive and sum to 1 within 1e-12; all values
  /// must share one dimension.
  explicit DiscreteMatrixDist(std::vector<Atom> atoms);

  int dim() const { return atoms_.front().value.dim(); }
  const std::vector<Atom>& atoms() const { return atoms_; }

  SymMatrix exact_mean() const;
  /// E exp(theta X), exact atom-weighted sum; always PD.
  SymMatrix exact_mgf(double theta) const;
  /// E |X - EX|^q via spectral abs/pow per atom.
  SymMatrix exact_abs_centered_moment(double q) const;

  const SymMatrix& sample(RngStream& rng) const;
  int sample_index(RngStream& rng) const;

private:
  std::vector<Atom> atoms_;
  std::vector<double> probs_;
};

/// X = A with probability p, 0 otherwise; the instance on which the
/// order-Markov bound is an equality.
DiscreteMatrixDist tight_example_dist(const SymMatrix& a, double p);

/// X = I w.p. m, 0 w.p. 1-m. Satisfies 0 <= X <= I a.s. with E X = m I.
DiscreteMatrixDist bounded_iid_dist(int d, double m);

inline constexpr std::size_t kEnumerationCap = std::size_t{1} << 16;

/// Visits every length-n sequence of atoms with its product probability.
/// Refuses (std::length_error naming the count) when |atoms|^n exceeds cap.
void enumerate_product_support(
    const DiscreteMatrixDist& dist, int n,
    const std::function<void(double, const std::vector<const SymMatrix*>&)>& visit,
    std::size_t cap = kEnumerationCap);

/// Sequence count |atoms|^n, saturating; used for cap checks.
std::size_t product_support_size(const DiscreteMatrixDist& dist, int n);

/// Heterogeneous product: one atom from each distribution in order, with the
/// product probability. Same cap rule as the iid overload.
void enumerate_product_support(
    const std::vector<DiscreteMatrixDist>& dists,
    const std::function<void(double, const std::vector<const SymMatrix*>&)>& visit,
    std::size_t cap = kEnumerationCap);

}  // namespace mineig
