#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mineig/discrete_dist.hpp"
#include "mineig/rng.hpp"
#include "mineig/sym_matrix.hpp"

namespace mineig {

// Martingale difference family X_k = eps_k A_k with iid Rademacher signs.
// Satisfies the Azuma hypotheses exactly: E[X_k | past] = 0 and X_k^2 = A_k^2
// on every draw.
class RademacherSequence {
 public:
  explicit RademacherSequence(std::vector<SymMatrix> a_mats);

  const std::vector<SymMatrix>& a_mats() const { return a_mats_; }
  int dim() const { return a_mats_.front().dim(); }
  std::size_t length() const { return a_mats_.size(); }
  double sigma_sq() const;  // ||sum A_k^2||, exact
  std::vector<SymMatrix> draw(RngStream& rng) const;
  std::vector<SymMatrix> from_signs(const std::vector<int>& signs) const;

 private:
  std::vector<SymMatrix> a_mats_;
};

// Bounded-difference function H(z) = sum z_k B_k over sign vectors z, with
// difference matrices A_k = 2 B_k and exact mean E H = 0.
class McDiarmidFamily {
 public:
  explicit McDiarmidFamily(std::vector<SymMatrix> b_mats);

  std::size_t arity() const { return b_mats_.size(); }
  int dim() const { return b_mats_.front().dim(); }
  const std::vector<SymMatrix>& b_mats() const { return b_mats_; }
  const std::vector<SymMatrix>& a_mats() const { return a_mats_; }
  double sigma_sq() const;  // ||sum A_k^2||, exact
  SymMatrix exact_mean() const { return SymMatrix::zero(dim()); }
  SymMatrix h(const std::vector<int>& signs) const;
  std::vector<int> draw_signs(RngStream& rng) const;

 private:
  std::vector<SymMatrix> b_mats_;
  std::vector<SymMatrix> a_mats_;
};

// X = g * B with g standard normal: centered, sub-Gaussian with parameter
// V = B^2, and psi_X(lambda) = e^{lambda^2 B^2 / 2} with equality.
class SubGaussianFactorDist {
 public:
  explicit SubGaussianFactorDist(const SymMatrix& b);

  int dim() const { return b_.dim(); }
  const SymMatrix& b() const { return b_; }
  const SymMatrix& v() const { return v_; }
  SymMatrix sample(RngStream& rng) const;
  SymMatrix psi(double lambda) const;  // closed form e^{lambda^2 V / 2}

 private:
  SymMatrix b_;
  SymMatrix v_;
};

// Positive scalar factor distribution for multiplicative PSD processes.
struct ScalarDist {
  std::vector<double> probs;
  std::vector<double> values;

  void validate() const;  // probs positive summing to 1, values positive
  double mean() const;
  double sample(RngStream& rng) const;
};

// Y_n = (prod_{i<=n} w_i) B with Y_0 = B; E Y_n = mu^n B exactly. mu >= 1
// gives a submartingale, mu <= 1 a supermartingale.
class MultiplicativePsdProcess {
 public:
  enum class Kind { Submartingale, Supermartingale };

  MultiplicativePsdProcess(const SymMatrix& b, ScalarDist factors, std::size_t horizon,
                           Kind kind);

  int dim() const { return b_.dim(); }
  std::size_t horizon() const { return horizon_; }
  Kind kind() const { return kind_; }
  const SymMatrix& b() const { return b_; }
  const ScalarDist& factors() const { return factors_; }
  double mu() const { return mu_; }
  SymMatrix exact_mean_at(std::size_t n) const;  // mu^n B

  // Path [Y_0, ..., Y_horizon].
  std::vector<SymMatrix> draw(RngStream& rng) const;
  std::vector<SymMatrix> from_factors(const std::vector<double>& ws) const;

 private:
  SymMatrix b_;
  ScalarDist factors_;
  std::size_t horizon_;
  Kind kind_;
  double mu_;
};

// Super-uniform matrix constructions: P(U <= Z in Loewner order) <= tr(Z)/d
// for every PSD Z.
struct SuperUniformSpec {
  enum class Kind { ScalarTimesIdentity, DiagonalPlusPsd, Identity };
  Kind kind = Kind::ScalarTimesIdentity;
  int dim = 1;
  std::optional<SymMatrix> psd_part;  // the Y of the diagonal_plus_psd kind

  static SuperUniformSpec scalar_times_identity(int dim);
  static SuperUniformSpec diagonal_plus_psd(int dim, std::optional<SymMatrix> psd_part);
  static SuperUniformSpec identity(int dim);
};

SymMatrix sample_super_uniform(const SuperUniformSpec& spec, RngStream& rng);

// Super-uniform scalar: uniform on (0, 1], so P(u <= x) = x exactly.
double sample_super_uniform_scalar(RngStream& rng);

}  // namespace mineig
