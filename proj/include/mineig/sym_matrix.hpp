#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace mineig {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense d x d real symmetric matrix, the value type every inequality is
/// stated in. Construction symmetrizes via (M + M^T)/2, so
/// entries(i,j) == entries(j,i) holds exactly afterwards. Immutable.
class SymMatrix {
public:
  /// Symmetrizes the input. Throws std::invalid_argument on non-square,
  /// empty, or non-finite input.
  explicit SymMatrix(const Matrix& m);

  static SymMatrix zero(int dim);
  static SymMatrix identity(int dim);
  static SymMatrix diagonal(const std::vector<double>& entries);
  /// Row-major nested-array literal, the same shape configs use.
  static SymMatrix from_rows(const std::vector<std::vector<double>>& rows);

  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  const Matrix& mat() const { return m_; }

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix operator-() const;
  SymMatrix scaled(double c) const;

  /// this * this, stays symmetric.
  SymMatrix squared() const;

private:
  Matrix m_;
};

inline SymMatrix operator*(double c, const SymMatrix& m) { return m.scaled(c); }

/// Eigendecomposition M = basis * diag(eigenvalues) * basis^T.
/// Eigenvalues are nondecreasing; basis columns are unit eigenvectors.
struct Spectrum {
  Vector eigenvalues;
  Matrix basis;
};

/// Relative tolerance for Loewner-order decisions: M counts as PSD when
/// lambda_min(M) >= -rel_eps * max(1, ||M||).
struct PsdTolerance {
  double rel_eps = 1e-9;
};

/// Scalar function tag for spectral application f(U S U^T) = U f(S) U^T.
struct SpectralFn {
  enum class Kind { Exp, Log, Pow, Abs, Sqrt };
  Kind kind;
  double power = 0.0;  // meaningful for Pow only

  static SpectralFn exp() { return {Kind::Exp}; }
  static SpectralFn log() { return {Kind::Log}; }
  static SpectralFn pow(double r) { return {Kind::Pow, r}; }
  static SpectralFn abs() { return {Kind::Abs}; }
  static SpectralFn sqrt() { return {Kind::Sqrt}; }
};

Spectrum spectral_decompose(const SymMatrix& m);

/// f applied through the eigendecomposition. Domain violations (log of a
/// PSD-singular matrix, fractional power of a matrix with a negative
/// eigenvalue, negative power of a singular matrix) throw std::domain_error
/// naming the offending eigenvalue.
SymMatrix apply_spectral_function(const SymMatrix& m, SpectralFn f);

// Shorthands for the common spectral functions.
SymMatrix sym_exp(const SymMatrix& m);
SymMatrix sym_log(const SymMatrix& m);
SymMatrix sym_abs(const SymMatrix& m);
SymMatrix sym_sqrt(const SymMatrix& m);
SymMatrix sym_pow(const SymMatrix& m, double r);

double op_norm(const SymMatrix& m);  // max |eigenvalue| for symmetric input
double min_eig(const SymMatrix& m);
double max_eig(const SymMatrix& m);
double trace_of(const SymMatrix& m);

/// log(tr(exp(M))) evaluated stably via a lambda_max shift; finite whenever
/// the eigenvalues are, even when tr(exp(M)) itself would overflow.
double log_tr_exp(const SymMatrix& m);

/// a >= b in the Loewner order: lambda_min(a-b) >= -rel_eps * max(1, ||a-b||).
bool loewner_geq(const SymMatrix& a, const SymMatrix& b, PsdTolerance tol = {});

bool is_psd(const SymMatrix& m, PsdTolerance tol = {});
bool is_pd(const SymMatrix& m, PsdTolerance tol = {});

/// S * inner * S for symmetric S, symmetrized against roundoff.
SymMatrix conjugate_sym(const SymMatrix& s, const SymMatrix& inner);

/// tr((a^{-1/2} b a^{-1/2})^p) for PSD b, PD a, p >= 1. The similarity
/// transform makes fractional p basis-independent and matches the repeated
/// product tr((b a^{-1})^p) at integer p. Throws std::domain_error when a is
/// not PD or p < 1.
double similarity_power_trace(const SymMatrix& b, const SymMatrix& a, double p);

}  // namespace mineig
