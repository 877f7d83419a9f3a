#include "mineig/sym_matrix.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mineig {

namespace {

// Eigenvalue clamp threshold for >=0 domain requirements; squares of
// symmetric matrices carry O(eps * ||M||) negative noise.
double clamp_floor(const SymMatrix& m) {
  return 1e-12 * std::max(1.0, op_norm(m));
}

[[noreturn]] void throw_eigen_domain(const char* fn, double lambda) {
  std::ostringstream os;
  os << fn << ": eigenvalue " << lambda << " outside the function domain";
  throw std::domain_error(os.str());
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw std::invalid_argument("SymMatrix: need a square matrix with dim >= 1");
  }
  if (!m.allFinite()) {
    throw std::invalid_argument("SymMatrix: non-finite entries");
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::zero(int dim) { return SymMatrix(Matrix::Zero(dim, dim)); }

SymMatrix SymMatrix::identity(int dim) { return SymMatrix(Matrix::Identity(dim, dim)); }

SymMatrix SymMatrix::diagonal(const std::vector<double>& entries) {
  Matrix m = Matrix::Zero(static_cast<int>(entries.size()), static_cast<int>(entries.size()));
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return SymMatrix(m);
}

SymMatrix SymMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const int d = static_cast<int>(rows.size());
  Matrix m(d, d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(rows[i].size()) != d) {
      throw std::invalid_argument("SymMatrix::from_rows: ragged rows");
    }
    for (int j = 0; j < d; ++j) m(i, j) = rows[i][j];
  }
  return SymMatrix(m);
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
  if (o.dim() != dim()) throw std::invalid_argument("SymMatrix: dimension mismatch in +");
  return SymMatrix(m_ + o.m_);
}

SymMatrix SymMatrix::operator-(const SymMatrix& o) const {
  if (o.dim() != dim()) throw std::invalid_argument("SymMatrix: dimension mismatch in -");
  return SymMatrix(m_ - o.m_);
}

SymMatrix SymMatrix::operator-() const { return SymMatrix(-m_); }

SymMatrix SymMatrix::scaled(double c) const { return SymMatrix(c * m_); }

SymMatrix SymMatrix::squared() const { return SymMatrix(m_ * m_); }

Spectrum spectral_decompose(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.mat());
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("spectral_decompose: eigensolver failed to converge");
  }
  return Spectrum{solver.eigenvalues(), solver.eigenvectors()};
}

SymMatrix apply_spectral_function(const SymMatrix& m, SpectralFn f) {
  const Spectrum spec = spectral_decompose(m);
  const double floor = clamp_floor(m);
  Vector mapped(spec.eigenvalues.size());

  for (int i = 0; i < spec.eigenvalues.size(); ++i) {
    const double lambda = spec.eigenvalues[i];
    switch (f.kind) {
      case SpectralFn::Kind::Exp:
        mapped[i] = std::exp(lambda);
        break;
      case SpectralFn::Kind::Log:
        if (lambda <= floor) throw_eigen_domain("log", lambda);
        mapped[i] = std::log(lambda);
        break;
      case SpectralFn::Kind::Abs:
        mapped[i] = std::abs(lambda);
        break;
      case SpectralFn::Kind::Sqrt: {
        if (lambda < -floor) throw_eigen_domain("sqrt", lambda);
        mapped[i] = std::sqrt(std::max(lambda, 0.0));
        break;
      }
      case SpectralFn::Kind::Pow: {
        const double r = f.power;
        const bool integral = std::abs(r - std::round(r)) < 1e-12;
        if (integral) {
          if (r < 0 && std::abs(lambda) <= floor) throw_eigen_domain("pow", lambda);
          mapped[i] = std::pow(lambda, std::round(r));
        } else {
          if (lambda < -floor) throw_eigen_domain("pow", lambda);
          const double clamped = std::max(lambda, 0.0);
          if (r < 0 && clamped == 0.0) throw_eigen_domain("pow", lambda);
          mapped[i] = std::pow(clamped, r);
        }
        break;
      }
    }
    if (!std::isfinite(mapped[i])) {
      throw std::overflow_error("apply_spectral_function: non-finite result");
    }
  }

  return SymMatrix(spec.basis * mapped.asDiagonal() * spec.basis.transpose());
}

SymMatrix sym_exp(const SymMatrix& m) { return apply_spectral_function(m, SpectralFn::exp()); }
SymMatrix sym_log(const SymMatrix& m) { return apply_spectral_function(m, SpectralFn::log()); }
SymMatrix sym_abs(const SymMatrix& m) { return apply_spectral_function(m, SpectralFn::abs()); }
SymMatrix sym_sqrt(const SymMatrix& m) { return apply_spectral_function(m, SpectralFn::sqrt()); }
SymMatrix sym_pow(const SymMatrix& m, double r) {
  return apply_spectral_function(m, SpectralFn::pow(r));
}

double op_norm(const SymMatrix& m) {
  const Spectrum s = spectral_decompose(m);
  return s.eigenvalues.cwiseAbs().maxCoeff();
}

double min_eig(const SymMatrix& m) { return spectral_decompose(m).eigenvalues.minCoeff(); }

double max_eig(const SymMatrix& m) { return spectral_decompose(m).eigenvalues.maxCoeff(); }

double trace_of(const SymMatrix& m) { return m.mat().trace(); }

double log_tr_exp(const SymMatrix& m) {
  const Spectrum s = spectral_decompose(m);
  const double top = s.eigenvalues.maxCoeff();
  double acc = 0.0;
  for (int i = 0; i < s.eigenvalues.size(); ++i) acc += std::exp(s.eigenvalues[i] - top);
  return top + std::log(acc);
}

bool loewner_geq(const SymMatrix& a, const SymMatrix& b, PsdTolerance tol) {
  if (a.dim() != b.dim()) throw std::invalid_argument("loewner_geq: dimension mismatch");
  const SymMatrix diff = a - b;
  const Spectrum s = spectral_decompose(diff);
  const double scale = s.eigenvalues.cwiseAbs().maxCoeff();
  return s.eigenvalues.minCoeff() >= -tol.rel_eps * std::max(1.0, scale);
}

bool is_psd(const SymMatrix& m, PsdTolerance tol) {
  return loewner_geq(m, SymMatrix::zero(m.dim()), tol);
}

bool is_pd(const SymMatrix& m, PsdTolerance tol) {
  return min_eig(m) > tol.rel_eps * std::max(1.0, op_norm(m));
}

SymMatrix conjugate_sym(const SymMatrix& s, const SymMatrix& inner) {
  if (s.dim() != inner.dim()) throw std::invalid_argument("conjugate_sym: dimension mismatch");
  return SymMatrix(s.mat() * inner.mat() * s.mat());
}

double similarity_power_trace(const SymMatrix& b, const SymMatrix& a, double p) {
  if (b.dim() != a.dim()) {
    throw std::invalid_argument("similarity_power_trace: dimension mismatch");
  }
  if (p < 1.0) throw std::domain_error("similarity_power_trace: p must be >= 1");
  if (!is_pd(a)) {
    std::ostringstream os;
    os << "similarity_power_trace: a is not positive definite (min eigenvalue " << min_eig(a)
       << ")";
    throw std::domain_error(os.str());
  }
  const SymMatrix a_inv_sqrt = sym_pow(a, -0.5);
  const SymMatrix core = conjugate_sym(a_inv_sqrt, b);
  // core is PSD up to roundoff when b is; its p-th power trace is the sum of
  // eigenvalue powers.
  const Spectrum s = spectral_decompose(core);
  const double floor = clamp_floor(core);
  double acc = 0.0;
  for (int i = 0; i < s.eigenvalues.size(); ++i) {
    const double lambda = s.eigenvalues[i];
    if (lambda < -floor) throw_eigen_domain("similarity_power_trace", lambda);
    acc += std::pow(std::max(lambda, 0.0), p);
  }
  return acc;
}

}  // namespace mineig
