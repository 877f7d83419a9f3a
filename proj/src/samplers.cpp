#include "mineig/samplers.hpp"

#include <cmath>
#include <stdexcept>

namespace mineig {

namespace {

void require_same_dim(const std::vector<SymMatrix>& mats, const char* who) {
  if (mats.empty()) throw std::invalid_argument(std::string(who) + ": empty matrix list");
  for (const SymMatrix& m : mats) {
    if (m.dim() != mats.front().dim()) {
      throw std::invalid_argument(std::string(who) + ": dimension mismatch");
    }
  }
}

double norm_of_square_sum(const std::vector<SymMatrix>& mats) {
  Matrix acc = Matrix::Zero(mats.front().dim(), mats.front().dim());
  for (const SymMatrix& m : mats) acc += m.squared().mat();
  return op_norm(SymMatrix(acc));
}

}  // namespace

RademacherSequence::RademacherSequence(std::vector<SymMatrix> a_mats)
    : a_mats_(std::move(a_mats)) {
  require_same_dim(a_mats_, "RademacherSequence");
}

double RademacherSequence::sigma_sq() const { return norm_of_square_sum(a_mats_); }

std::vector<SymMatrix> RademacherSequence::draw(RngStream& rng) const {
  std::vector<int> signs(a_mats_.size());
  for (int& s : signs) s = rng.rademacher();
  return from_signs(signs);
}

std::vector<SymMatrix> RademacherSequence::from_signs(const std::vector<int>& signs) const {
  if (signs.size() != a_mats_.size()) {
    throw std::invalid_argument("RademacherSequence: sign count mismatch");
  }
  std::vector<SymMatrix> out;
  out.reserve(a_mats_.size());
  for (std::size_t k = 0; k < a_mats_.size(); ++k) {
    if (signs[k] != 1 && signs[k] != -1) {
      throw std::invalid_argument("RademacherSequence: signs must be +-1");
    }
    out.push_back(a_mats_[k].scaled(static_cast<double>(signs[k])));
  }
  return out;
}

McDiarmidFamily::McDiarmidFamily(std::vector<SymMatrix> b_mats) : b_mats_(std::move(b_mats)) {
  require_same_dim(b_mats_, "McDiarmidFamily");
  a_mats_.reserve(b_mats_.size());
  for (const SymMatrix& b : b_mats_) a_mats_.push_back(b.scaled(2.0));
}

double McDiarmidFamily::sigma_sq() const { return norm_of_square_sum(a_mats_); }

SymMatrix McDiarmidFamily::h(const std::vector<int>& signs) const {
  if (signs.size() != b_mats_.size()) {
    throw std::invalid_argument("McDiarmidFamily: sign count mismatch");
  }
  SymMatrix acc = SymMatrix::zero(dim());
  for (std::size_t k = 0; k < b_mats_.size(); ++k) {
    if (signs[k] != 1 && signs[k] != -1) {
      throw std::invalid_argument("McDiarmidFamily: signs must be +-1");
    }
    acc = acc + b_mats_[k].scaled(static_cast<double>(signs[k]));
  }
  return acc;
}

std::vector<int> McDiarmidFamily::draw_signs(RngStream& rng) const {
  std::vector<int> signs(b_mats_.size());
  for (int& s : signs) s = rng.rademacher();
  return signs;
}

SubGaussianFactorDist::SubGaussianFactorDist(const SymMatrix& b) : b_(b), v_(b.squared()) {}

SymMatrix SubGaussianFactorDist::sample(RngStream& rng) const {
  return b_.scaled(rng.normal());
}

SymMatrix SubGaussianFactorDist::psi(double lambda) const {
  return sym_exp(v_.scaled(lambda * lambda / 2.0));
}

void ScalarDist::validate() const {
  if (probs.size() != values.size() || probs.empty()) {
    throw std::invalid_argument("ScalarDist: probs and values must be nonempty, equal length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] > 0.0)) throw std::invalid_argument("ScalarDist: probabilities must be > 0");
    if (!(values[i] > 0.0)) throw std::invalid_argument("ScalarDist: factor values must be > 0");
    total += probs[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("ScalarDist: probabilities must sum to 1");
  }
}

double ScalarDist::mean() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) acc += probs[i] * values[i];
  return acc;
}

double ScalarDist::sample(RngStream& rng) const {
  return values[rng.categorical(probs)];
}

MultiplicativePsdProcess::MultiplicativePsdProcess(const SymMatrix& b, ScalarDist factors,
                                                   std::size_t horizon, Kind kind)
    : b_(b), factors_(std::move(factors)), horizon_(horizon), kind_(kind) {
  factors_.validate();
  if (horizon_ < 1) throw std::invalid_argument("MultiplicativePsdProcess: horizon must be >= 1");
  if (!is_psd(b_)) throw std::invalid_argument("MultiplicativePsdProcess: B must be PSD");
  mu_ = factors_.mean();
  if (kind_ == Kind::Submartingale && mu_ < 1.0 - 1e-12) {
    throw std::invalid_argument("MultiplicativePsdProcess: submartingale needs mean factor >= 1");
  }
  if (kind_ == Kind::Supermartingale && mu_ > 1.0 + 1e-12) {
    throw std::invalid_argument("MultiplicativePsdProcess: supermartingale needs mean factor <= 1");
  }
}

SymMatrix MultiplicativePsdProcess::exact_mean_at(std::size_t n) const {
  return b_.scaled(std::pow(mu_, static_cast<double>(n)));
}

std::vector<SymMatrix> MultiplicativePsdProcess::draw(RngStream& rng) const {
  std::vector<double> ws(horizon_);
  for (double& w : ws) w = factors_.sample(rng);
  return from_factors(ws);
}

std::vector<SymMatrix> MultiplicativePsdProcess::from_factors(const std::vector<double>& ws) const {
  if (ws.size() != horizon_) {
    throw std::invalid_argument("MultiplicativePsdProcess: factor count mismatch");
  }
  std::vector<SymMatrix> path;
  path.reserve(horizon_ + 1);
  path.push_back(b_);
  double prod = 1.0;
  for (double w : ws) {
    prod *= w;
    path.push_back(b_.scaled(prod));
  }
  return path;
}

SuperUniformSpec SuperUniformSpec::scalar_times_identity(int dim) {
  if (dim < 1) throw std::invalid_argument("SuperUniformSpec: dim must be >= 1");
  return {Kind::ScalarTimesIdentity, dim, std::nullopt};
}

SuperUniformSpec SuperUniformSpec::diagonal_plus_psd(int dim, std::optional<SymMatrix> psd_part) {
  if (dim < 1) throw std::invalid_argument("SuperUniformSpec: dim must be >= 1");
  if (psd_part) {
    if (psd_part->dim() != dim) {
      throw std::invalid_argument("SuperUniformSpec: psd_part dimension mismatch");
    }
    if (!is_psd(*psd_part)) throw std::invalid_argument("SuperUniformSpec: psd_part must be PSD");
  }
  return {Kind::DiagonalPlusPsd, dim, std::move(psd_part)};
}

SuperUniformSpec SuperUniformSpec::identity(int dim) {
  if (dim < 1) throw std::invalid_argument("SuperUniformSpec: dim must be >= 1");
  return {Kind::Identity, dim, std::nullopt};
}

SymMatrix sample_super_uniform(const SuperUniformSpec& spec, RngStream& rng) {
  switch (spec.kind) {
    case SuperUniformSpec::Kind::Identity:
      return SymMatrix::identity(spec.dim);
    case SuperUniformSpec::Kind::ScalarTimesIdentity:
      return SymMatrix::identity(spec.dim).scaled(sample_super_uniform_scalar(rng));
    case SuperUniformSpec::Kind::DiagonalPlusPsd: {
      // min_i u_i must itself be uniform: pin the first coordinate to the
      // minimum and place the rest above it.
      const double u = sample_super_uniform_scalar(rng);
      std::vector<double> diag(static_cast<std::size_t>(spec.dim));
      diag[0] = u;
      for (std::size_t i = 1; i < diag.size(); ++i) diag[i] = u + rng.uniform01() * (1.0 - u);
      SymMatrix out = SymMatrix::diagonal(diag);
      if (spec.psd_part) out = out + *spec.psd_part;
      return out;
    }
  }
  throw std::logic_error("sample_super_uniform: unknown kind");
}

double sample_super_uniform_scalar(RngStream& rng) { return rng.uniform_open01(); }

}  // namespace mineig
