#include "mineig/discrete_dist.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mineig {

DiscreteMatrixDist::DiscreteMatrixDist(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw std::invalid_argument("DiscreteMatrixDist: no atoms");
  const int d = atoms_.front().value.dim();
  double total = 0.0;
  for (const Atom& a : atoms_) {
    if (!(a.prob > 0.0)) throw std::invalid_argument("DiscreteMatrixDist: atom probability must be > 0");
    if (a.value.dim() != d) throw std::invalid_argument("DiscreteMatrixDist: mixed dimensions");
    total += a.prob;
    probs_.push_back(a.prob);
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "DiscreteMatrixDist: probabilities sum to " << total << ", not 1";
    throw std::invalid_argument(os.str());
  }
}

SymMatrix DiscreteMatrixDist::exact_mean() const {
  Matrix acc = Matrix::Zero(dim(), dim());
  for (const Atom& a : atoms_) acc += a.prob * a.value.mat();
  return SymMatrix(acc);
}

SymMatrix DiscreteMatrixDist::exact_mgf(double theta) const {
  Matrix acc = Matrix::Zero(dim(), dim());
  for (const Atom& a : atoms_) acc += a.prob * sym_exp(theta * a.value).mat();
  return SymMatrix(acc);
}

SymMatrix DiscreteMatrixDist::exact_abs_centered_moment(double q) const {
  const SymMatrix mean = exact_mean();
  Matrix acc = Matrix::Zero(dim(), dim());
  for (const Atom& a : atoms_) {
    const SymMatrix dev = sym_abs(a.value - mean);
    acc += a.prob * (q == 1.0 ? dev : sym_pow(dev, q)).mat();
  }
  return SymMatrix(acc);
}

const SymMatrix& DiscreteMatrixDist::sample(RngStream& rng) const {
  return atoms_[static_cast<std::size_t>(sample_index(rng))].value;
}

int DiscreteMatrixDist::sample_index(RngStream& rng) const { return rng.categorical(probs_); }

DiscreteMatrixDist tight_example_dist(const SymMatrix& a, double p) {
  if (p < 0.0 || p > 1.0) throw std::domain_error("tight_example_dist: p must lie in [0, 1]");
  if (!is_pd(a)) throw std::domain_error("tight_example_dist: a must be positive definite");
  if (p == 0.0) return DiscreteMatrixDist({{1.0, SymMatrix::zero(a.dim())}});
  if (p == 1.0) return DiscreteMatrixDist({{1.0, a}});
  return DiscreteMatrixDist({{p, a}, {1.0 - p, SymMatrix::zero(a.dim())}});
}

DiscreteMatrixDist bounded_iid_dist(int d, double m) {
  if (!(m > 0.0 && m < 1.0)) throw std::domain_error("bounded_iid_dist: m must lie in (0, 1)");
  return DiscreteMatrixDist({{m, SymMatrix::identity(d)}, {1.0 - m, SymMatrix::zero(d)}});
}

std::size_t product_support_size(const DiscreteMatrixDist& dist, int n) {
  std::size_t count = 1;
  for (int i = 0; i < n; ++i) {
    if (count > kEnumerationCap) return count;  // saturate, caller reports
    count *= dist.atoms().size();
  }
  return count;
}

void enumerate_product_support(
    const DiscreteMatrixDist& dist, int n,
    const std::function<void(double, const std::vector<const SymMatrix*>&)>& visit,
    std::size_t cap) {
  if (n < 0) throw std::invalid_argument("enumerate_product_support: n must be >= 0");
  const std::size_t count = product_support_size(dist, n);
  if (count > cap) {
    std::ostringstream os;
    os << "enumerate_product_support: " << dist.atoms().size() << "^" << n << " = " << count
       << " sequences exceeds cap " << cap;
    throw std::length_error(os.str());
  }

  std::vector<int> odometer(static_cast<std::size_t>(n), 0);
  std::vector<const SymMatrix*> values(static_cast<std::size_t>(n));
  const auto& atoms = dist.atoms();
  while (true) {
    double prob = 1.0;
    for (int i = 0; i < n; ++i) {
      const Atom& a = atoms[static_cast<std::size_t>(odometer[static_cast<std::size_t>(i)])];
      prob *= a.prob;
      values[static_cast<std::size_t>(i)] = &a.value;
    }
    visit(prob, values);

    int pos = n - 1;
    while (pos >= 0) {
      auto& digit = odometer[static_cast<std::size_t>(pos)];
      if (++digit < static_cast<int>(atoms.size())) break;
      digit = 0;
      --pos;
    }
    if (pos < 0) break;
  }
}

void enumerate_product_support(
    const std::vector<DiscreteMatrixDist>& dists,
    const std::function<void(double, const std::vector<const SymMatrix*>&)>& visit,
    std::size_t cap) {
  const std::size_t n = dists.size();
  std::size_t count = 1;
  for (const DiscreteMatrixDist& d : dists) {
    count *= d.atoms().size();
    if (count > cap) {
      std::ostringstream os;
      os << "enumerate_product_support: " << count << "+ combinations exceeds cap " << cap;
      throw std::length_error(os.str());
    }
  }

  std::vector<int> odometer(n, 0);
  std::vector<const SymMatrix*> values(n);
  while (true) {
    double prob = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Atom& a = dists[i].atoms()[static_cast<std::size_t>(odometer[i])];
      prob *= a.prob;
      values[i] = &a.value;
    }
    visit(prob, values);

    int pos = static_cast<int>(n) - 1;
    while (pos >= 0) {
      auto& digit = odometer[static_cast<std::size_t>(pos)];
      if (++digit < static_cast<int>(dists[static_cast<std::size_t>(pos)].atoms().size())) break;
      digit = 0;
      --pos;
    }
    if (pos < 0) break;
  }
}

}  // namespace mineig
