#include "fbent/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

namespace fbent {

SymplecticForm::SymplecticForm(std::size_t n_modes) : n_(n_modes), m_(2 * n_modes, 2 * n_modes) {
  if (n_modes == 0) throw std::invalid_argument("omega: need at least one mode");
  for (std::size_t k = 0; k < n_modes; ++k) {
    m_(2 * k, 2 * k + 1) = 1.0;
    m_(2 * k + 1, 2 * k) = -1.0;
  }
}

SymplecticForm omega(std::size_t n_modes) { return SymplecticForm(n_modes); }

CovarianceMatrix::CovarianceMatrix(SymMatrix sigma) : sigma_(std::move(sigma)) {
  if (sigma_.dim() == 0 || sigma_.dim() % 2 != 0)
    throw ShapeError("CovarianceMatrix: dimension must be even and positive");
  if (!sigma_.matrix().all_finite()) throw NonFiniteError("CovarianceMatrix: non-finite entry");
}

CovarianceMatrix CovarianceMatrix::vacuum(std::size_t n_modes) {
  return CovarianceMatrix(SymMatrix::identity(2 * n_modes));
}

// ---------------------------------------------------------------------------

Bipartition::Bipartition(std::size_t n_modes, std::vector<std::size_t> party_a)
    : n_(n_modes), a_(std::move(party_a)) {
  std::sort(a_.begin(), a_.end());
  if (std::adjacent_find(a_.begin(), a_.end()) != a_.end())
    throw std::invalid_argument("Bipartition: repeated mode index");
  if (!a_.empty() && a_.back() >= n_)
    throw std::invalid_argument("Bipartition: mode index out of range");
  for (std::size_t k = 0; k < n_; ++k)
    if (!std::binary_search(a_.begin(), a_.end(), k)) b_.push_back(k);
  if (a_.empty() || b_.empty()) throw std::invalid_argument("Bipartition: both parties must be non-empty");
}

Bipartition Bipartition::leading(std::size_t m, std::size_t n_modes) {
  std::vector<std::size_t> a(m);
  for (std::size_t k = 0; k < m; ++k) a[k] = k;
  return Bipartition(n_modes, std::move(a));
}

Bipartition Bipartition::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("bipartition must look like m:n, got '" + text + "'");
  std::size_t m = 0, n = 0;
  try {
    std::size_t used = 0;
    m = std::stoul(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("");
    const auto rest = text.substr(colon + 1);
    n = std::stoul(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw std::invalid_argument("bipartition must look like m:n, got '" + text + "'");
  }
  return leading(m, m + n);
}

std::string Bipartition::label() const {
  std::ostringstream os;
  os << a_.size() << ":" << b_.size();
  return os.str();
}

Matrix pt_flip(const Bipartition& split) {
  Matrix p = Matrix::identity(2 * split.n_modes());
  for (std::size_t k : split.party_b()) p(2 * k + 1, 2 * k + 1) = -1.0;
  return p;
}

// ---------------------------------------------------------------------------

std::vector<double> symplectic_spectrum(const CovarianceMatrix& cm) {
  const SymMatrix& sigma = cm.sigma();
  const double lo = min_eig_sym(sigma);
  if (!(lo > 0.0)) {
    std::ostringstream os;
    os << "symplectic_spectrum: covariance matrix not positive definite (min eigenvalue " << lo << ")";
    throw NotPositiveError(os.str());
  }
  const Matrix om = omega(cm.n_modes()).matrix();
  const Matrix root = sqrtm_psd(sigma).matrix();
  const SymMatrix m(root * om.transpose() * sigma.matrix() * om * root);
  const auto ev = sym_eigvals(m);

  std::vector<double> nu;
  nu.reserve(ev.size() / 2);
  for (std::size_t k = 0; k + 1 < ev.size(); k += 2) {
    const double gap = std::abs(ev[k + 1] - ev[k]);
    if (gap > 1e-6 * std::max(std::abs(ev[k + 1]), 1e-12)) {
      std::ostringstream os;
      os << "symplectic_spectrum: eigenvalue pair " << ev[k] << ", " << ev[k + 1]
         << " not degenerate";
      throw LinalgError(os.str());
    }
    nu.push_back(std::sqrt(std::max(0.0, 0.5 * (ev[k] + ev[k + 1]))));
  }
  return nu;
}

std::vector<double> pt_symplectic_spectrum(const CovarianceMatrix& cm, const Bipartition& split) {
  if (split.n_modes() != cm.n_modes()) throw ShapeError("bipartition does not match covariance matrix");
  const Matrix p = pt_flip(split);
  return symplectic_spectrum(CovarianceMatrix(p * cm.matrix() * p));
}

double pt_min_symplectic(const CovarianceMatrix& cm, const Bipartition& split) {
  return pt_symplectic_spectrum(cm, split).front();
}

double log_negativity(const CovarianceMatrix& cm, const Bipartition& split, NegativityForm form) {
  const auto nu = pt_symplectic_spectrum(cm, split);
  if (form == NegativityForm::kSum) {
    double e = 0.0;
    for (double v : nu)
      if (v < 1.0) e -= std::log2(v);
    return std::max(0.0, e);
  }
  const auto below = std::count_if(nu.begin(), nu.end(), [](double v) { return v < 1.0 - 1e-12; });
  if (below > 1) {
    std::clog << "warning: " << below << " partially transposed symplectic eigenvalues below 1 across "
              << split.label() << "; the single-eigenvalue negativity underestimates the sum form\n";
  }
  return std::max(0.0, -std::log2(nu.front()));
}

// ---------------------------------------------------------------------------

Matrix random_symplectic(std::size_t n_modes, std::uint64_t seed, double magnitude) {
  const std::size_t d = 2 * n_modes;
  if (magnitude == 0.0) return Matrix::identity(d);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  SymMatrix k(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) k.set(i, j, gauss(rng));
  const auto ev = sym_eigvals(k);
  const double norm = std::max(std::abs(ev.front()), std::abs(ev.back()));
  return expm(omega(n_modes).matrix() * k.matrix() * (magnitude / norm));
}

CovarianceMatrix random_cm(std::size_t n_modes, std::uint64_t seed,
                           const std::vector<double>& symplectic_eigs, double magnitude) {
  if (symplectic_eigs.size() != n_modes)
    throw std::invalid_argument("random_cm: need one symplectic eigenvalue per mode");
  std::vector<double> d;
  for (double nu : symplectic_eigs) {
    if (!(nu >= 1.0)) {
      std::ostringstream os;
      os << "random_cm: symplectic eigenvalue " << nu << " < 1 is unphysical";
      throw UnphysicalError(os.str());
    }
    d.push_back(nu);
    d.push_back(nu);
  }
  const Matrix s = random_symplectic(n_modes, seed, magnitude);
  return CovarianceMatrix(s.transpose() * Matrix::diag(d) * s);
}

Matrix local_embedding(const Bipartition& split, const Matrix& on_a, const Matrix& on_b) {
  const auto& a = split.party_a();
  const auto& b = split.party_b();
  if (on_a.rows() != 2 * a.size() || !on_a.square() || on_b.rows() != 2 * b.size() || !on_b.square())
    throw ShapeError("local_embedding: block sizes do not match the bipartition");
  Matrix out(2 * split.n_modes(), 2 * split.n_modes());
  auto place = [&out](const std::vector<std::size_t>& modes, const Matrix& blk) {
    for (std::size_t i = 0; i < modes.size(); ++i)
      for (std::size_t j = 0; j < modes.size(); ++j)
        for (std::size_t s = 0; s < 2; ++s)
          for (std::size_t t = 0; t < 2; ++t)
            out(2 * modes[i] + s, 2 * modes[j] + t) = blk(2 * i + s, 2 * j + t);
  };
  place(a, on_a);
  place(b, on_b);
  return out;
}

// ---------------------------------------------------------------------------

PhysicalityReport check_physical(const CovarianceMatrix& cm, double tolerance) {
  const std::size_t d = cm.sigma().dim();
  const Matrix om = omega(cm.n_modes()).matrix();
  Matrix emb(2 * d, 2 * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      emb(i, j) = cm.matrix()(i, j);
      emb(d + i, d + j) = cm.matrix()(i, j);
      emb(i, d + j) = -om(i, j);
      emb(d + i, j) = om(i, j);
    }
  PhysicalityReport r;
  r.min_embedding_eig = min_eig_sym(SymMatrix(emb));
  try {
    r.min_symplectic_minus_one = symplectic_spectrum(cm).front() - 1.0;
  } catch (const NotPositiveError&) {
    r.min_symplectic_minus_one = -1.0;
  }
  r.physical = r.min_embedding_eig >= -tolerance;
  return r;
}

InequalityReport poincare_check(const CovarianceMatrix& cm, double tolerance) {
  const auto lam = sym_eigvals(cm.sigma());
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < lam.size(); ++k) worst = std::min(worst, lam[k] * lam[lam.size() - 1 - k]);
  return {worst >= 1.0 - tolerance, worst};
}

InequalityReport pt_spectrum_check(const CovarianceMatrix& cm, const Bipartition& split, double tolerance) {
  const auto lam = sym_eigvals(cm.sigma());
  const double nu = pt_min_symplectic(cm, split);
  const double diff = nu * nu - lam[0] * lam[1];
  return {diff >= -tolerance, diff};
}

}  // namespace fbent
