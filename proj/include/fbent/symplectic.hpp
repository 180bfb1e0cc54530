// Phase-space kinematics of Gaussian states: symplectic form, covariance
// matrices, partial transposition and logarithmic negativity.
//
// Quadratures are ordered (q1, p1, ..., qN, pN); the vacuum covariance
// matrix is the identity.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fbent/linalg.hpp"

namespace fbent {

class UnphysicalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotPositiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The 2N x 2N symplectic form, block diagonal in [[0, 1], [-1, 0]].
class SymplecticForm {
 public:
  explicit SymplecticForm(std::size_t n_modes);

  std::size_t n_modes() const noexcept { return n_; }
  const Matrix& matrix() const& noexcept { return m_; }
  Matrix matrix() && { return std::move(m_); }
  operator const Matrix&() const noexcept { return m_; }

 private:
  std::size_t n_;
  Matrix m_;
};

SymplecticForm omega(std::size_t n_modes);

/// Covariance matrix of an N-mode Gaussian state. Holds only the symmetric
/// 2N x 2N data; physicality is checked separately by check_physical.
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(SymMatrix sigma);
  explicit CovarianceMatrix(const Matrix& sigma) : CovarianceMatrix(SymMatrix(sigma)) {}

  static CovarianceMatrix vacuum(std::size_t n_modes);

  std::size_t n_modes() const noexcept { return sigma_.dim() / 2; }
  const SymMatrix& sigma() const noexcept { return sigma_; }
  const Matrix& matrix() const& noexcept { return sigma_.matrix(); }
  Matrix matrix() && { return std::move(sigma_).matrix(); }

 private:
  SymMatrix sigma_;
};

struct MeanVector {
  std::vector<double> values;
};

/// Split of N modes into two non-empty parties. Mode indices are zero-based.
class Bipartition {
 public:
  Bipartition(std::size_t n_modes, std::vector<std::size_t> party_a);

  /// First m modes versus the remaining N - m.
  static Bipartition leading(std::size_t m, std::size_t n_modes);
  /// Parses "m:n" as the leading split of m + n modes.
  static Bipartition parse(const std::string& text);

  std::size_t n_modes() const noexcept { return n_; }
  const std::vector<std::size_t>& party_a() const noexcept { return a_; }
  const std::vector<std::size_t>& party_b() const noexcept { return b_; }
  std::size_t size_a() const noexcept { return a_.size(); }
  std::size_t size_b() const noexcept { return b_.size(); }
  std::string label() const;

 private:
  std::size_t n_;
  std::vector<std::size_t> a_;
  std::vector<std::size_t> b_;
};

/// Diagonal reflection implementing partial transposition of party B:
/// -1 on the p rows of party B, +1 elsewhere.
Matrix pt_flip(const Bipartition& split);

/// Ascending symplectic eigenvalues (one per mode). Throws NotPositiveError
/// if sigma is not positive definite.
std::vector<double> symplectic_spectrum(const CovarianceMatrix& cm);

/// Symplectic spectrum of the partially transposed state P sigma P.
std::vector<double> pt_symplectic_spectrum(const CovarianceMatrix& cm, const Bipartition& split);

/// Smallest partially transposed symplectic eigenvalue.
double pt_min_symplectic(const CovarianceMatrix& cm, const Bipartition& split);

enum class NegativityForm {
  kSmallest,  // max(0, -log2 of the smallest PT symplectic eigenvalue)
  kSum,       // sum of -log2 over every PT symplectic eigenvalue below 1
};

/// Logarithmic negativity in ebits. With kSmallest a warning is written to
/// std::clog when more than one PT symplectic eigenvalue lies below 1.
double log_negativity(const CovarianceMatrix& cm, const Bipartition& split,
                      NegativityForm form = NegativityForm::kSmallest);

/// exp(Omega K) for a random symmetric K with spectral norm `magnitude`.
Matrix random_symplectic(std::size_t n_modes, std::uint64_t seed, double magnitude = 2.0);

/// S^T diag(nu1, nu1, ..., nuN, nuN) S for a random symplectic S.
CovarianceMatrix random_cm(std::size_t n_modes, std::uint64_t seed,
                           const std::vector<double>& symplectic_eigs, double magnitude = 2.0);

/// Embeds per-party matrices acting on (q, p) pairs of each party's modes
/// into the full mode ordering.
Matrix local_embedding(const Bipartition& split, const Matrix& on_a, const Matrix& on_b);

struct PhysicalityReport {
  bool physical = false;
  double min_embedding_eig = 0.0;     // of [[sigma, -Omega], [Omega, sigma]]
  double min_symplectic_minus_one = 0.0;
};

/// sigma + i Omega >= 0 tested through its real 4N x 4N embedding.
PhysicalityReport check_physical(const CovarianceMatrix& cm, double tolerance = tol::psd);

struct InequalityReport {
  bool holds = false;
  double value = 0.0;  // worst-case quantity compared against the threshold
};

/// lambda_up[k] * lambda_down[k] >= 1 for every k; value is the minimum product.
InequalityReport poincare_check(const CovarianceMatrix& cm, double tolerance = 1e-9);

/// nu_pt_min^2 >= lambda_up[0] * lambda_up[1]; value is the difference.
InequalityReport pt_spectrum_check(const CovarianceMatrix& cm, const Bipartition& split,
                             double tolerance = 1e-9);

}  // namespace fbent
