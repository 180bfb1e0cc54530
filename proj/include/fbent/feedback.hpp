// Continuous general-dyne monitoring: unravelling matrices, the measurement
// matrix, the stabilising-solution test and the steady-state entanglement
// bound.
#pragma once

#include <cstdint>
#include <vector>

#include "fbent/dynamics.hpp"
#include "fbent/linalg.hpp"
#include "fbent/symplectic.hpp"

namespace fbent {

class InvalidUnravellingError : public std::runtime_error {
 public:
  InvalidUnravellingError(const std::string& what, double min_eig)
      : std::runtime_error(what), min_eig_(min_eig) {}
  double min_eig() const noexcept { return min_eig_; }

 private:
  double min_eig_;
};

/// Complex N x N measurement parameter split into real and imaginary parts.
struct UpsilonMatrix {
  Matrix re;
  Matrix im;
};

/// Symmetric PSD 2N x 2N matrix in (q1..qN, p1..pN) block order.
class UnravellingMatrix {
 public:
  /// Throws InvalidUnravellingError if `u` has an eigenvalue below
  /// -tolerance * max(1, |u|_max).
  explicit UnravellingMatrix(SymMatrix u, double tolerance = 1e-8);

  std::size_t n_modes() const noexcept { return u_.dim() / 2; }
  const SymMatrix& sym() const noexcept { return u_; }
  const Matrix& matrix() const noexcept { return u_.matrix(); }

 private:
  SymMatrix u_;
};

UnravellingMatrix unravelling_from_upsilon(const UpsilonMatrix& upsilon);

/// Row j < N picks q_j / sqrt(2), row N + j picks p_j / sqrt(2).
Matrix cbar(std::size_t n_modes);

/// C = 2 U^{1/2} Cbar.
Matrix measurement_matrix(const UnravellingMatrix& u);

struct StabilisingReport {
  bool accepted = false;
  double riccati_margin = 0.0;   // min eigenvalue of A sigma + sigma A^T + 1
  double physical_margin = 0.0;  // min eigenvalue of the sigma + i Omega embedding
};

/// sigma is a stabilising solution iff A sigma + sigma A^T + 1 >= 0 and
/// sigma + i Omega >= 0.
StabilisingReport is_stabilising_solution(const CovarianceMatrix& sigma, const Matrix& a,
                                          double tolerance = 1e-8);

struct BoundReport {
  double alpha1 = 0.0;  // two smallest eigenvalues of -A - A^T
  double alpha2 = 0.0;
  double nu_sq_bound = 0.0;
  double en_bound = 0.0;  // ebits
};

/// Upper bound on the steady-state log-negativity reachable by feedback,
/// for 1 vs N-1 and bi-symmetric splits. Throws UnstableError.
BoundReport entanglement_bound(const Matrix& a);

/// U = E (A sigma + sigma A^T + 1) E^T with E = 2 Cbar sigma - Cbar.
/// Throws InvalidUnravellingError when the result is not PSD, meaning sigma
/// is not reachable.
UnravellingMatrix optimal_unravelling(const Matrix& a, const CovarianceMatrix& sigma);

// ---------------------------------------------------------------------------
// Sampled verification of the bound.

/// Random H rescaled so that the resulting drift has stability margin
/// -(1 - strength), strength drawn from [0.05, 0.98).
DriftMatrix random_stable_drift(std::size_t n_modes, std::uint64_t seed);

/// A stabilising solution for `a`: the free steady state pushed along a
/// random Lyapunov direction, up to and often onto the physicality boundary.
CovarianceMatrix random_stabilising_solution(const Matrix& a, std::uint64_t seed);

struct BoundSample {
  std::uint64_t seed = 0;
  std::size_t n_modes = 0;
  bool accepted = false;           // candidate passed is_stabilising_solution
  double alpha_product = 0.0;      // alpha1 * alpha2
  double bound_slack = 0.0;        // min over 1:(N-1) splits of nu_pt^2 - alpha1 alpha2
  double pair_product_min = 0.0;   // min_k lambda_up[k] lambda_down[k]
  double top_pair_slack = 0.0;     // 1/(alpha1 alpha2) - lambda_down[0] lambda_down[1]
  double pt_spectrum_slack = 0.0;  // min over splits of nu_pt^2 - lambda_up[0] lambda_up[1]
  std::string error;               // non-empty if the sample could not be built
};

BoundSample sample_bound_check(std::uint64_t seed, std::size_t n_modes);

/// Samples seeds first_seed .. first_seed + count - 1 with mode counts
/// cycling through 2..max_modes. OpenMP-parallel; results in seed order.
std::vector<BoundSample> bound_check_batch(std::uint64_t first_seed, std::size_t count,
                                           std::size_t max_modes);
/// Sequential reference for bound_check_batch.
std::vector<BoundSample> bound_check_batch_serial(std::uint64_t first_seed, std::size_t count,
                                                  std::size_t max_modes);

}  // namespace fbent
