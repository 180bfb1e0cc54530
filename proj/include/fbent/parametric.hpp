// All-to-all parametric interactions between N lossy modes: free and
// feedback-optimal steady-state entanglement, and local direct feedback.
#pragma once

#include <string>
#include <vector>

#include "fbent/dynamics.hpp"
#include "fbent/feedback.hpp"
#include "fbent/symplectic.hpp"

namespace fbent {

class ConstructionFailedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnstableLoopError : public UnstableError {
 public:
  using UnstableError::UnstableError;
};

struct ParametricModel {
  std::size_t m = 1;  // modes in party A
  std::size_t n = 1;  // modes in party B
  double chi = 0.0;   // interaction strength over loss rate

  std::size_t n_modes() const noexcept { return m + n; }
  /// chi must stay below 1 / (2 (N - 1)).
  double threshold() const noexcept { return 1.0 / (2.0 * static_cast<double>(n_modes() - 1)); }
  bool stable() const noexcept { return chi < threshold(); }
};

/// Throws UnstableError naming the threshold if chi >= 1 / (2 (N - 1)).
void require_below_threshold(std::size_t n_modes, double chi);

/// Quadratic Hamiltonian chi (q_j p_k + p_j q_k) summed over mode pairs,
/// normalized so that (Omega H - 1)/2 couples modes with strength chi.
HamiltonianMatrix parametric_hamiltonian(std::size_t n_modes, double chi);

DriftMatrix full_drift(std::size_t n_modes, double chi);

/// 4x4 drift of the symmetric modes of an m:n split, ordering (q1, p1, q2, p2).
DriftMatrix reduced_drift(std::size_t m, std::size_t n, double chi);

/// 1/2 log2[(1 + 2 chi)(1 + 2 (N - 1) chi)], balanced splits.
double free_logneg(std::size_t n_modes, double chi);

/// (1 - 2 chi)(1 - 2 (N - 1) chi).
double parametric_bound_nu_sq(std::size_t n_modes, double chi);
/// -1/2 [log2(1 - 2 chi) + log2(1 - 2 (N - 1) chi)].
double parametric_bound(std::size_t n_modes, double chi);

struct OptimalState {
  CovarianceMatrix sigma;
  double log_negativity = 0.0;
  double riccati_margin = 0.0;
  double physical_margin = 0.0;
  bool attains_bound = false;
};

/// Pure state saturating both stabilising inequalities for a reduced drift
/// whose q and p sectors share eigenvectors. Within each conjugate pair the
/// direction with the less negative drift eigenvalue lambda gets variance
/// -1/(2 lambda), its conjugate the reciprocal. Throws ConstructionFailedError
/// if saturation fails or, for a balanced split, if the bound is not attained.
OptimalState optimal_cm(const Matrix& a_reduced);

/// Direct-feedback loop for a reduced m:n model: homodyne of both p
/// quadratures (U33 = U44 = 1), p2's current drives p1 with mu2 and p1's
/// current drives p2 with mu1, mu2 = mu1 n / m.
struct LocalFeedbackScheme {
  double mu1 = 0.0;
  double mu2 = 0.0;
  UnravellingMatrix unravelling;
  Matrix gain;  // M = B F
};

LocalFeedbackScheme local_scheme(std::size_t m, std::size_t n, double mu1);

struct LocalSteadyState {
  CovarianceMatrix sigma;
  double nu_sq = 0.0;
  double margin = 0.0;  // closed-loop max eigenvalue of A' + A'^T
};

/// Throws UnstableLoopError unless (A' + A'^T) < 0.
LocalSteadyState local_feedback_steady(std::size_t m, std::size_t n, double chi, double mu1);

/// Closed-loop stability margin as a function of mu1 (convex in mu1).
double local_loop_margin(std::size_t m, std::size_t n, double chi, double mu1);

struct LocalOptimum {
  double mu1_star = 0.0;
  double nu_sq_min = 1.0;
  double mu1_lo = 0.0;  // stable interval (mu1_lo, mu1_hi)
  double mu1_hi = 0.0;
};

/// Brackets the stable mu1 interval by bisection on the loop margin, scans
/// it coarsely, then refines the best cell by golden-section search to
/// |d mu1| < mu_tol.
LocalOptimum optimize_local_feedback(std::size_t m, std::size_t n, double chi, double mu_tol = 1e-8);

struct SweepRow {
  double chi = 0.0;
  double nu_free = 0.0;   // squared PT symplectic eigenvalue, no control
  double nu_local = 0.0;  // same, optimized local feedback
  double nu_bound = 0.0;  // alpha1 * alpha2 of the full drift
  double mu1_star = 0.0;
  std::string status = "ok";
};

SweepRow sweep_point(std::size_t m, std::size_t n, double chi);

/// Grid points run concurrently under OpenMP; rows come back in grid order.
std::vector<SweepRow> sweep_chi(std::size_t m, std::size_t n, const std::vector<double>& chi_grid);
/// Sequential reference for sweep_chi.
std::vector<SweepRow> sweep_chi_serial(std::size_t m, std::size_t n, const std::vector<double>& chi_grid);

/// `steps` evenly spaced values from start to stop inclusive.
std::vector<double> linspace(double start, double stop, std::size_t steps);

}  // namespace fbent
