// Open-system Gaussian dynamics under quadratic Hamiltonians and pure losses.
// Time is measured in units of the loss rate, so the damping part of the
// drift is -1/2.
#pragma once

#include <functional>
#include <vector>

#include "fbent/linalg.hpp"
#include "fbent/symplectic.hpp"

namespace fbent {

class UnstableError : public std::runtime_error {
 public:
  UnstableError(const std::string& what, double margin) : std::runtime_error(what), margin_(margin) {}
  double margin() const noexcept { return margin_; }

 private:
  double margin_;
};

class HamiltonianMatrix {
 public:
  /// Rejects input whose asymmetry exceeds 1e-12 relative to its largest entry.
  explicit HamiltonianMatrix(const Matrix& h);
  explicit HamiltonianMatrix(SymMatrix h) : h_(std::move(h)) {}

  std::size_t n_modes() const noexcept { return h_.dim() / 2; }
  const SymMatrix& sym() const noexcept { return h_; }
  const Matrix& matrix() const noexcept { return h_.matrix(); }

 private:
  SymMatrix h_;
};

struct StabilityReport {
  bool stable = false;
  double margin = 0.0;  // largest eigenvalue of A + A^T
};

StabilityReport is_stable(const Matrix& a);

class DriftMatrix {
 public:
  explicit DriftMatrix(Matrix a);

  const Matrix& matrix() const& noexcept { return a_; }
  Matrix matrix() && { return std::move(a_); }
  operator const Matrix&() const noexcept { return a_; }
  std::size_t dim() const noexcept { return a_.rows(); }
  const StabilityReport& stability() const noexcept { return stability_; }

 private:
  Matrix a_;
  StabilityReport stability_;
};

/// A = (Omega H - 1) / 2.
DriftMatrix drift_from_hamiltonian(const HamiltonianMatrix& h);

/// Solution of A sigma + sigma A^T + D = 0; D defaults to the identity
/// (pure losses). Throws UnstableError unless (A + A^T) < 0.
CovarianceMatrix steady_state_cm(const Matrix& a);
CovarianceMatrix steady_state_cm(const Matrix& a, const SymMatrix& diffusion);

struct CmTrajectory {
  std::vector<double> times;
  std::vector<CovarianceMatrix> states;
};

/// Fixed-step RK4 on d sigma/dt = A sigma + sigma A^T + D. Stores the
/// initial state, every `record_every`-th step and the final state.
CmTrajectory evolve_cm(const Matrix& a, const CovarianceMatrix& sigma0, double t_final,
                       double dt = 1e-3, std::size_t record_every = 1000);
CmTrajectory evolve_cm(const Matrix& a, const SymMatrix& diffusion, const CovarianceMatrix& sigma0,
                       double t_final, double dt = 1e-3, std::size_t record_every = 1000);

/// Default integration horizon, 20 / |stability margin|.
double default_horizon(const Matrix& a);

using DriveFn = std::function<std::vector<double>(double)>;

struct MeanTrajectory {
  std::vector<double> times;
  std::vector<MeanVector> states;
};

/// RK4 on dx/dt = A x + B u(t).
MeanTrajectory evolve_mean(const Matrix& a, const Matrix& b, const DriveFn& u, const MeanVector& x0,
                           double t_final, double dt = 1e-3, std::size_t record_every = 1000);

struct ModifiedDynamics {
  Matrix drift;         // A + M C
  SymMatrix diffusion;  // 1 - (M C)^T - M C + 2 M M^T
};

/// Closed-loop moments under direct feedback u = F y, with M = B F.
ModifiedDynamics modified_dynamics(const Matrix& a, const Matrix& m, const Matrix& c);

}  // namespace fbent
