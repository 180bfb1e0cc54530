#include "fbent/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fbent {

HamiltonianMatrix::HamiltonianMatrix(const Matrix& h) {
  if (!h.square() || h.rows() % 2 != 0) throw ShapeError("HamiltonianMatrix: must be 2N x 2N");
  const double scale = std::max(h.max_abs(), 1.0);
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = i + 1; j < h.cols(); ++j)
      if (std::abs(h(i, j) - h(j, i)) > 1e-12 * scale)
        throw std::invalid_argument("HamiltonianMatrix: matrix is not symmetric");
  h_ = SymMatrix(h);
}

StabilityReport is_stable(const Matrix& a) {
  if (!a.square()) throw ShapeError("is_stable: drift must be square");
  const double margin = sym_eigvals(SymMatrix(a + a.transpose())).back();
  return {margin < 0.0, margin};
}

DriftMatrix::DriftMatrix(Matrix a) : a_(std::move(a)), stability_(is_stable(a_)) {}

DriftMatrix drift_from_hamiltonian(const HamiltonianMatrix& h) {
  const std::size_t d = h.matrix().rows();
  return DriftMatrix((omega(h.n_modes()).matrix() * h.matrix() - Matrix::identity(d)) * 0.5);
}

CovarianceMatrix steady_state_cm(const Matrix& a) {
  return steady_state_cm(a, SymMatrix::identity(a.rows()));
}

CovarianceMatrix steady_state_cm(const Matrix& a, const SymMatrix& diffusion) {
  const auto st = is_stable(a);
  if (!st.stable) {
    std::ostringstream os;
    os << "steady_state_cm: drift is not stable, max eigenvalue of A + A^T is " << st.margin;
    throw UnstableError(os.str(), st.margin);
  }
  return CovarianceMatrix(solve_lyapunov(a, diffusion));
}

double default_horizon(const Matrix& a) { return 20.0 / std::abs(is_stable(a).margin); }

namespace {

Matrix lyapunov_rhs(const Matrix& a, const Matrix& at, const Matrix& d, const Matrix& s) {
  return a * s + s * at + d;
}

void check_step(double t_final, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (!(t_final >= 0.0)) throw std::invalid_argument("final time must be non-negative");
}

}  // namespace

CmTrajectory evolve_cm(const Matrix& a, const CovarianceMatrix& sigma0, double t_final, double dt,
                       std::size_t record_every) {
  return evolve_cm(a, SymMatrix::identity(a.rows()), sigma0, t_final, dt, record_every);
}

CmTrajectory evolve_cm(const Matrix& a, const SymMatrix& diffusion, const CovarianceMatrix& sigma0,
                       double t_final, double dt, std::size_t record_every) {
  check_step(t_final, dt);
  if (a.rows() != sigma0.sigma().dim()) throw ShapeError("evolve_cm: drift and state dimensions differ");
  const Matrix at = a.transpose();
  const Matrix& d = diffusion.matrix();
  const auto steps = static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
  const double h = steps ? t_final / static_cast<double>(steps) : 0.0;
  record_every = std::max<std::size_t>(record_every, 1);

  CmTrajectory out;
  out.times.push_back(0.0);
  out.states.push_back(sigma0);
  Matrix s = sigma0.matrix();
  for (std::size_t k = 1; k <= steps; ++k) {
    const Matrix k1 = lyapunov_rhs(a, at, d, s);
    const Matrix k2 = lyapunov_rhs(a, at, d, s + k1 * (0.5 * h));
    const Matrix k3 = lyapunov_rhs(a, at, d, s + k2 * (0.5 * h));
    const Matrix k4 = lyapunov_rhs(a, at, d, s + k3 * h);
    s += (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0);
    s = SymMatrix(s).matrix();
    if (k % record_every == 0 || k == steps) {
      out.times.push_back(h * static_cast<double>(k));
      out.states.emplace_back(s);
    }
  }
  return out;
}

MeanTrajectory evolve_mean(const Matrix& a, const Matrix& b, const DriveFn& u, const MeanVector& x0,
                           double t_final, double dt, std::size_t record_every) {
  check_step(t_final, dt);
  const std::size_t d = a.rows();
  if (x0.values.size() != d || b.rows() != d) throw ShapeError("evolve_mean: dimension mismatch");
  const auto steps = static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
  const double h = steps ? t_final / static_cast<double>(steps) : 0.0;
  record_every = std::max<std::size_t>(record_every, 1);

  auto rhs = [&](double t, const std::vector<double>& x) {
    const auto in = u(t);
    if (in.size() != b.cols()) throw ShapeError("evolve_mean: drive has wrong length");
    std::vector<double> dx(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) dx[i] += a(i, j) * x[j];
      for (std::size_t j = 0; j < b.cols(); ++j) dx[i] += b(i, j) * in[j];
    }
    return dx;
  };
  auto axpy = [](const std::vector<double>& x, const std::vector<double>& y, double s) {
    std::vector<double> r(x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += s * y[i];
    return r;
  };

  MeanTrajectory out;
  out.times.push_back(0.0);
  out.states.push_back(x0);
  std::vector<double> x = x0.values;
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t = h * static_cast<double>(k - 1);
    const auto k1 = rhs(t, x);
    const auto k2 = rhs(t + 0.5 * h, axpy(x, k1, 0.5 * h));
    const auto k3 = rhs(t + 0.5 * h, axpy(x, k2, 0.5 * h));
    const auto k4 = rhs(t + h, axpy(x, k3, h));
    for (std::size_t i = 0; i < d; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (k % record_every == 0 || k == steps) {
      out.times.push_back(h * static_cast<double>(k));
      out.states.push_back({x});
    }
  }
  return out;
}

ModifiedDynamics modified_dynamics(const Matrix& a, const Matrix& m, const Matrix& c) {
  if (!a.square() || m.rows() != a.rows() || c.cols() != a.cols() || m.cols() != c.rows())
    throw ShapeError("modified_dynamics: shapes of A, M = BF and C are not conformable");
  const Matrix mc = m * c;
  Matrix d = Matrix::identity(a.rows()) - mc.transpose() - mc + 2.0 * (m * m.transpose());
  return {a + mc, SymMatrix(d)};
}

}  // namespace fbent
