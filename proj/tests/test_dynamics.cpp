#include <cmath>

#include "doctest.h"
#include "fbent/dynamics.hpp"
#include "test_util.hpp"

using namespace fbent;
using fbent::testing::max_abs_diff;

namespace {

Matrix two_mode_drift(double chi) {
  return Matrix{{-0.5, 0, chi, 0}, {0, -0.5, 0, -chi}, {chi, 0, -0.5, 0}, {0, -chi, 0, -0.5}};
}

}  // namespace

TEST_CASE("drift of a vanishing Hamiltonian is pure damping") {
  const auto a = drift_from_hamiltonian(HamiltonianMatrix(Matrix(4, 4)));
  CHECK(a.matrix() == Matrix::identity(4) * -0.5);
  CHECK(a.stability().stable);
}

TEST_CASE("two-mode parametric Hamiltonian gives the reduced drift directly") {
  const double chi = 0.3;
  Matrix h(4, 4);
  // q1 p2 and p1 q2 couplings, H entries doubled by the 1/2 x^T H x convention.
  h(0, 3) = h(3, 0) = 2 * chi;
  h(1, 2) = h(2, 1) = 2 * chi;
  const auto a = drift_from_hamiltonian(HamiltonianMatrix(h));
  CHECK(max_abs_diff(a.matrix(), two_mode_drift(chi)) < 1e-15);
}

TEST_CASE("harmonic Hamiltonian rotates and damps") {
  const double w = 1.7;
  const auto a = drift_from_hamiltonian(HamiltonianMatrix(Matrix::identity(2) * w)).matrix();
  // (A + 1/2)^2 = -(w/2)^2: eigenvalues -1/2 +- i w/2.
  const Matrix shifted = a + Matrix::identity(2) * 0.5;
  CHECK(max_abs_diff(shifted * shifted, Matrix::identity(2) * (-w * w / 4)) < 1e-14);
  CHECK(a.trace() == doctest::Approx(-1.0));
}

TEST_CASE("asymmetric Hamiltonian is rejected") {
  CHECK_THROWS_AS(HamiltonianMatrix(Matrix{{0, 1}, {0, 0}}), std::invalid_argument);
}

TEST_CASE("is_stable margins") {
  const auto damp = is_stable(Matrix::identity(4) * -0.5);
  CHECK(damp.stable);
  CHECK(damp.margin == doctest::Approx(-1.0));
  CHECK_FALSE(is_stable(two_mode_drift(0.5)).stable);
  const auto below = is_stable(two_mode_drift(0.45));
  CHECK(below.stable);
  CHECK(below.margin == doctest::Approx(-(1 - 2 * 0.45)));
}

TEST_CASE("steady states") {
  CHECK(max_abs_diff(steady_state_cm(Matrix::identity(4) * -0.5).matrix(), Matrix::identity(4)) < 1e-14);
  for (double chi : {0.0, 0.1, 0.3, 0.45, 0.49}) {
    const Matrix a = two_mode_drift(chi);
    const auto sigma = steady_state_cm(a);
    CHECK(max_abs_diff(sigma.matrix(), inverse(a) * -0.5) < 1e-9);
    CHECK((a * sigma.matrix() + sigma.matrix() * a.transpose() + Matrix::identity(4)).max_abs() < 1e-9);
    CHECK(check_physical(sigma).physical);
  }
  CHECK_THROWS_AS(steady_state_cm(two_mode_drift(0.5)), UnstableError);
}

TEST_CASE("symmetric stable drifts relax to -A^{-1}/2") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 2 * (1 + seed % 4);
    const SymMatrix s = testing::random_sym(n, seed);
    const Matrix a = s.matrix() - Matrix::identity(n) * (sym_eigvals(s).back() + 0.3);
    CHECK(max_abs_diff(steady_state_cm(a).matrix(), inverse(a) * -0.5) < 1e-9);
  }
}

TEST_CASE("evolve_cm: vacuum is a fixed point of pure damping") {
  const auto traj = evolve_cm(Matrix::identity(4) * -0.5, CovarianceMatrix::vacuum(2), 2.0);
  CHECK(max_abs_diff(traj.states.back().matrix(), Matrix::identity(4)) < 1e-14);
}

TEST_CASE("evolve_cm: thermal state relaxes exponentially") {
  const auto traj = evolve_cm(Matrix::identity(2) * -0.5, CovarianceMatrix(Matrix::identity(2) * 2.0), 3.0, 1e-3, 500);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double expected = 1.0 + std::exp(-traj.times[k]);
    CHECK(traj.states[k].matrix()(0, 0) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(traj.states[k].matrix()(0, 1) == 0.0);
  }
  CHECK(traj.times.back() == doctest::Approx(3.0));
}

TEST_CASE("evolve_cm converges to the two-mode free steady state and stays physical") {
  const Matrix a = two_mode_drift(0.45);
  const auto traj = evolve_cm(a, CovarianceMatrix::vacuum(2), default_horizon(a), 1e-3, 20000);
  CHECK(default_horizon(a) == doctest::Approx(200.0));
  const auto target = steady_state_cm(a);
  CHECK(max_abs_diff(traj.states.back().matrix(), target.matrix()) < 1e-6);
  for (const auto& s : traj.states) {
    CHECK(check_physical(s, 1e-9).physical);
    CHECK(s.sigma()(0, 2) == s.sigma()(2, 0));
  }
  CHECK(log_negativity(traj.states.back(), Bipartition(2, {0})) == doctest::Approx(0.93).epsilon(0.005 / 0.93));
}

TEST_CASE("evolve_cm rejects non-positive steps") {
  CHECK_THROWS_AS(evolve_cm(Matrix::identity(2) * -0.5, CovarianceMatrix::vacuum(1), 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(evolve_cm(Matrix::identity(2) * -0.5, CovarianceMatrix::vacuum(1), 1.0, -1e-3),
                  std::invalid_argument);
}

TEST_CASE("evolve_mean") {
  const Matrix a = Matrix::identity(2) * -0.5;
  const Matrix b = Matrix{{1.0}, {0.5}};
  const DriveFn none = [](double) { return std::vector<double>{0.0}; };

  const auto still = evolve_mean(a, b, none, {{0.0, 0.0}}, 1.0);
  CHECK(still.states.back().values == std::vector<double>{0.0, 0.0});

  const auto decay = evolve_mean(a, b, none, {{2.0, -1.0}}, 2.0);
  CHECK(decay.states.back().values[0] == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-10));
  CHECK(decay.states.back().values[1] == doctest::Approx(-std::exp(-1.0)).epsilon(1e-10));

  const DriveFn constant = [](double) { return std::vector<double>{0.3}; };
  const auto driven = evolve_mean(a, b, constant, {{0.0, 0.0}}, 60.0, 1e-2);
  CHECK(driven.states.back().values[0] == doctest::Approx(2 * 1.0 * 0.3).epsilon(1e-10));
  CHECK(driven.states.back().values[1] == doctest::Approx(2 * 0.5 * 0.3).epsilon(1e-10));

  CHECK_THROWS_AS(evolve_mean(a, b, none, {{0.0}}, 1.0), ShapeError);
}

TEST_CASE("modified_dynamics without feedback leaves the model unchanged") {
  const Matrix a = two_mode_drift(0.2);
  const auto md = modified_dynamics(a, Matrix(4, 4), testing::random_matrix(4, 4, 1));
  CHECK(md.drift == a);
  CHECK(md.diffusion.matrix() == Matrix::identity(4));
}

TEST_CASE("modified_dynamics for cross-driven p quadratures") {
  const double mu = 0.37;
  const double r2 = std::sqrt(2.0);
  Matrix m(4, 4), c(4, 4);
  m(1, 3) = mu / r2;
  m(3, 2) = mu / r2;
  c(2, 1) = r2;  // current 3 carries p1
  c(3, 3) = r2;  // current 4 carries p2
  const Matrix a = two_mode_drift(0.2);
  const auto md = modified_dynamics(a, m, c);
  Matrix expected_a = a;
  expected_a(1, 3) += mu;
  expected_a(3, 1) += mu;
  CHECK(max_abs_diff(md.drift, expected_a) < 1e-15);
  const Matrix expected_d{{1, 0, 0, 0}, {0, 1 + mu * mu, 0, -2 * mu}, {0, 0, 1, 0}, {0, -2 * mu, 0, 1 + mu * mu}};
  CHECK(max_abs_diff(md.diffusion.matrix(), expected_d) < 1e-15);
}

TEST_CASE("modified diffusion is symmetric for arbitrary gains") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto md = modified_dynamics(testing::random_matrix(4, 4, seed), testing::random_matrix(4, 3, seed + 1),
                                      testing::random_matrix(3, 4, seed + 2));
    const Matrix& d = md.diffusion.matrix();
    CHECK(d == d.transpose());
  }
  CHECK_THROWS_AS(modified_dynamics(Matrix(4, 4), Matrix(4, 3), Matrix(4, 4)), ShapeError);
}
