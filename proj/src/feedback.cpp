#include "fbent/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace fbent {

UnravellingMatrix::UnravellingMatrix(SymMatrix u, double tolerance) : u_(std::move(u)) {
  if (u_.dim() == 0 || u_.dim() % 2 != 0)
    throw ShapeError("UnravellingMatrix: dimension must be even and positive");
  const double lo = min_eig_sym(u_);
  if (lo < -tolerance * std::max(1.0, u_.matrix().max_abs())) {
    std::ostringstream os;
    os << "unravelling matrix is not positive semi-definite (min eigenvalue " << lo << ")";
    throw InvalidUnravellingError(os.str(), lo);
  }
}

UnravellingMatrix unravelling_from_upsilon(const UpsilonMatrix& upsilon) {
  const std::size_t n = upsilon.re.rows();
  if (!upsilon.re.square() || upsilon.im.rows() != n || !upsilon.im.square())
    throw ShapeError("unravelling_from_upsilon: Re and Im must both be N x N");
  for (const Matrix* part : {&upsilon.re, &upsilon.im}) {
    const double scale = std::max(1.0, part->max_abs());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (std::abs((*part)(i, j) - (*part)(j, i)) > 1e-12 * scale)
          throw InvalidUnravellingError("unravelling matrix would not be symmetric: "
                                        "Re and Im of Upsilon must be symmetric",
                                        std::numeric_limits<double>::quiet_NaN());
  }
  Matrix u(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double id = i == j ? 1.0 : 0.0;
      u(i, j) = 0.5 * (id + upsilon.re(i, j));
      u(n + i, n + j) = 0.5 * (id - upsilon.re(i, j));
      u(i, n + j) = 0.5 * upsilon.im(i, j);
      u(n + i, j) = 0.5 * upsilon.im(i, j);
    }
  return UnravellingMatrix(SymMatrix(u));
}

Matrix cbar(std::size_t n_modes) {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix c(2 * n_modes, 2 * n_modes);
  for (std::size_t j = 0; j < n_modes; ++j) {
    c(j, 2 * j) = s;
    c(n_modes + j, 2 * j + 1) = s;
  }
  return c;
}

Matrix measurement_matrix(const UnravellingMatrix& u) {
  return 2.0 * (sqrtm_psd(u.sym()).matrix() * cbar(u.n_modes()));
}

StabilisingReport is_stabilising_solution(const CovarianceMatrix& sigma, const Matrix& a,
                                          double tolerance) {
  const Matrix& s = sigma.matrix();
  if (a.rows() != s.rows() || !a.square())
    throw ShapeError("is_stabilising_solution: drift and covariance dimensions differ");
  StabilisingReport r;
  r.riccati_margin = min_eig_sym(SymMatrix(a * s + s * a.transpose() + Matrix::identity(s.rows())));
  r.physical_margin = check_physical(sigma).min_embedding_eig;
  r.accepted = r.riccati_margin >= -tolerance && r.physical_margin >= -tolerance;
  return r;
}

BoundReport entanglement_bound(const Matrix& a) {
  const auto st = is_stable(a);
  if (!st.stable) {
    std::ostringstream os;
    os << "entanglement_bound: drift is not stable (max eigenvalue of A + A^T is " << st.margin << ")";
    throw UnstableError(os.str(), st.margin);
  }
  if (a.rows() < 2) throw ShapeError("entanglement_bound: need at least two quadratures");
  const auto alpha = sym_eigvals(SymMatrix(-(a + a.transpose())));
  BoundReport r;
  r.alpha1 = alpha[0];
  r.alpha2 = alpha[1];
  r.nu_sq_bound = alpha[0] * alpha[1];
  r.en_bound = std::max(0.0, -0.5 * std::log2(r.nu_sq_bound));
  return r;
}

UnravellingMatrix optimal_unravelling(const Matrix& a, const CovarianceMatrix& sigma) {
  const Matrix& s = sigma.matrix();
  const std::size_t d = s.rows();
  const Matrix cb = cbar(d / 2);
  const Matrix e = 2.0 * (cb * s) - cb;
  const Matrix riccati = a * s + s * a.transpose() + Matrix::identity(d);
  return UnravellingMatrix(SymMatrix(e * riccati * e.transpose()));
}

// ---------------------------------------------------------------------------

DriftMatrix random_stable_drift(std::size_t n_modes, std::uint64_t seed) {
  const std::size_t d = 2 * n_modes;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> strength_dist(0.05, 0.98);
  SymMatrix h(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) h.set(i, j, gauss(rng));
  const double strength = strength_dist(rng);

  // A + A^T + 1 = (Omega H - H Omega) / 2, linear in H.
  const Matrix om = omega(n_modes).matrix();
  const Matrix g = (om * h.matrix() - h.matrix() * om) * 0.5;
  const double top = sym_eigvals(SymMatrix(g)).back();
  Matrix scaled = h.matrix();
  if (top > 0.0) scaled *= strength / top;
  return drift_from_hamiltonian(HamiltonianMatrix(SymMatrix(scaled)));
}

CovarianceMatrix random_stabilising_solution(const Matrix& a, std::uint64_t seed) {
  const std::size_t d = a.rows();
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> gauss;
  std::uniform_int_distribution<std::size_t> rank_dist(1, d);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const std::size_t rank = rank_dist(rng);
  Matrix g(d, rank);
  for (double& v : g.data()) v = gauss(rng);
  // sigma(t) = sigma_free - t X with A X + X A^T = -Q keeps
  // A sigma + sigma A^T + 1 = t Q >= 0 for every t >= 0.
  const SymMatrix x = solve_lyapunov(a, SymMatrix(g * g.transpose()));
  const Matrix free = steady_state_cm(a).matrix();
  auto at = [&](double t) { return CovarianceMatrix(free - t * x.matrix()); };
  auto physical = [&](double t) { return check_physical(at(t), 0.0).physical; };

  double lo = 0.0;
  double hi = 1.0;
  for (int k = 0; k < 200 && physical(hi); ++k) {
    lo = hi;
    hi *= 2.0;
  }
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (lo + hi);
    (physical(mid) ? lo : hi) = mid;
  }
  const double t = unit(rng) < 0.5 ? lo : lo * unit(rng);
  return at(t);
}

BoundSample sample_bound_check(std::uint64_t seed, std::size_t n_modes) {
  BoundSample s;
  s.seed = seed;
  s.n_modes = n_modes;
  try {
    const DriftMatrix a = random_stable_drift(n_modes, seed);
    const CovarianceMatrix sigma = random_stabilising_solution(a, seed);
    s.accepted = is_stabilising_solution(sigma, a).accepted;
    const BoundReport bound = entanglement_bound(a);
    s.alpha_product = bound.nu_sq_bound;

    const auto lam = sym_eigvals(sigma.sigma());
    const std::size_t d = lam.size();
    s.pair_product_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < d; ++k) s.pair_product_min = std::min(s.pair_product_min, lam[k] * lam[d - 1 - k]);
    s.top_pair_slack = 1.0 / bound.nu_sq_bound - lam[d - 1] * lam[d - 2];

    s.bound_slack = std::numeric_limits<double>::infinity();
    s.pt_spectrum_slack = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n_modes; ++k) {
      const Bipartition split(n_modes, {k});
      const double nu = pt_min_symplectic(sigma, split);
      s.bound_slack = std::min(s.bound_slack, nu * nu - bound.nu_sq_bound);
      s.pt_spectrum_slack = std::min(s.pt_spectrum_slack, nu * nu - lam[0] * lam[1]);
    }
  } catch (const std::exception& e) {
    s.error = e.what();
  }
  return s;
}

namespace {

std::size_t modes_for(std::size_t i, std::size_t max_modes) {
  return 2 + i % (std::max<std::size_t>(max_modes, 2) - 1);
}

}  // namespace

std::vector<BoundSample> bound_check_batch(std::uint64_t first_seed, std::size_t count,
                                           std::size_t max_modes) {
  std::vector<BoundSample> out(count);
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = sample_bound_check(first_seed + k, modes_for(k, max_modes));
  }
  return out;
}

std::vector<BoundSample> bound_check_batch_serial(std::uint64_t first_seed, std::size_t count,
                                                  std::size_t max_modes) {
  std::vector<BoundSample> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k)
    out.push_back(sample_bound_check(first_seed + k, modes_for(k, max_modes)));
  return out;
}

}  // namespace fbent
