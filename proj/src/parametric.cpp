#include "fbent/parametric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fbent {

void require_below_threshold(std::size_t n_modes, double chi) {
  if (n_modes < 2) throw std::invalid_argument("parametric model needs at least two modes");
  if (!(chi >= 0.0)) throw std::invalid_argument("chi must be non-negative");
  const double threshold = 1.0 / (2.0 * static_cast<double>(n_modes - 1));
  if (!(chi < threshold)) {
    std::ostringstream os;
    os << "parametric model with N = " << n_modes << " is unstable for chi = " << chi
       << ": stability requires chi < 1/(2(N-1)) = " << threshold;
    throw UnstableError(os.str(), 2.0 * static_cast<double>(n_modes - 1) * chi - 1.0);
  }
}

HamiltonianMatrix parametric_hamiltonian(std::size_t n_modes, double chi) {
  if (n_modes < 2) throw std::invalid_argument("parametric_hamiltonian: need at least two modes");
  if (!(chi >= 0.0)) throw std::invalid_argument("parametric_hamiltonian: chi must be non-negative");
  SymMatrix h(2 * n_modes);
  for (std::size_t j = 0; j < n_modes; ++j)
    for (std::size_t k = 0; k < n_modes; ++k)
      if (j != k) h.set(2 * j, 2 * k + 1, 2.0 * chi);
  return HamiltonianMatrix(std::move(h));
}

DriftMatrix full_drift(std::size_t n_modes, double chi) {
  return drift_from_hamiltonian(parametric_hamiltonian(n_modes, chi));
}

DriftMatrix reduced_drift(std::size_t m, std::size_t n, double chi) {
  if (m == 0 || n == 0) throw std::invalid_argument("reduced_drift: both parties need a mode");
  const double dm = static_cast<double>(m);
  const double dn = static_cast<double>(n);
  const double cross = std::sqrt(dm * dn) * chi;
  Matrix a = Matrix::identity(4) * -0.5;
  a(0, 0) += (dm - 1.0) * chi;
  a(1, 1) -= (dm - 1.0) * chi;
  a(2, 2) += (dn - 1.0) * chi;
  a(3, 3) -= (dn - 1.0) * chi;
  a(0, 2) = a(2, 0) = cross;
  a(1, 3) = a(3, 1) = -cross;
  return DriftMatrix(std::move(a));
}

double free_logneg(std::size_t n_modes, double chi) {
  require_below_threshold(n_modes, chi);
  const double big = 2.0 * static_cast<double>(n_modes - 1) * chi;
  return 0.5 * std::log2((1.0 + 2.0 * chi) * (1.0 + big));
}

double parametric_bound_nu_sq(std::size_t n_modes, double chi) {
  require_below_threshold(n_modes, chi);
  return (1.0 - 2.0 * chi) * (1.0 - 2.0 * static_cast<double>(n_modes - 1) * chi);
}

double parametric_bound(std::size_t n_modes, double chi) {
  require_below_threshold(n_modes, chi);
  const double big = 2.0 * static_cast<double>(n_modes - 1) * chi;
  return -0.5 * (std::log2(1.0 - 2.0 * chi) + std::log2(1.0 - big));
}

// ---------------------------------------------------------------------------

OptimalState optimal_cm(const Matrix& a) {
  if (!a.square() || a.rows() % 2 != 0) throw ShapeError("optimal_cm: drift must be 2N x 2N");
  const std::size_t d = a.rows();
  const std::size_t modes = d / 2;
  const double scale = std::max(1.0, a.max_abs());
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      if (std::abs(a(i, j) - a(j, i)) > 1e-12 * scale)
        throw ConstructionFailedError("optimal_cm: drift is not symmetric");
      if ((i + j) % 2 == 1 && std::abs(a(i, j)) > 1e-12 * scale)
        throw ConstructionFailedError("optimal_cm: drift couples q and p quadratures");
    }
  if (!is_stable(a).stable) throw UnstableError("optimal_cm: drift is not stable", is_stable(a).margin);

  Matrix aq(modes, modes), ap(modes, modes);
  for (std::size_t i = 0; i < modes; ++i)
    for (std::size_t j = 0; j < modes; ++j) {
      aq(i, j) = a(2 * i, 2 * j);
      ap(i, j) = a(2 * i + 1, 2 * j + 1);
    }
  const auto eq = sym_eig(SymMatrix(aq));

  Matrix sigma(d, d);
  for (std::size_t k = 0; k < modes; ++k) {
    std::vector<double> u(modes);
    for (std::size_t i = 0; i < modes; ++i) u[i] = eq.vectors(i, k);
    double lambda_p = 0.0;
    for (std::size_t i = 0; i < modes; ++i)
      for (std::size_t j = 0; j < modes; ++j) lambda_p += u[i] * ap(i, j) * u[j];
    for (std::size_t i = 0; i < modes; ++i) {
      double r = -lambda_p * u[i];
      for (std::size_t j = 0; j < modes; ++j) r += ap(i, j) * u[j];
      if (std::abs(r) > 1e-10 * scale)
        throw ConstructionFailedError("optimal_cm: q and p sectors of the drift do not share eigenvectors");
    }
    const double lambda_q = eq.values[k];
    double var_q = 0.0, var_p = 0.0;
    if (lambda_q >= lambda_p) {
      var_q = -0.5 / lambda_q;
      var_p = 1.0 / var_q;
    } else {
      var_p = -0.5 / lambda_p;
      var_q = 1.0 / var_p;
    }
    for (std::size_t i = 0; i < modes; ++i)
      for (std::size_t j = 0; j < modes; ++j) {
        sigma(2 * i, 2 * j) += var_q * u[i] * u[j];
        sigma(2 * i + 1, 2 * j + 1) += var_p * u[i] * u[j];
      }
  }

  OptimalState out{CovarianceMatrix(sigma)};
  const auto report = is_stabilising_solution(out.sigma, a);
  out.riccati_margin = report.riccati_margin;
  out.physical_margin = report.physical_margin;
  auto saturated = [](double v) { return v >= -1e-8 && v <= 1e-6; };
  if (!saturated(out.riccati_margin) || !saturated(out.physical_margin)) {
    std::ostringstream os;
    os << "optimal_cm: construction does not saturate the stabilising inequalities (riccati margin "
       << out.riccati_margin << ", physical margin " << out.physical_margin << ")";
    throw ConstructionFailedError(os.str());
  }
  if (modes < 2) return out;

  // Bound attainment is only guaranteed for the two-mode balanced form.
  const double bound = entanglement_bound(a).en_bound;
  out.log_negativity = log_negativity(out.sigma, Bipartition::leading(1, modes));
  out.attains_bound = std::abs(out.log_negativity - bound) <= 1e-8;
  const bool balanced = modes == 2 && std::abs(aq(0, 0) - aq(1, 1)) <= 1e-12 * scale;
  if (balanced && !out.attains_bound) {
    std::ostringstream os;
    os << "optimal_cm: log-negativity " << out.log_negativity << " misses the bound " << bound;
    throw ConstructionFailedError(os.str());
  }
  return out;
}

// ---------------------------------------------------------------------------

LocalFeedbackScheme local_scheme(std::size_t m, std::size_t n, double mu1) {
  if (m == 0 || n == 0) throw std::invalid_argument("local_scheme: both parties need a mode");
  const double mu2 = mu1 * (static_cast<double>(n) / static_cast<double>(m));
  const double s = 1.0 / std::sqrt(2.0);
  Matrix gain(4, 4);
  gain(1, 3) = mu2 * s;
  gain(3, 2) = mu1 * s;
  return {mu1, mu2, UnravellingMatrix(SymMatrix(Matrix::diag({0.0, 0.0, 1.0, 1.0}))), gain};
}

namespace {

ModifiedDynamics closed_loop(std::size_t m, std::size_t n, double chi, double mu1) {
  const auto scheme = local_scheme(m, n, mu1);
  return modified_dynamics(reduced_drift(m, n, chi), scheme.gain, measurement_matrix(scheme.unravelling));
}

}  // namespace

double local_loop_margin(std::size_t m, std::size_t n, double chi, double mu1) {
  return is_stable(closed_loop(m, n, chi, mu1).drift).margin;
}

LocalSteadyState local_feedback_steady(std::size_t m, std::size_t n, double chi, double mu1) {
  const auto loop = closed_loop(m, n, chi, mu1);
  const auto st = is_stable(loop.drift);
  if (!st.stable) {
    std::ostringstream os;
    os << "local feedback loop unstable at mu1 = " << mu1 << " (max eigenvalue of A' + A'^T is "
       << st.margin << ")";
    throw UnstableLoopError(os.str(), st.margin);
  }
  CovarianceMatrix sigma(solve_lyapunov(loop.drift, loop.diffusion));
  const double nu = pt_min_symplectic(sigma, Bipartition::leading(1, 2));
  return {std::move(sigma), nu * nu, st.margin};
}

LocalOptimum optimize_local_feedback(std::size_t m, std::size_t n, double chi, double mu_tol) {
  require_below_threshold(m + n, chi);
  auto margin = [&](double mu) { return local_loop_margin(m, n, chi, mu); };
  if (!(margin(0.0) < 0.0)) throw UnstableError("optimize_local_feedback: open loop is not stable", margin(0.0));

  // The margin is the top eigenvalue of a symmetric matrix affine in mu1,
  // hence convex: the stable set is a single interval around 0.
  auto boundary = [&](double dir) {
    double inner = 0.0;
    double outer = dir;
    for (int k = 0; margin(outer) < 0.0; ++k) {
      if (k > 60) throw std::runtime_error("optimize_local_feedback: stable region is unbounded");
      inner = outer;
      outer *= 2.0;
    }
    for (int k = 0; k < 200 && std::abs(outer - inner) > 1e-14 * std::max(1.0, std::abs(outer)); ++k) {
      const double mid = 0.5 * (inner + outer);
      (margin(mid) < 0.0 ? inner : outer) = mid;
    }
    return inner;
  };

  LocalOptimum best;
  best.mu1_lo = boundary(-1.0);
  best.mu1_hi = boundary(1.0);

  auto objective = [&](double mu) {
    try {
      return local_feedback_steady(m, n, chi, mu).nu_sq;
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  constexpr std::size_t kCells = 200;
  const double width = best.mu1_hi - best.mu1_lo;
  auto node = [&](std::size_t i) { return best.mu1_lo + width * static_cast<double>(i) / kCells; };
  std::size_t best_i = 0;
  best.nu_sq_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= kCells; ++i) {
    const double v = objective(node(i));
    if (v < best.nu_sq_min) {
      best.nu_sq_min = v;
      best_i = i;
    }
  }
  best.mu1_star = node(best_i);

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = node(best_i == 0 ? 0 : best_i - 1);
  double b = node(std::min(best_i + 1, kCells));
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c), fd = objective(d);
  while (b - a > mu_tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }
  const double mu = 0.5 * (a + b);
  const double f = objective(mu);
  if (f <= best.nu_sq_min) {
    best.mu1_star = mu;
    best.nu_sq_min = f;
  }
  if (!std::isfinite(best.nu_sq_min)) throw std::runtime_error("optimize_local_feedback: no stable steady state found");
  return best;
}

// ---------------------------------------------------------------------------

SweepRow sweep_point(std::size_t m, std::size_t n, double chi) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  SweepRow row{chi, nan, nan, nan, nan, "ok"};
  try {
    require_below_threshold(m + n, chi);
    row.nu_bound = entanglement_bound(full_drift(m + n, chi)).nu_sq_bound;
    const double nu_free = pt_min_symplectic(steady_state_cm(reduced_drift(m, n, chi)), Bipartition::leading(1, 2));
    row.nu_free = nu_free * nu_free;
    const auto opt = optimize_local_feedback(m, n, chi);
    row.nu_local = opt.nu_sq_min;
    row.mu1_star = opt.mu1_star;
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
    std::replace(row.status.begin(), row.status.end(), ',', ';');
    std::replace(row.status.begin(), row.status.end(), '\n', ' ');
  }
  return row;
}

std::vector<SweepRow> sweep_chi(std::size_t m, std::size_t n, const std::vector<double>& chi_grid) {
  std::vector<SweepRow> rows(chi_grid.size());
  const auto count = static_cast<std::ptrdiff_t>(chi_grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    rows[k] = sweep_point(m, n, chi_grid[k]);
  }
  return rows;
}

std::vector<SweepRow> sweep_chi_serial(std::size_t m, std::size_t n, const std::vector<double>& chi_grid) {
  std::vector<SweepRow> rows;
  rows.reserve(chi_grid.size());
  for (double chi : chi_grid) rows.push_back(sweep_point(m, n, chi));
  return rows;
}

std::vector<double> linspace(double start, double stop, std::size_t steps) {
  if (steps == 0) return {};
  if (steps == 1) return {start};
  std::vector<double> out(steps);
  for (std::size_t i = 0; i < steps; ++i)
    out[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(steps - 1);
  out.back() = stop;
  return out;
}

}  // namespace fbent
