#include "fbent/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace fbent {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << op << ": shape mismatch " << a.rows() << "x" << a.cols() << " vs "
       << b.rows() << "x" << b.cols();
    throw ShapeError(os.str());
  }
}

void require_square(const Matrix& a, const char* op) {
  if (!a.square()) throw ShapeError(std::string(op) + ": matrix must be square");
}

void require_finite(const Matrix& a, const char* op) {
  if (!a.all_finite()) throw NonFiniteError(std::string(op) + ": non-finite entry");
}

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

// In-place LU with partial pivoting. Returns false if a pivot falls below
// `pivot_floor`.
bool lu_factor(Matrix& m, std::vector<std::size_t>& perm, int& sign,
               double pivot_floor) {
  const std::size_t n = m.rows();
  perm.resize(n);
  std::iota(perm.begin(), perm.end(), 0);
  sign = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(m(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(m(i, k)) > best) {
        best = std::abs(m(i, k));
        piv = i;
      }
    }
    if (best <= pivot_floor) return false;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      std::swap(perm[k], perm[piv]);
      sign = -sign;
    }
    const double inv = 1.0 / m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = m(i, k) * inv;
      m(i, k) = f;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return true;
}

std::vector<double> lu_solve(const Matrix& lu, const std::vector<std::size_t>& perm,
                             const std::vector<double>& b) {
  const std::size_t n = lu.rows();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[perm[i]];
    for (std::size_t j = 0; j < i; ++j) s -= lu(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu(i, j) * x[j];
    x[i] = s / lu(i, i);
  }
  return x;
}

}  // namespace

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeError("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diag(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::diag(std::initializer_list<double> d) {
  return diag(std::span<const double>(d.begin(), d.size()));
}

Matrix Matrix::from_row_major(std::size_t rows, std::size_t cols,
                              std::span<const double> data) {
  if (data.size() != rows * cols) throw ShapeError("from_row_major: size mismatch");
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.data_.begin());
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Matrix::norm_inf() const noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += std::abs((*this)(i, j));
    m = std::max(m, s);
  }
  return m;
}

double Matrix::norm_fro() const noexcept {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

double Matrix::trace() const {
  require_square(*this, "trace");
  double s = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) s += (*this)(i, i);
  return s;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix& Matrix::operator+=(const Matrix& o) {
  require_same_shape(*this, o, "operator+");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  require_same_shape(*this, o, "operator-");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    std::ostringstream os;
    os << "operator*: inner dimensions " << a.cols() << " vs " << b.rows();
    throw ShapeError(os.str());
  }
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

std::ostream& operator<<(std::ostream& os, const Matrix& m) {
  os << "[";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << (i ? "; " : "");
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j);
  }
  return os << "]";
}

// ---------------------------------------------------------------------------
// SymMatrix

SymMatrix::SymMatrix(const Matrix& m) : m_(m) {
  require_square(m, "SymMatrix");
  for (std::size_t i = 0; i < m_.rows(); ++i)
    for (std::size_t j = i + 1; j < m_.cols(); ++j) {
      const double v = 0.5 * (m_(i, j) + m_(j, i));
      m_(i, j) = v;
      m_(j, i) = v;
    }
}

SymMatrix::SymMatrix(std::size_t n, double fill) : m_(n, n, fill) {}

void SymMatrix::set(std::size_t i, std::size_t j, double v) {
  m_(i, j) = v;
  m_(j, i) = v;
}

// ---------------------------------------------------------------------------
// Eigen

Eigensystem sym_eig(const SymMatrix& s, double tolerance) {
  const Matrix& src = s.matrix();
  require_finite(src, "sym_eig");
  const std::size_t n = s.dim();
  Matrix a = src;
  Matrix v = Matrix::identity(n);
  const double scale = src.norm_fro();
  constexpr int kMaxSweeps = 100;

  double off = off_diagonal_norm(a);
  for (int sweep = 0; sweep < kMaxSweeps && off > 1e-15 * scale && off > 0.0; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
    off = off_diagonal_norm(a);
  }
  if (off > tolerance * std::max(scale, 1e-300)) {
    std::ostringstream os;
    os << "sym_eig: Jacobi sweeps did not converge, off-diagonal norm " << off;
    throw NotConvergedError(os.str(), off);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  Eigensystem out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

std::vector<double> sym_eigvals(const SymMatrix& s, double tolerance) {
  return sym_eig(s, tolerance).values;
}

double min_eig_sym(const SymMatrix& s) {
  if (s.dim() == 0) throw ShapeError("min_eig_sym: empty matrix");
  return sym_eigvals(s).front();
}

bool is_psd(const SymMatrix& s, double tolerance) { return min_eig_sym(s) >= -tolerance; }

SymMatrix sqrtm_psd(const SymMatrix& s, double tolerance) {
  auto es = sym_eig(s);
  const double scale = std::max(1.0, s.matrix().max_abs());
  if (!es.values.empty() && es.values.front() < -tolerance * scale) {
    std::ostringstream os;
    os << "sqrtm_psd: matrix not PSD, min eigenvalue " << es.values.front();
    throw NotPSDError(os.str(), es.values.front());
  }
  const std::size_t n = s.dim();
  Matrix r(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double root = std::sqrt(std::max(0.0, es.values[k]));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        r(i, j) += root * es.vectors(i, k) * es.vectors(j, k);
  }
  return SymMatrix(r);
}

// ---------------------------------------------------------------------------
// Linear systems

std::vector<double> solve_linear(Matrix m, std::vector<double> b) {
  require_square(m, "solve_linear");
  if (b.size() != m.rows()) throw ShapeError("solve_linear: rhs size mismatch");
  require_finite(m, "solve_linear");
  std::vector<std::size_t> perm;
  int sign = 1;
  const double floor = m.max_abs() * std::numeric_limits<double>::epsilon() * m.rows();
  if (!lu_factor(m, perm, sign, floor)) throw LinalgError("solve_linear: singular matrix");
  return lu_solve(m, perm, b);
}

Matrix inverse(const Matrix& m) {
  require_square(m, "inverse");
  const std::size_t n = m.rows();
  Matrix lu = m;
  std::vector<std::size_t> perm;
  int sign = 1;
  const double floor = m.max_abs() * std::numeric_limits<double>::epsilon() * n;
  if (!lu_factor(lu, perm, sign, floor)) throw LinalgError("inverse: singular matrix");
  Matrix inv(n, n);
  std::vector<double> e(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    auto col = lu_solve(lu, perm, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

double determinant(Matrix m) {
  require_square(m, "determinant");
  std::vector<std::size_t> perm;
  int sign = 1;
  if (!lu_factor(m, perm, sign, 0.0)) return 0.0;
  double d = sign;
  for (std::size_t i = 0; i < m.rows(); ++i) d *= m(i, i);
  return d;
}

SymMatrix solve_lyapunov(const Matrix& a, const SymMatrix& q) {
  require_square(a, "solve_lyapunov");
  require_finite(a, "solve_lyapunov");
  const std::size_t n = a.rows();
  if (q.dim() != n) throw ShapeError("solve_lyapunov: A and Q dimensions differ");

  // Column-major vec: x[i + j n] = X(i, j); (I kron A + A kron I) vec(X) = -vec(Q).
  const std::size_t nn = n * n;
  Matrix k(nn, nn);
  std::vector<double> rhs(nn);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = i + j * n;
      for (std::size_t c = 0; c < n; ++c) {
        k(r, c + j * n) += a(i, c);
        k(r, i + c * n) += a(j, c);
      }
      rhs[r] = -q(i, j);
    }

  std::vector<std::size_t> perm;
  int sign = 1;
  const double floor = 1e-13 * std::max(k.max_abs(), 1e-300);
  if (!lu_factor(k, perm, sign, floor))
    throw SingularLyapunovError(
        "solve_lyapunov: Kronecker-sum system is singular (A has eigenvalues "
        "summing to zero)");
  auto x = lu_solve(k, perm, rhs);
  Matrix sol(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) sol(i, j) = x[i + j * n];
  return SymMatrix(sol);
}

// ---------------------------------------------------------------------------
// Exponential

Matrix expm(const Matrix& m) {
  require_square(m, "expm");
  require_finite(m, "expm");
  const std::size_t n = m.rows();
  const double norm = m.norm_inf();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix scaled = m * std::ldexp(1.0, -squarings);

  // With ||scaled|| <= 1/2, 20 Taylor terms leave a remainder far below 1e-16.
  Matrix result = Matrix::identity(n);
  Matrix term = Matrix::identity(n);
  for (int k = 1; k <= 20; ++k) {
    term = term * scaled;
    term *= 1.0 / k;
    result += term;
    if (term.max_abs() < 1e-18 * result.max_abs()) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

Matrix direct_sum(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() + b.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) out(a.rows() + i, a.cols() + j) = b(i, j);
  return out;
}

}  // namespace fbent
