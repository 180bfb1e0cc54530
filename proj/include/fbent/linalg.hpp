// Dense real linear algebra for phase-space matrices (dimension <= 64).
#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fbent {

/// Centralized numerical tolerances. Every routine that uses one accepts an
/// override argument.
namespace tol {
inline constexpr double eig = 1e-10;
inline constexpr double psd = 1e-10;
inline constexpr double resid = 1e-9;
}  // namespace tol

class LinalgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public LinalgError {
 public:
  using LinalgError::LinalgError;
};

class NonFiniteError : public LinalgError {
 public:
  using LinalgError::LinalgError;
};

class NotConvergedError : public LinalgError {
 public:
  NotConvergedError(const std::string& what, double residual)
      : LinalgError(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class NotPSDError : public LinalgError {
 public:
  NotPSDError(const std::string& what, double min_eig)
      : LinalgError(what), min_eig_(min_eig) {}
  double min_eig() const noexcept { return min_eig_; }

 private:
  double min_eig_;
};

class SingularLyapunovError : public LinalgError {
 public:
  using LinalgError::LinalgError;
};

/// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diag(std::span<const double> d);
  static Matrix diag(std::initializer_list<double> d);
  static Matrix from_row_major(std::size_t rows, std::size_t cols,
                               std::span<const double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  Matrix transpose() const;
  double max_abs() const noexcept;
  /// Induced infinity norm (max absolute row sum).
  double norm_inf() const noexcept;
  double norm_fro() const noexcept;
  double trace() const;
  bool all_finite() const noexcept;

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(double s);

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }
  friend Matrix operator-(Matrix a) { return a *= -1.0; }
  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

std::ostream& operator<<(std::ostream& os, const Matrix& m);

/// Square matrix with entries(i,j) == entries(j,i) exactly. Construction
/// from a general matrix symmetrizes as (M + M^T)/2.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);
  explicit SymMatrix(std::size_t n, double fill = 0.0);

  static SymMatrix identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }

  std::size_t dim() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  /// Sets both (i,j) and (j,i).
  void set(std::size_t i, std::size_t j, double v);

  const Matrix& matrix() const& noexcept { return m_; }
  Matrix matrix() && { return std::move(m_); }
  operator const Matrix&() const noexcept { return m_; }

 private:
  Matrix m_;
};

struct Eigensystem {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column k pairs with values[k]
};

/// Cyclic Jacobi eigendecomposition. Throws NotConvergedError if the
/// off-diagonal mass does not vanish within the sweep cap.
Eigensystem sym_eig(const SymMatrix& s, double tolerance = tol::eig);

/// Ascending eigenvalues only.
std::vector<double> sym_eigvals(const SymMatrix& s, double tolerance = tol::eig);

double min_eig_sym(const SymMatrix& s);
bool is_psd(const SymMatrix& s, double tolerance = tol::psd);

/// Principal square root of a PSD matrix. Eigenvalues in [-tolerance, 0)
/// are clamped; anything more negative raises NotPSDError.
SymMatrix sqrtm_psd(const SymMatrix& s, double tolerance = tol::psd);

/// Solves A X + X A^T + Q = 0 by dense solve of the Kronecker-sum system.
SymMatrix solve_lyapunov(const Matrix& a, const SymMatrix& q);

/// Solves the square system M x = b by LU with partial pivoting.
std::vector<double> solve_linear(Matrix m, std::vector<double> b);

Matrix inverse(const Matrix& m);
double determinant(Matrix m);

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
Matrix expm(const Matrix& m);

/// Block-diagonal direct sum.
Matrix direct_sum(const Matrix& a, const Matrix& b);

}  // namespace fbent
