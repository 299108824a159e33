#pragma once

// Small dense linear algebra used throughout the library. Everything is
// row-major double precision; sizes here are at most a few thousand.

#include <cstddef>
#include <span>
#include <vector>

namespace streamrec {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n, double scale = 1.0);
  static Matrix diagonal(std::span<const double> diag);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  Matrix transpose() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

/// Aᵀ·B without forming Aᵀ.
Matrix transpose_times(const Matrix& a, const Matrix& b);
/// Aᵀ·x without forming Aᵀ.
Vector transpose_times(const Matrix& a, std::span<const double> x);
/// Vertical concatenation; both blocks must have equal column counts.
Matrix vstack(const Matrix& top, const Matrix& bottom);

void add_diagonal(Matrix& m, double value);
double frobenius_norm(const Matrix& m);
double max_abs(const Matrix& m);
/// max |M - Mᵀ| / max(1, max |M|)
double asymmetry(const Matrix& m);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> x);
Vector axpy(double a, std::span<const double> x, std::span<const double> y);  // a*x + y
Vector subtract(std::span<const double> a, std::span<const double> b);

/// Cholesky factorisation M = L·Lᵀ of a symmetric positive-definite matrix.
/// Throws NotPositiveDefinite when a pivot drops to 1e-14 of the largest diagonal
/// entry or below.
class Cholesky {
 public:
  explicit Cholesky(const Matrix& m);

  std::size_t size() const { return lower_.rows(); }
  const Matrix& lower() const { return lower_; }

  Vector solve(std::span<const double> rhs) const;
  Matrix solve(const Matrix& rhs) const;

 private:
  void forward(std::span<double> x) const;
  void backward(std::span<double> x) const;

  Matrix lower_;
};

/// Solve M·X = rhs for symmetric positive-definite M.
Vector cholesky_solve(const Matrix& m, std::span<const double> rhs);
Matrix cholesky_solve(const Matrix& m, const Matrix& rhs);

struct EigenDecomposition {
  Vector values;   // descending
  Matrix vectors;  // column j is the eigenvector for values[j]
};

/// Cyclic Jacobi eigensolver for symmetric matrices.
EigenDecomposition jacobi_eigh(const Matrix& m);

/// Largest singular value by power iteration on MᵀM.
double spectral_norm(const Matrix& m);

/// Extreme eigenvalues of a symmetric matrix (via jacobi_eigh).
struct EigenRange {
  double min = 0.0;
  double max = 0.0;
};
EigenRange eigen_range(const Matrix& symmetric);

}  // namespace streamrec
