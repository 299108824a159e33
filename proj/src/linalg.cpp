#include "streamrec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "streamrec/errors.hpp"

namespace streamrec {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw std::invalid_argument("Matrix: data size does not match shape");
  }
}

Matrix Matrix::identity(std::size_t n, double scale) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = scale;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw std::invalid_argument("Matrix +=: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw std::invalid_argument("Matrix -=: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("Matrix *: inner dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto crow = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw std::invalid_argument("Matrix * vector: dimension mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

Matrix transpose_times(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("transpose_times: row count mismatch");
  Matrix c(a.cols(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto arow = a.row(r);
    auto brow = b.row(r);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double ai = arow[i];
      if (ai == 0.0) continue;
      auto crow = c.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += ai * brow[j];
    }
  }
  return c;
}

Vector transpose_times(const Matrix& a, std::span<const double> x) {
  if (a.rows() != x.size()) throw std::invalid_argument("transpose_times: row count mismatch");
  Vector y(a.cols(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto arow = a.row(r);
    for (std::size_t i = 0; i < a.cols(); ++i) y[i] += arow[i] * x[r];
  }
  return y;
}

Matrix vstack(const Matrix& top, const Matrix& bottom) {
  if (top.cols() != bottom.cols()) throw std::invalid_argument("vstack: column mismatch");
  std::vector<double> data;
  data.reserve(top.data().size() + bottom.data().size());
  data.insert(data.end(), top.data().begin(), top.data().end());
  data.insert(data.end(), bottom.data().begin(), bottom.data().end());
  return Matrix(top.rows() + bottom.rows(), top.cols(), std::move(data));
}

void add_diagonal(Matrix& m, double value) {
  const std::size_t n = std::min(m.rows(), m.cols());
  for (std::size_t i = 0; i < n; ++i) m(i, i) += value;
}

double frobenius_norm(const Matrix& m) { return norm2(m.data()); }

double max_abs(const Matrix& m) {
  double r = 0.0;
  for (double v : m.data()) r = std::max(r, std::abs(v));
  return r;
}

double asymmetry(const Matrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
  return worst / std::max(1.0, max_abs(m));
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> x) {
  // Scaled to avoid overflow on the (rare) huge entries produced by ill-posed tails.
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (double v : x) {
    const double r = v / scale;
    s += r * r;
  }
  return scale * std::sqrt(s);
}

Vector axpy(double a, std::span<const double> x, std::span<const double> y) {
  Vector r(y.begin(), y.end());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += a * x[i];
  return r;
}

Vector subtract(std::span<const double> a, std::span<const double> b) {
  Vector r(a.begin(), a.end());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

// ---------------------------------------------------------------------------
// Cholesky

namespace {

void check_symmetric(const Matrix& m, const char* who) {
  if (m.rows() != m.cols()) throw std::invalid_argument(std::string(who) + ": matrix is not square");
  if (asymmetry(m) > 1e-10) throw std::invalid_argument(std::string(who) + ": matrix is not symmetric");
}

}  // namespace

Cholesky::Cholesky(const Matrix& m) : lower_(m.rows(), m.cols()) {
  check_symmetric(m, "Cholesky");
  const std::size_t n = m.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(m(i, i)));
  const double floor = 1e-14 * max_diag;

  for (std::size_t j = 0; j < n; ++j) {
    auto lj = lower_.row(j);
    double pivot = m(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= lj[k] * lj[k];
    if (!(pivot > floor)) {
      throw NotPositiveDefinite("Cholesky: pivot " + std::to_string(j) + " is " + std::to_string(pivot) +
                                " (limit " + std::to_string(floor) + ")");
    }
    const double d = std::sqrt(pivot);
    lj[j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      auto li = lower_.row(i);
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
      li[j] = s / d;
    }
  }
}

void Cholesky::forward(std::span<double> x) const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    auto li = lower_.row(i);
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= li[k] * x[k];
    x[i] = s / li[i];
  }
}

void Cholesky::backward(std::span<double> x) const {
  const std::size_t n = size();
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= lower_(k, ii) * x[k];
    x[ii] = s / lower_(ii, ii);
  }
}

Vector Cholesky::solve(std::span<const double> rhs) const {
  if (rhs.size() != size()) throw std::invalid_argument("Cholesky::solve: dimension mismatch");
  Vector x(rhs.begin(), rhs.end());
  forward(x);
  backward(x);
  return x;
}

Matrix Cholesky::solve(const Matrix& rhs) const {
  if (rhs.rows() != size()) throw std::invalid_argument("Cholesky::solve: dimension mismatch");
  Matrix x(rhs.rows(), rhs.cols());
  Vector col(rhs.rows());
  for (std::size_t j = 0; j < rhs.cols(); ++j) {
    for (std::size_t i = 0; i < rhs.rows(); ++i) col[i] = rhs(i, j);
    forward(col);
    backward(col);
    for (std::size_t i = 0; i < rhs.rows(); ++i) x(i, j) = col[i];
  }
  return x;
}

Vector cholesky_solve(const Matrix& m, std::span<const double> rhs) { return Cholesky(m).solve(rhs); }
Matrix cholesky_solve(const Matrix& m, const Matrix& rhs) { return Cholesky(m).solve(rhs); }

// ---------------------------------------------------------------------------
// Jacobi

EigenDecomposition jacobi_eigh(const Matrix& m) {
  check_symmetric(m, "jacobi_eigh");
  const std::size_t n = m.rows();
  if (n > 2048) throw std::invalid_argument("jacobi_eigh: matrix larger than 2048");

  // Symmetrised working copy; vt holds eigenvectors as rows so rotations stay contiguous.
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));
  Matrix vt = Matrix::identity(n);

  const double total = frobenius_norm(a);
  constexpr int kMaxSweeps = 100;
  bool converged = n < 2 || total == 0.0;

  // Round-robin ordering: each round rotates n/2 disjoint pairs, applied first
  // to rows and then to columns so that every pass walks memory contiguously.
  const std::size_t slots = n + (n % 2);
  std::vector<std::size_t> players(slots);
  std::iota(players.begin(), players.end(), 0);
  struct Rotation {
    std::size_t p, q;
    double c, s;
  };
  std::vector<Rotation> rotations;
  rotations.reserve(slots / 2);

  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    off = std::sqrt(2.0 * off);
    if (off <= 1e-15 * total) {
      converged = true;
      break;
    }
    const double threshold = sweep < 3 ? 0.2 * off / static_cast<double>(n * n) : 0.0;

    for (std::size_t round = 0; round + 1 < slots; ++round) {
      rotations.clear();
      for (std::size_t i = 0; i < slots / 2; ++i) {
        std::size_t p = players[i], q = players[slots - 1 - i];
        if (p >= n || q >= n) continue;
        if (p > q) std::swap(p, q);
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double small = 100.0 * std::abs(apq);
        if (sweep > 3 && std::abs(a(p, p)) + small == std::abs(a(p, p)) &&
            std::abs(a(q, q)) + small == std::abs(a(q, q))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        if (std::abs(apq) <= threshold) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        rotations.push_back({p, q, c, t * c});
      }
      // rotate players, keeping players[0] fixed
      std::rotate(players.begin() + 1, players.end() - 1, players.end());
      if (rotations.empty()) continue;

      std::vector<double> app(rotations.size()), aqq(rotations.size());
      for (std::size_t r = 0; r < rotations.size(); ++r) {
        const auto& rot = rotations[r];
        const double apq = a(rot.p, rot.q);
        const double t = rot.s / rot.c;
        app[r] = a(rot.p, rot.p) - t * apq;
        aqq[r] = a(rot.q, rot.q) + t * apq;
      }
      for (const auto& rot : rotations) {
        auto rp = a.row(rot.p);
        auto rq = a.row(rot.q);
        for (std::size_t k = 0; k < n; ++k) {
          const double x = rp[k], y = rq[k];
          rp[k] = rot.c * x - rot.s * y;
          rq[k] = rot.s * x + rot.c * y;
        }
        auto vp = vt.row(rot.p);
        auto vq = vt.row(rot.q);
        for (std::size_t k = 0; k < n; ++k) {
          const double x = vp[k], y = vq[k];
          vp[k] = rot.c * x - rot.s * y;
          vq[k] = rot.s * x + rot.c * y;
        }
      }
      for (std::size_t k = 0; k < n; ++k) {
        auto rk = a.row(k);
        for (const auto& rot : rotations) {
          const double x = rk[rot.p], y = rk[rot.q];
          rk[rot.p] = rot.c * x - rot.s * y;
          rk[rot.q] = rot.s * x + rot.c * y;
        }
      }
      for (std::size_t r = 0; r < rotations.size(); ++r) {
        const auto& rot = rotations[r];
        a(rot.p, rot.p) = app[r];
        a(rot.q, rot.q) = aqq[r];
        a(rot.p, rot.q) = a(rot.q, rot.p) = 0.0;
      }
    }
  }
  if (!converged) throw NoConvergence("jacobi_eigh: no convergence after sweep budget");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  EigenDecomposition out{Vector(n), Matrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    auto v = vt.row(order[j]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v[i];
  }
  return out;
}

double spectral_norm(const Matrix& m) {
  const std::size_t n = m.cols();
  if (n == 0 || m.rows() == 0) return 0.0;
  if (max_abs(m) == 0.0) return 0.0;

  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * std::sin(1.0 + 1.7 * static_cast<double>(i));
  double estimate = 0.0;
  for (int it = 0; it < 1000; ++it) {
    const double xn = norm2(x);
    for (double& v : x) v /= xn;
    Vector y = m * x;
    Vector z = transpose_times(m, y);
    const double next = std::sqrt(dot(x, z));
    x = std::move(z);
    if (it > 3 && std::abs(next - estimate) <= 1e-15 * next) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  return estimate;
}

EigenRange eigen_range(const Matrix& symmetric) {
  if (symmetric.rows() == 0) return {};
  auto eig = jacobi_eigh(symmetric);
  return {eig.values.back(), eig.values.front()};
}

}  // namespace streamrec
