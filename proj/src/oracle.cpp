#include "streamrec/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "streamrec/errors.hpp"

namespace streamrec {

void BatchProblem::validate() const {
  if (n == 0) throw std::invalid_argument("BatchProblem: N must be positive");
  const std::size_t count = a.size();
  if (count == 0) throw std::invalid_argument("BatchProblem: no batches");
  if (b.size() != count || y.size() != count || lambda.size() != count)
    throw std::invalid_argument("BatchProblem: inconsistent batch counts");
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t m = y[k].size();
    const bool a_ok = a[k].rows() == m && (m == 0 || a[k].cols() == n);
    const bool b_ok = b[k].rows() == m && (m == 0 || b[k].cols() == n);
    if (!a_ok || !b_ok) throw std::invalid_argument("BatchProblem: bad block shape in batch " + std::to_string(k));
    if (lambda[k] < 0.0) throw std::invalid_argument("BatchProblem: negative lambda");
  }
}

BatchProblem make_problem(std::span<const SampleBatch> batches, std::span<const double> lambdas, std::size_t n) {
  if (batches.size() != lambdas.size()) throw std::invalid_argument("make_problem: one lambda per batch");
  BatchProblem p;
  p.n = n;
  for (std::size_t i = 0; i < batches.size(); ++i) {
    if (i > 0 && batches[i].k != batches[i - 1].k + 1)
      throw std::invalid_argument("make_problem: batches must be contiguous");
    p.a.push_back(batches[i].a);
    p.b.push_back(batches[i].b);
    p.y.push_back(batches[i].values);
    p.lambda.push_back(lambdas[i]);
  }
  p.validate();
  return p;
}

Matrix stacked_design(const BatchProblem& p) {
  p.validate();
  std::size_t rows = 0;
  for (const auto& y : p.y) rows += y.size();
  const std::size_t n = p.n;
  Matrix phi(rows, n * p.packets());
  std::size_t r = 0;
  for (std::size_t k = 0; k < p.packets(); ++k) {
    for (std::size_t m = 0; m < p.y[k].size(); ++m, ++r) {
      for (std::size_t j = 0; j < n; ++j) {
        phi(r, k * n + j) = p.a[k](m, j);
        if (k > 0) phi(r, (k - 1) * n + j) = p.b[k](m, j);
      }
    }
  }
  return phi;
}

Vector stacked_values(const BatchProblem& p) {
  Vector out;
  for (const auto& y : p.y) out.insert(out.end(), y.begin(), y.end());
  return out;
}

Vector flatten(std::span<const Vector> alpha) {
  Vector out;
  for (const auto& v : alpha) out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::vector<Vector> unflatten(std::span<const double> flat, std::size_t n) {
  if (n == 0 || flat.size() % n != 0) throw std::invalid_argument("unflatten: size mismatch");
  std::vector<Vector> out(flat.size() / n);
  for (std::size_t k = 0; k < out.size(); ++k) out[k].assign(flat.begin() + k * n, flat.begin() + (k + 1) * n);
  return out;
}

std::vector<Vector> solve_dense(const BatchProblem& p) {
  const Matrix phi = stacked_design(p);
  Matrix normal = transpose_times(phi, phi);
  for (std::size_t k = 0; k < p.packets(); ++k)
    for (std::size_t j = 0; j < p.n; ++j) normal(k * p.n + j, k * p.n + j) += p.lambda[k];
  const Vector rhs = transpose_times(phi, stacked_values(p));
  try {
    return unflatten(Cholesky(normal).solve(rhs), p.n);
  } catch (const NotPositiveDefinite& e) {
    throw SingularSystem(std::string("solve_dense: normal matrix is singular: ") + e.what());
  }
}

std::vector<Vector> solve_qr(const BatchProblem& p) {
  const Matrix phi = stacked_design(p);
  const std::size_t cols = phi.cols();
  Matrix m = vstack(phi, Matrix(cols, cols));
  Vector rhs = stacked_values(p);
  rhs.resize(m.rows(), 0.0);
  for (std::size_t k = 0; k < p.packets(); ++k)
    for (std::size_t j = 0; j < p.n; ++j) m(phi.rows() + k * p.n + j, k * p.n + j) = std::sqrt(p.lambda[k]);

  const std::size_t rows = m.rows();
  double scale = 0.0;
  for (double v : m.data()) scale = std::max(scale, std::abs(v));
  for (std::size_t j = 0; j < cols; ++j) {
    double norm = 0.0;
    for (std::size_t i = j; i < rows; ++i) norm += m(i, j) * m(i, j);
    norm = std::sqrt(norm);
    if (norm <= 1e-14 * scale) throw SingularSystem("solve_qr: rank deficient at column " + std::to_string(j));
    const double alpha = m(j, j) > 0.0 ? -norm : norm;
    Vector v(rows - j);
    for (std::size_t i = j; i < rows; ++i) v[i - j] = m(i, j);
    v[0] -= alpha;
    const double vv = dot(v, v);
    if (vv == 0.0) continue;
    for (std::size_t c = j; c < cols; ++c) {
      double s = 0.0;
      for (std::size_t i = j; i < rows; ++i) s += v[i - j] * m(i, c);
      s = 2.0 * s / vv;
      for (std::size_t i = j; i < rows; ++i) m(i, c) -= s * v[i - j];
    }
    double s = 0.0;
    for (std::size_t i = j; i < rows; ++i) s += v[i - j] * rhs[i];
    s = 2.0 * s / vv;
    for (std::size_t i = j; i < rows; ++i) rhs[i] -= s * v[i - j];
  }
  Vector x(cols);
  for (std::size_t i = cols; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t c = i + 1; c < cols; ++c) s -= m(i, c) * x[c];
    x[i] = s / m(i, i);
  }
  return unflatten(x, p.n);
}

double residual(const BatchProblem& p, std::span<const Vector> alpha) {
  p.validate();
  if (alpha.size() != p.packets()) throw std::invalid_argument("residual: one vector per packet");
  double total = 0.0;
  for (std::size_t k = 0; k < p.packets(); ++k) {
    if (alpha[k].size() != p.n) throw std::invalid_argument("residual: coefficient length mismatch");
    for (std::size_t m = 0; m < p.y[k].size(); ++m) {
      double pred = dot(p.a[k].row(m), alpha[k]);
      if (k > 0) pred += dot(p.b[k].row(m), alpha[k - 1]);
      const double r = pred - p.y[k][m];
      total += r * r;
    }
    total += p.lambda[k] * dot(alpha[k], alpha[k]);
  }
  return total;
}

double gradient_norm(const BatchProblem& p, std::span<const Vector> alpha) {
  const Matrix phi = stacked_design(p);
  const Vector x = flatten(alpha);
  const Vector r = subtract(phi * x, stacked_values(p));
  Vector g = transpose_times(phi, r);
  for (std::size_t k = 0; k < p.packets(); ++k)
    for (std::size_t j = 0; j < p.n; ++j) g[k * p.n + j] += p.lambda[k] * x[k * p.n + j];
  return std::sqrt(dot(g, g));
}

double rhs_norm(const BatchProblem& p) {
  const Matrix phi = stacked_design(p);
  const Vector g = transpose_times(phi, stacked_values(p));
  return std::sqrt(dot(g, g));
}

}  // namespace streamrec
