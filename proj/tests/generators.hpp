#pragma once

// Seeded random instances shared by the test suites.

#include <cstddef>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "streamrec/linalg.hpp"
#include "streamrec/measurement.hpp"

namespace testgen {

using streamrec::Matrix;
using streamrec::SampleBatch;
using streamrec::Vector;

using Rng = std::mt19937_64;

inline double normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c, double scale = 1.0) {
  Matrix m(r, c);
  for (double& v : m.data()) v = scale * normal(rng);
  return m;
}

inline Vector random_vector(Rng& rng, std::size_t n, double scale = 1.0) {
  Vector v(n);
  for (double& x : v) x = scale * normal(rng);
  return v;
}

inline Matrix random_symmetric(Rng& rng, std::size_t n) {
  Matrix m = random_matrix(rng, n, n);
  Matrix s = m + m.transpose();
  s *= 0.5;
  return s;
}

// G^T G + I
inline Matrix random_spd(Rng& rng, std::size_t n) {
  const Matrix g = random_matrix(rng, n, n);
  Matrix m = streamrec::transpose_times(g, g);
  streamrec::add_diagonal(m, 1.0);
  return m;
}

struct Instance {
  std::size_t n = 0;
  std::vector<SampleBatch> batches;
  std::vector<double> lambdas;
};

// Batches 0..packets-1 with Gaussian A_k, B_k, y_k. B_0 stays zero (packet -1
// is not modelled). b_scale shrinks the coupling.
inline Instance random_instance(Rng& rng, std::size_t n, std::size_t packets, std::size_t m_lo, std::size_t m_hi,
                                double lambda, double b_scale = 1.0) {
  Instance inst;
  inst.n = n;
  for (std::size_t k = 0; k < packets; ++k) {
    SampleBatch b;
    b.k = static_cast<long>(k);
    const std::size_t m = pick(rng, m_lo, m_hi);
    b.a = random_matrix(rng, m, n);
    b.b = k == 0 ? Matrix(m, n) : random_matrix(rng, m, n, b_scale);
    b.values = random_vector(rng, m);
    b.times.assign(m, static_cast<double>(k));
    inst.batches.push_back(std::move(b));
    inst.lambdas.push_back(lambda);
  }
  return inst;
}

// Rows scaled by 1/sqrt(M) so D_k is near 2I and ||E_k|| is small: the regime
// of the stability results. Dense enough to land in regime most of the time.
inline Instance well_conditioned_instance(Rng& rng, std::size_t n, std::size_t packets, double rows_per_unknown,
                                          double b_scale, double lambda) {
  Instance inst;
  inst.n = n;
  const auto m = static_cast<std::size_t>(rows_per_unknown * static_cast<double>(n));
  const double s = 1.0 / std::sqrt(static_cast<double>(m));
  for (std::size_t k = 0; k < packets; ++k) {
    SampleBatch b;
    b.k = static_cast<long>(k);
    b.a = random_matrix(rng, m, n, s);
    b.b = k == 0 ? Matrix(m, n) : random_matrix(rng, m, n, s * b_scale);
    b.values = random_vector(rng, m);
    b.times.assign(m, static_cast<double>(k));
    inst.batches.push_back(std::move(b));
    inst.lambdas.push_back(lambda);
  }
  return inst;
}

inline double relative_error(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t i = 0; i < a[k].size(); ++i) {
      const double d = a[k][i] - b[k][i];
      num += d * d;
      den += b[k][i] * b[k][i];
    }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace testgen
