#pragma once

// Dense reference solver for the regularised batch least-squares problem
//   minimize sum_k ||B_k beta_{k-1} + A_k beta_k - y_k||^2 + sum_k lambda_k ||beta_k||^2
// over packets 0..K. It ignores all structure on purpose.

#include <cstddef>
#include <span>
#include <vector>

#include "streamrec/linalg.hpp"
#include "streamrec/measurement.hpp"

namespace streamrec {

struct BatchProblem {
  std::size_t n = 0;
  std::vector<Matrix> a;  // A_k, M_k x N
  std::vector<Matrix> b;  // B_k, M_k x N (B_0 is ignored)
  std::vector<Vector> y;
  std::vector<double> lambda;

  std::size_t packets() const { return a.size(); }
  void validate() const;
};

/// Builds a problem from assembled batches (contiguous, in order).
BatchProblem make_problem(std::span<const SampleBatch> batches, std::span<const double> lambdas, std::size_t n);

/// Stacked Phi_K, (sum M_k) x (K+1)N.
Matrix stacked_design(const BatchProblem& problem);
Vector stacked_values(const BatchProblem& problem);

/// Normal equations assembled densely and solved by Cholesky. Throws SingularSystem.
std::vector<Vector> solve_dense(const BatchProblem& problem);

/// Householder QR on [Phi; sqrt(Lambda) (x) I].
std::vector<Vector> solve_qr(const BatchProblem& problem);

/// Objective value at the given coefficients.
double residual(const BatchProblem& problem, std::span<const Vector> alpha);

/// Norm of Phi^T (Phi alpha - y) + (Lambda (x) I) alpha.
double gradient_norm(const BatchProblem& problem, std::span<const Vector> alpha);

/// Norm of Phi^T y (scale for the optimality tests).
double rhs_norm(const BatchProblem& problem);

/// Concatenate / split packet vectors.
Vector flatten(std::span<const Vector> alpha);
std::vector<Vector> unflatten(std::span<const double> flat, std::size_t n);

}  // namespace streamrec
