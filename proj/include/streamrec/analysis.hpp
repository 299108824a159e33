#pragma once

// Diagnostics for the streaming solver: block conditioning, the epsilon
// recursion, the convergence envelope, lag-error tables and a Monte Carlo
// study of the random-sampling conditioning.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "streamrec/basis.hpp"
#include "streamrec/linalg.hpp"
#include "streamrec/stream_solver.hpp"

namespace streamrec {

struct EpsilonResult {
  double epsilon = 0.0;
  // eps_0 = delta, eps_k = delta + theta^2 / (1 - eps_{k-1}), until it settles.
  std::vector<double> sequence;
};

/// Closed form eps = (1 + delta)/2 - sqrt((1 - delta)^2/4 - theta^2).
/// Throws OutOfRegime when theta > (1 - delta)/2.
EpsilonResult epsilon_bound(double delta, double theta);

bool in_regime(double delta, double theta);

/// C = ((1 + lambda_inv theta)(1 - eps) / (1 - eps - theta)^2) sqrt(1 + delta)
double theorem_constant(double delta, double theta, double epsilon, double lambda_inv);

struct BlockConditioning {
  long k = 0;
  double d_min = 0.0, d_max = 0.0;
  double e_norm = 0.0;
  double q_min = 0.0, q_max = 0.0;
  double q_tail_min = 0.0;
};

struct ConditioningReport {
  std::vector<BlockConditioning> blocks;
  double kappa = 0.0;
  double delta = 0.0;
  double theta = 0.0;
  double epsilon = 0.0;           // closed form when in regime, measured otherwise
  double epsilon_measured = 0.0;  // max_k ||Q_k - kappa I|| / kappa
  double lambda_inv = 0.0;        // kappa * max_k ||Q'_k^{-1}||
  double m_y = 0.0;
  double rho = 0.0;               // theta / (1 - eps)
  double constant = 0.0;          // C(delta, theta, eps, lambda)
  bool regime = false;
};

/// Needs a trace with at least two batches.
ConditioningReport conditioning(const SolverTrace& trace);

/// C * M_y * rho^lag for each lag. Throws OutOfRegime.
std::vector<double> theorem_envelope(const ConditioningReport& report, std::span<const std::size_t> lags);

struct LagErrorTable {
  std::vector<long> rows;  // K
  std::vector<long> cols;  // k
  // values[i][j] for K = rows[i], k = cols[j]; empty when K < k
  std::vector<std::vector<std::optional<double>>> values;
};

/// log10(||alpha_{k|K} - alpha*_k|| / ||alpha*_k||) for K in [K_lo, K_hi],
/// k in [k_lo, k_hi]. alpha_{k|K} is the latest snapshot taken at or before K.
LagErrorTable lag_table(const EstimateHistory& history, const std::map<long, Vector>& final_estimates, long k_lo,
                        long k_hi, long K_lo, long K_hi);

struct LagSummary {
  std::vector<std::size_t> lags;
  std::vector<double> mean_log10;  // mean over finite entries at each lag
  std::vector<double> max_log10;
  double slope = 0.0;              // least-squares decades per lag over lags >= 1
};

LagSummary summarize_lags(const LagErrorTable& table);

std::string format_lag_table(const LagErrorTable& table);
std::string lag_table_csv(const LagErrorTable& table);
std::string conditioning_csv(const ConditioningReport& report);

struct MonteCarloPoint {
  double m = 0.0;            // effective rate per unit interval
  std::size_t samples = 0;   // M' drawn on [-eta, 2 + eta]
  // quantiles (10%, 50%, 90%) over trials
  std::vector<double> lambda_min, lambda_max, e_norm, delta;
  double success = 0.0;      // fraction of trials with delta <= target
};

struct MonteCarloResult {
  std::vector<MonteCarloPoint> points;
  std::optional<double> required_m;  // smallest M with success >= 1 - 3p
};

/// Draws M' = round(M (2 + 2 eta)) uniform samples per trial (seed + trial) and
/// measures D_0/M, D_1/M and E_0/M, normalised by the mean Gram diagonal.
MonteCarloResult sampling_monte_carlo(const PacketBasis& basis, std::span<const double> m_grid, std::size_t trials,
                                      double p_target, double delta_target, std::uint64_t seed);

}  // namespace streamrec
