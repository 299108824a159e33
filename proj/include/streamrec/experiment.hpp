#pragma once

// End-to-end runs: generate a signal, sample it, stream the batches through the
// solver and score the result against the truth.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "streamrec/analysis.hpp"
#include "streamrec/basis.hpp"
#include "streamrec/measurement.hpp"
#include "streamrec/signals.hpp"
#include "streamrec/stream_solver.hpp"

namespace streamrec {

struct SignalConfig {
  std::string kind = "bandlimited-sinc";  // or "ofdm"
  std::uint64_t seed = 1;
  double spacing = 1.0 / 64.0;
  double support_lo = -5.0, support_hi = 21.0;
  std::size_t components = 64;
  long first_interval = -1, last_interval = 17;

  bool operator==(const SignalConfig&) const = default;
};

struct SamplingConfig {
  std::string kind = "level-crossing";  // or "delay-doppler"
  std::size_t levels = 16;
  double level_min = -2.5, level_max = 2.5;
  double window_lo = -0.25, window_hi = 16.25;
  double scan_step = 1e-4;
  double tolerance = 1e-10;
  std::vector<Tap> taps;
  double t_step = 0.01;
  double noise_sigma = 0.0;

  bool operator==(const SamplingConfig&) const = default;
};

struct SolverConfig {
  long first_batch = 0, last_batch = 16;
  double lambda_rel = 1e-8;
  std::optional<std::size_t> max_lag;
  std::optional<std::size_t> freeze_lag;
  bool tail_reg_transient = false;
  // L_max of the truncated-memory comparison run; unset skips it.
  std::optional<std::size_t> compare_lag = 3;

  bool operator==(const SolverConfig&) const = default;
};

struct AnalysisConfig {
  long k_lo = 4, k_hi = 10;
  long K_lo = 4, K_hi = 10;
  double nyquist_spacing = 1.0 / 64.0;
  double rmse_lo = 0.25, rmse_hi = 15.75;
  bool conditioning = true;

  bool operator==(const AnalysisConfig&) const = default;
};

struct ExperimentConfig {
  std::string name = "level-crossing";
  BasisDescriptor basis;
  SignalConfig signal;
  SamplingConfig sampling;
  SolverConfig solver;
  AnalysisConfig analysis;
  std::string out_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

/// LOT N = 75, eta = 1/4, sinc signal, 16 levels, batches 0..16.
ExperimentConfig level_crossing_config();
/// LOT N = 85, eta = 1/4, OFDM signal, 4-tap channel sampled every 0.01.
ExperimentConfig delay_doppler_config();
/// Preset by name; throws std::invalid_argument for unknown names.
ExperimentConfig preset_config(const std::string& name);

/// JSON text. Keys missing from the input keep the values of `base` (or of the
/// preset named by the "name" key when given). Unknown keys are rejected.
std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig config_from_json(const std::string& text, const ExperimentConfig& base);
void validate(const ExperimentConfig& config);

std::function<double(double)> make_signal(const SignalConfig& config);
SampleStream simulate(const ExperimentConfig& config);

SolverOptions solver_options(const SolverConfig& config);

/// Batches and assembles the samples for the configured batch range and
/// measurement model.
std::vector<SampleBatch> prepare_batches(const ExperimentConfig& config, const PacketBasis& basis,
                                         const SampleStream& samples);

/// Streams the batches through a solver, lambda_k = default_tail_lambda(A_k, lambda_rel).
StreamSolver run_solver(const std::vector<SampleBatch>& batches, std::size_t n, const SolverOptions& options,
                        double lambda_rel);

/// Converged packets merged with the latest estimate of every retained packet.
std::map<long, Vector> final_estimates(const StreamSolver& solver);

/// x_hat(t) from the packets covering t.
double reconstruct_at(const PacketBasis& basis, const std::map<long, Vector>& coefficients, double t);

/// sqrt(sum (x_hat - x)^2 / sum x^2) on the grid lo, lo + h, ... <= hi.
double relative_rmse(const std::function<double(double)>& x, const std::function<double(double)>& x_hat, double lo,
                     double hi, double h);

/// sqrt(sum_k ||a_k - b_k||^2 / sum_k ||b_k||^2) over the packets of b.
double coefficient_difference(const std::map<long, Vector>& a, const std::map<long, Vector>& b);

struct ExperimentResult {
  ExperimentConfig config;
  SampleStream samples;
  std::size_t batch_count = 0;
  std::vector<std::size_t> batch_sizes;
  std::map<long, Vector> coefficients;  // alpha*_k, unlimited memory
  EstimateHistory history;
  LagErrorTable lags;
  LagSummary lag_summary;
  std::optional<ConditioningReport> conditioning;
  std::string conditioning_error;
  double rmse = 0.0;
  std::optional<double> rmse_truncated;
  std::optional<double> truncated_difference;
  std::size_t retained_high_water = 0;
  std::vector<double> grid_t, grid_x, grid_x_hat;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

std::string summary_json(const ExperimentResult& result);
std::string reconstruction_csv(const ExperimentResult& result);

/// Writes config.resolved, samples.csv, coefficients.csv, estimates.csv,
/// lag_table.csv, lag_table.txt, conditioning.csv, reconstruction.csv and
/// summary.json into `dir` (created when missing).
void write_artifacts(const ExperimentResult& result, const std::string& dir);

}  // namespace streamrec
