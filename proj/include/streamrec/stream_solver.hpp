#pragma once

// Streaming least squares over a chain of coupled packets. After batches
// 0..K the normal equations are block tridiagonal with diagonal blocks D_k and
// coupling E_k = A_{k+1}^T B_{k+1} below the diagonal. The solver keeps the
// block LU factors
//   Q_k  = D_k - E_{k-1} U_{k-1},  U_k = Q_k^{-1} E_k^T,
//   v_k  = Q_k^{-1} (w_k - E_{k-1} v_{k-1}),
// together with the tail Q'_K, w'_K of the newest packet, and produces
// estimates by the backward sweep alpha_{k|K} = v_k - U_k alpha_{k+1|K}.

#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "streamrec/linalg.hpp"
#include "streamrec/measurement.hpp"

namespace streamrec {

struct SolverOptions {
  // L_max: how far back the sweep runs after each batch; unset = all the way.
  std::optional<std::size_t> max_lag;
  // Packets with K - k >= freeze_lag are emitted as converged and their
  // factors released; unset = never freeze.
  std::optional<std::size_t> freeze_lag;
  // Remove lambda_K again when the tail packet gets its trailing batch.
  bool tail_reg_transient = false;
  // Keep every alpha_{k|K} snapshot.
  bool record_history = true;
  // Keep D_k, E_k, Q_k, Q'_k and y_k for conditioning analysis.
  bool record_trace = false;

  bool operator==(const SolverOptions&) const = default;
};

/// Default tail regularisation rel * trace(A^T A) / N (rel when the trace is zero).
double default_tail_lambda(const Matrix& a, double rel = 1e-8);

/// alpha_{k|K} snapshots plus converged values.
class EstimateHistory {
 public:
  void record(long k, long K, Vector alpha);
  void record_converged(long k, Vector alpha);

  bool contains(long k, long K) const;
  const Vector& at(long k, long K) const;
  /// Most recent snapshot of packet k taken at or before K.
  const Vector* latest(long k, long K) const;

  const std::map<std::pair<long, long>, Vector>& snapshots() const { return snapshots_; }
  const std::map<long, Vector>& converged() const { return converged_; }

 private:
  std::map<std::pair<long, long>, Vector> snapshots_;
  std::map<long, Vector> converged_;
};

/// Per-block matrices for the conditioning analysis.
struct SolverTrace {
  long first = 0;
  std::vector<Matrix> d;       // D_k = A_k^T A_k + B_{k+1}^T B_{k+1} + lambda_k I
  std::vector<Matrix> e;       // E_k = A_{k+1}^T B_{k+1}
  std::vector<Matrix> q;       // Q_k
  std::vector<Matrix> q_tail;  // Q'_k as formed when batch k arrived
  std::vector<Vector> y;       // y_k
};

class StreamSolver {
 public:
  StreamSolver(std::size_t n, SolverOptions options = {});

  /// First batch; Q'_0 = A^T A + lambda I, w'_0 = A^T y.
  void init(const SampleBatch& batch, double lambda);
  /// Next batch, which must carry index K + 1.
  void step(const SampleBatch& batch, double lambda);
  /// init on the first call, step afterwards.
  void push(const SampleBatch& batch, double lambda);

  bool initialized() const { return initialized_; }
  std::size_t size() const { return n_; }
  long first_index() const { return first_; }
  long last_index() const { return last_; }
  const SolverOptions& options() const { return options_; }

  /// alpha_{K|K} and friends: the latest estimate of every retained packet.
  const Vector& estimate(long k) const;
  std::vector<long> retained_packets() const;
  /// Number of N x N blocks and N-vectors currently held (memory instrumentation).
  std::size_t retained_blocks() const;
  std::size_t retained_blocks_high_water() const { return high_water_; }

  /// Full sweep from the tail back to the first packet: the exact least-squares
  /// solution for the batches seen so far. Throws HistoryTruncated when factors
  /// have been released.
  std::vector<Vector> full_backward_sweep() const;

  /// Emits alpha_{k|K} as converged for every retained packet with K - k >= lag
  /// and releases its factors. Returns the emitted packet indexes.
  std::vector<long> freeze(std::size_t lag);

  const EstimateHistory& history() const { return history_; }
  const SolverTrace& trace() const { return trace_; }

  /// lambda_k as it currently enters the normal equations (zero for interior
  /// packets in transient mode).
  std::vector<double> effective_lambdas() const;
  const std::vector<double>& lambda_schedule() const { return lambdas_; }

  /// Exact JSON dump of the state; loading resumes streaming bit-for-bit.
  std::string checkpoint() const;
  static StreamSolver restore(const std::string& json);
  void save_checkpoint(const std::string& path) const;
  static StreamSolver load_checkpoint(const std::string& path);

  bool operator==(const StreamSolver& other) const;

 private:
  struct Packet {
    long k = 0;
    Matrix u;  // U_k
    Vector v;  // v_k
  };

  void sweep();
  void apply_retention();
  void update_high_water();

  std::size_t n_;
  SolverOptions options_;
  bool initialized_ = false;
  long first_ = 0;
  long last_ = -1;

  Matrix q_tail_;  // Q'_K
  Vector w_tail_;  // w'_K
  Matrix e_prev_;  // E_{K-1}
  Vector v_prev_;  // v_{K-1}
  bool has_prev_ = false;
  Matrix gram_tail_;  // A_K^T A_K, for the trace

  std::deque<Packet> packets_;                // factors for k < K still retained
  std::map<long, Vector> current_;            // latest estimate per retained packet
  std::vector<double> lambdas_;               // lambda_k as supplied
  std::size_t high_water_ = 0;
  EstimateHistory history_;
  SolverTrace trace_;
};

}  // namespace streamrec
