#pragma once

// Turning a stream of timestamped measurements into per-batch systems
//   y_k = B_k alpha_{k-1} + A_k alpha_k
// where batch k holds every measurement with t_m in [k - eta, k + 1 - eta).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "streamrec/basis.hpp"
#include "streamrec/linalg.hpp"

namespace streamrec {

struct Sample {
  double t = 0.0;
  double y = 0.0;

  bool operator==(const Sample&) const = default;
};

using SampleStream = std::vector<Sample>;

struct SampleBatch {
  long k = 0;
  std::vector<std::size_t> members;  // indexes into the input stream
  Vector times;
  Vector values;
  Matrix a;  // rows: psi_{k,n}(t_m)
  Matrix b;  // rows: psi_{k-1,n}(t_m)

  std::size_t size() const { return times.size(); }
};

/// Batch index of a measurement time under the half-open rule.
long batch_index(double t, double eta);

/// Inclusive batch range [first, last]; samples outside it are rejected with a
/// warning on std::clog.
struct BatchRange {
  long first = 0;
  long last = 0;
};

/// Splits a time-sorted stream into contiguous batches. Without a range the
/// batches run from the first to the last occupied index; empty batches in
/// between (or inside the range) are emitted with no members.
std::vector<SampleBatch> batch_stream(std::span<const Sample> stream, double eta,
                                      std::optional<BatchRange> range = std::nullopt);

/// Point samples: A_k[m, n] = psi_{k,n}(t_m), B_k[m, n] = psi_{k-1,n}(t_m).
void assemble_point(SampleBatch& batch, const PacketBasis& basis);

/// Local-integration measurements y_m = integral of h_m(t) x(t) over [t_m - L, t_m].
struct KernelMeasurementSpec {
  // h(t_m, t); only evaluated on [t_m - length, t_m]
  std::function<double(double t_m, double t)> kernel;
  double length = 0.0;
  // Offsets s = t - t_m in [-length, 0] where the kernel is not smooth.
  std::vector<double> breakpoints;
};

/// Throws KernelTooLong when length > 1 - 2 eta.
void assemble_kernel(SampleBatch& batch, const PacketBasis& basis, const KernelMeasurementSpec& spec,
                     std::size_t order = kDefaultQuadratureOrder);

/// One path of a delay-doppler channel.
struct Tap {
  double a = 1.0;
  double tau = 0.0;
  double f = 0.0;

  bool operator==(const Tap&) const = default;
};

/// y(t) = sum_d a_d cos(2 pi f_d (t - tau_d)) x(t - tau_d)
double tap_response(std::span<const Tap> taps, const std::function<double(double)>& x, double t);

/// Rows of A_k, B_k for tap-sum measurements (the point-evaluation limit of a
/// kernel measurement). Throws KernelTooLong when a delay exceeds 1 - 2 eta.
void assemble_taps(SampleBatch& batch, const PacketBasis& basis, std::span<const Tap> taps);

/// Adds N(0, sigma^2) noise to every value, deterministic in the seed.
void add_noise(SampleStream& stream, double sigma, std::uint64_t seed);

}  // namespace streamrec
