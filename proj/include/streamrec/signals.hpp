#pragma once

// Synthetic test signals and the two sampling front ends of the experiments.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "streamrec/linalg.hpp"
#include "streamrec/measurement.hpp"

namespace streamrec {

/// x(t) = sum_j w_j sinc((t - t_j) / spacing), t_j = lo + j spacing on [lo, hi],
/// w_j ~ N(0, 1). Bandlimit pi / spacing rad/s (1 / (2 spacing) cycles).
class BandlimitedSignal {
 public:
  BandlimitedSignal(std::uint64_t seed, double spacing = 1.0 / 64.0, double lo = -5.0, double hi = 21.0);

  double operator()(double t) const;
  double spacing() const { return spacing_; }
  double lo() const { return lo_; }
  double omega_rad() const;
  const Vector& weights() const { return weights_; }
  double node(std::size_t j) const { return lo_ + spacing_ * static_cast<double>(j); }

 private:
  double spacing_, lo_;
  Vector weights_;
};

/// Unwindowed Fourier series on every unit interval [i, i+1) for i in
/// [first, last], coefficients from the QAM-16 alphabet {-3,-1,1,3}/sqrt(10);
/// zero outside. Jumps at the interval boundaries.
class OfdmSignal {
 public:
  OfdmSignal(std::uint64_t seed, std::size_t components = 64, long first = -1, long last = 17);

  double operator()(double t) const;
  std::size_t harmonics() const { return harmonics_; }
  long first() const { return first_; }
  long last() const { return last_; }
  // cos / sin coefficient of harmonic j (1-based) on interval i
  double cos_coefficient(long interval, std::size_t j) const;
  double sin_coefficient(long interval, std::size_t j) const;

 private:
  std::size_t harmonics_;
  long first_, last_;
  std::vector<Vector> cos_, sin_;
};

/// levels[i] = lo + i (hi - lo) / count, i = 0..count-1
std::vector<double> equispaced_levels(std::size_t count, double lo, double hi);

struct CrossingOptions {
  double scan_step = 1e-4;
  double tolerance = 1e-10;
};

/// Every sign change of x(t) - level inside [lo, hi], refined by bisection to
/// |x(t) - level| <= tolerance; emitted as (t, level), time-sorted.
SampleStream level_crossings(const std::function<double(double)>& x, std::span<const double> levels, double lo,
                             double hi, const CrossingOptions& options = {});

/// Equispaced t_m = lo + m t_step in [lo, hi] with y_m the tap-sum response.
SampleStream delay_doppler_sample(const std::function<double(double)>& x, std::span<const Tap> taps, double t_step,
                                  double lo, double hi);

/// Taps used in the deconvolution experiment.
std::vector<Tap> default_taps();

}  // namespace streamrec
