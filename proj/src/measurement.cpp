#include "streamrec/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "streamrec/errors.hpp"

namespace streamrec {

long batch_index(double t, double eta) {
  if (!std::isfinite(t)) throw std::invalid_argument("batch_index: non-finite time");
  auto k = static_cast<long>(std::floor(t + eta));
  // floor(t + eta) can land one off after rounding; settle on the exact rule.
  while (t < static_cast<double>(k) - eta) --k;
  while (t >= static_cast<double>(k) + 1.0 - eta) ++k;
  return k;
}

std::vector<SampleBatch> batch_stream(std::span<const Sample> stream, double eta, std::optional<BatchRange> range) {
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (!std::isfinite(stream[i].t) || !std::isfinite(stream[i].y))
      throw std::invalid_argument("batch_stream: non-finite sample at index " + std::to_string(i));
    if (i > 0 && stream[i].t < stream[i - 1].t)
      throw UnsortedStream("batch_stream: time decreases at index " + std::to_string(i));
  }
  if (range && range->last < range->first) throw std::invalid_argument("batch_stream: empty batch range");

  std::vector<long> index(stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) index[i] = batch_index(stream[i].t, eta);

  long first = 0, last = -1;
  if (range) {
    first = range->first;
    last = range->last;
  } else if (!stream.empty()) {
    first = index.front();
    last = index.back();
  }

  std::vector<SampleBatch> batches;
  if (last < first) return batches;
  batches.resize(static_cast<std::size_t>(last - first + 1));
  for (long k = first; k <= last; ++k) batches[static_cast<std::size_t>(k - first)].k = k;

  std::size_t before = 0, after = 0;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (index[i] < first) {
      ++before;
      continue;
    }
    if (index[i] > last) {
      ++after;
      continue;
    }
    auto& batch = batches[static_cast<std::size_t>(index[i] - first)];
    batch.members.push_back(i);
    batch.times.push_back(stream[i].t);
    batch.values.push_back(stream[i].y);
  }
  if (before + after > 0) {
    std::clog << "warning: rejected " << before << " sample(s) before batch " << first << " and " << after
              << " sample(s) after batch " << last << "\n";
  }
  return batches;
}

void assemble_point(SampleBatch& batch, const PacketBasis& basis) {
  const std::size_t n = basis.size();
  batch.a = Matrix(batch.size(), n);
  batch.b = Matrix(batch.size(), n);
  for (std::size_t m = 0; m < batch.size(); ++m) {
    basis.evaluate(batch.k, batch.times[m], batch.a.row(m));
    basis.evaluate(batch.k - 1, batch.times[m], batch.b.row(m));
  }
}

void assemble_kernel(SampleBatch& batch, const PacketBasis& basis, const KernelMeasurementSpec& spec,
                     std::size_t order) {
  if (!spec.kernel) throw std::invalid_argument("assemble_kernel: missing kernel");
  if (!(spec.length > 0.0)) throw std::invalid_argument("assemble_kernel: kernel length must be positive");
  if (spec.length > 1.0 - 2.0 * basis.eta())
    throw KernelTooLong("assemble_kernel: kernel length " + std::to_string(spec.length) + " exceeds 1 - 2 eta");

  const std::size_t n = basis.size();
  const double max_width = 1.0 / (4.0 * static_cast<double>(n));
  batch.a = Matrix(batch.size(), n);
  batch.b = Matrix(batch.size(), n);
  Vector va(n), vb(n);
  for (std::size_t m = 0; m < batch.size(); ++m) {
    const double tm = batch.times[m];
    const double lo = tm - spec.length;
    std::vector<double> cuts{lo, tm};
    for (double s : spec.breakpoints) cuts.push_back(tm + s);
    for (long k : {batch.k - 1, batch.k})
      for (double u : basis.breakpoints()) cuts.push_back(static_cast<double>(k) + u);
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> panel;
    for (double c : cuts)
      if (c >= lo && c <= tm && (panel.empty() || c > panel.back())) panel.push_back(c);
    const QuadratureRule rule = composite_gauss_legendre(panel, order, max_width);

    auto ra = batch.a.row(m);
    auto rb = batch.b.row(m);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double t = rule.nodes[q];
      const double w = rule.weights[q] * spec.kernel(tm, t);
      if (w == 0.0) continue;
      basis.evaluate(batch.k, t, va);
      basis.evaluate(batch.k - 1, t, vb);
      for (std::size_t i = 0; i < n; ++i) {
        ra[i] += w * va[i];
        rb[i] += w * vb[i];
      }
    }
  }
}

double tap_response(std::span<const Tap> taps, const std::function<double(double)>& x, double t) {
  double y = 0.0;
  for (const auto& tap : taps) {
    const double s = t - tap.tau;
    y += tap.a * std::cos(2.0 * std::numbers::pi * tap.f * s) * x(s);
  }
  return y;
}

void assemble_taps(SampleBatch& batch, const PacketBasis& basis, std::span<const Tap> taps) {
  for (const auto& tap : taps) {
    if (tap.tau < 0.0) throw std::invalid_argument("assemble_taps: negative delay");
    if (tap.tau > 1.0 - 2.0 * basis.eta())
      throw KernelTooLong("assemble_taps: delay " + std::to_string(tap.tau) + " exceeds 1 - 2 eta");
  }
  const std::size_t n = basis.size();
  batch.a = Matrix(batch.size(), n);
  batch.b = Matrix(batch.size(), n);
  Vector va(n), vb(n);
  for (std::size_t m = 0; m < batch.size(); ++m) {
    auto ra = batch.a.row(m);
    auto rb = batch.b.row(m);
    for (const auto& tap : taps) {
      const double s = batch.times[m] - tap.tau;
      const double gain = tap.a * std::cos(2.0 * std::numbers::pi * tap.f * s);
      basis.evaluate(batch.k, s, va);
      basis.evaluate(batch.k - 1, s, vb);
      for (std::size_t i = 0; i < n; ++i) {
        ra[i] += gain * va[i];
        rb[i] += gain * vb[i];
      }
    }
  }
}

void add_noise(SampleStream& stream, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("add_noise: negative sigma");
  if (sigma == 0.0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, sigma);
  for (auto& s : stream) s.y += dist(rng);
}

}  // namespace streamrec
