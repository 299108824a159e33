#include "streamrec/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace streamrec {

BandlimitedSignal::BandlimitedSignal(std::uint64_t seed, double spacing, double lo, double hi)
    : spacing_(spacing), lo_(lo) {
  if (!(spacing > 0.0)) throw std::invalid_argument("BandlimitedSignal: spacing must be positive");
  if (!(hi > lo)) throw std::invalid_argument("BandlimitedSignal: empty support");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / spacing + 1e-9)) + 1;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  weights_.resize(count);
  for (double& w : weights_) w = dist(rng);
}

double BandlimitedSignal::omega_rad() const { return std::numbers::pi / spacing_; }

double BandlimitedSignal::operator()(double t) const {
  // sin(pi (u - j)) = (-1)^j sin(pi u) with u measured from the nearest node so
  // the phase stays exact near the nodes.
  const double u = (t - lo_) / spacing_;
  const double nearest = std::round(u);
  const double r = u - nearest;
  const auto j0 = static_cast<long>(nearest);
  const auto count = static_cast<long>(weights_.size());
  if (r == 0.0) return j0 >= 0 && j0 < count ? weights_[static_cast<std::size_t>(j0)] : 0.0;
  double sum = 0.0;
  for (long j = 0; j < count; ++j) {
    const double term = weights_[static_cast<std::size_t>(j)] / (static_cast<double>(j0 - j) + r);
    sum += ((j0 - j) % 2 == 0) ? term : -term;
  }
  return std::sin(std::numbers::pi * r) / std::numbers::pi * sum;
}

OfdmSignal::OfdmSignal(std::uint64_t seed, std::size_t components, long first, long last)
    : harmonics_(components / 2), first_(first), last_(last) {
  if (components == 0 || components % 2 != 0) throw std::invalid_argument("OfdmSignal: components must be even");
  if (last < first) throw std::invalid_argument("OfdmSignal: empty interval range");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, 3);
  const double unit = 1.0 / std::sqrt(10.0);
  const double alphabet[4] = {-3.0 * unit, -1.0 * unit, 1.0 * unit, 3.0 * unit};
  const auto intervals = static_cast<std::size_t>(last - first + 1);
  cos_.assign(intervals, Vector(harmonics_));
  sin_.assign(intervals, Vector(harmonics_));
  for (std::size_t i = 0; i < intervals; ++i)
    for (std::size_t j = 0; j < harmonics_; ++j) {
      cos_[i][j] = alphabet[pick(rng)];
      sin_[i][j] = alphabet[pick(rng)];
    }
}

double OfdmSignal::operator()(double t) const {
  const auto i = static_cast<long>(std::floor(t));
  if (i < first_ || i > last_) return 0.0;
  const auto& c = cos_[static_cast<std::size_t>(i - first_)];
  const auto& s = sin_[static_cast<std::size_t>(i - first_)];
  const double phase = 2.0 * std::numbers::pi * (t - static_cast<double>(i));
  double x = 0.0;
  for (std::size_t j = 0; j < harmonics_; ++j) {
    const double a = phase * static_cast<double>(j + 1);
    x += c[j] * std::cos(a) + s[j] * std::sin(a);
  }
  return x;
}

double OfdmSignal::cos_coefficient(long interval, std::size_t j) const {
  if (interval < first_ || interval > last_ || j < 1 || j > harmonics_) throw std::out_of_range("OfdmSignal: bad index");
  return cos_[static_cast<std::size_t>(interval - first_)][j - 1];
}

double OfdmSignal::sin_coefficient(long interval, std::size_t j) const {
  if (interval < first_ || interval > last_ || j < 1 || j > harmonics_) throw std::out_of_range("OfdmSignal: bad index");
  return sin_[static_cast<std::size_t>(interval - first_)][j - 1];
}

std::vector<double> equispaced_levels(std::size_t count, double lo, double hi) {
  if (count == 0) throw std::invalid_argument("equispaced_levels: need at least one level");
  std::vector<double> levels(count);
  for (std::size_t i = 0; i < count; ++i) levels[i] = lo + static_cast<double>(i) * (hi - lo) / static_cast<double>(count);
  return levels;
}

SampleStream level_crossings(const std::function<double(double)>& x, std::span<const double> levels, double lo,
                             double hi, const CrossingOptions& options) {
  if (!(hi > lo)) throw std::invalid_argument("level_crossings: empty window");
  if (!(options.scan_step > 0.0) || !(options.tolerance > 0.0))
    throw std::invalid_argument("level_crossings: step and tolerance must be positive");
  const auto steps = static_cast<std::size_t>(std::floor((hi - lo) / options.scan_step + 1e-9));
  SampleStream out;
  double t_prev = lo;
  double x_prev = x(lo);
  for (std::size_t i = 1; i <= steps; ++i) {
    const double t = lo + options.scan_step * static_cast<double>(i);
    const double xt = x(t);
    for (double level : levels) {
      double fa = x_prev - level, fb = xt - level;
      if (fb == 0.0 && i < steps) {
        out.push_back({t, level});
        continue;
      }
      if (!((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0))) continue;
      double a = t_prev, b = t;
      double mid = 0.5 * (a + b), fm = x(mid) - level;
      for (int it = 0; it < 200 && std::abs(fm) > options.tolerance; ++it) {
        if ((fa < 0.0) == (fm < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
        const double next = 0.5 * (a + b);
        if (next == mid) break;
        mid = next;
        fm = x(mid) - level;
      }
      out.push_back({mid, level});
    }
    t_prev = t;
    x_prev = xt;
  }
  std::stable_sort(out.begin(), out.end(), [](const Sample& p, const Sample& q) { return p.t < q.t; });
  return out;
}

SampleStream delay_doppler_sample(const std::function<double(double)>& x, std::span<const Tap> taps, double t_step,
                                  double lo, double hi) {
  if (!(t_step > 0.0)) throw std::invalid_argument("delay_doppler_sample: step must be positive");
  for (const auto& tap : taps)
    if (tap.tau < 0.0) throw std::invalid_argument("delay_doppler_sample: negative delay");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / t_step + 1e-9)) + 1;
  SampleStream out;
  out.reserve(count);
  for (std::size_t m = 0; m < count; ++m) {
    const double t = lo + t_step * static_cast<double>(m);
    out.push_back({t, tap_response(taps, x, t)});
  }
  return out;
}

std::vector<Tap> default_taps() {
  return {{1.0, 0.0, 0.001}, {0.036, 0.05, 1.0}, {-0.3, 0.33, 2.0}, {0.066, 0.341, 3.0}};
}

}  // namespace streamrec
