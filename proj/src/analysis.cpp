#include "streamrec/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "streamrec/errors.hpp"
#include "streamrec/io.hpp"

namespace streamrec {

namespace {

double quantile(std::vector<double> values, double p) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<double> quantiles(const std::vector<double>& v) { return {quantile(v, 0.1), quantile(v, 0.5), quantile(v, 0.9)}; }

double deviation_from(const EigenRange& r, double kappa) {
  return std::max(std::abs(r.max - kappa), std::abs(kappa - r.min));
}

}  // namespace

bool in_regime(double delta, double theta) { return delta >= 0.0 && delta < 1.0 && theta >= 0.0 && theta <= 0.5 * (1.0 - delta); }

EpsilonResult epsilon_bound(double delta, double theta) {
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("epsilon_bound: delta must be in [0, 1)");
  if (theta < 0.0) throw std::invalid_argument("epsilon_bound: theta must be non-negative");
  if (theta > 0.5 * (1.0 - delta))
    throw OutOfRegime("epsilon_bound: theta exceeds (1 - delta)/2");
  EpsilonResult r;
  const double half = 0.5 * (1.0 - delta);
  r.epsilon = 0.5 * (1.0 + delta) - std::sqrt(std::max(0.0, half * half - theta * theta));

  constexpr std::size_t kMaxTerms = 1000000;
  double eps = delta;
  r.sequence.push_back(eps);
  while (r.sequence.size() < kMaxTerms) {
    const double next = delta + theta * theta / (1.0 - eps);
    r.sequence.push_back(next);
    if (next - eps <= 0.0) break;
    eps = next;
  }
  return r;
}

double theorem_constant(double delta, double theta, double epsilon, double lambda_inv) {
  const double gap = 1.0 - epsilon - theta;
  if (!(gap > 0.0)) throw OutOfRegime("theorem_constant: needs eps + theta < 1");
  return (1.0 + lambda_inv * theta) * (1.0 - epsilon) / (gap * gap) * std::sqrt(1.0 + delta);
}

ConditioningReport conditioning(const SolverTrace& trace) {
  const std::size_t blocks = trace.d.size();
  if (blocks == 0 || trace.y.size() < 2)
    throw std::invalid_argument("conditioning: needs a recorded trace with at least two batches");
  if (trace.e.size() != blocks || trace.q.size() != blocks || trace.q_tail.size() != blocks + 1)
    throw std::invalid_argument("conditioning: inconsistent trace");

  ConditioningReport r;
  double d_lo = std::numeric_limits<double>::infinity(), d_hi = -d_lo;
  std::vector<EigenRange> q_ranges;
  for (std::size_t i = 0; i < blocks; ++i) {
    BlockConditioning b;
    b.k = trace.first + static_cast<long>(i);
    const EigenRange d = eigen_range(trace.d[i]);
    const EigenRange q = eigen_range(trace.q[i]);
    b.d_min = d.min;
    b.d_max = d.max;
    b.e_norm = spectral_norm(trace.e[i]);
    b.q_min = q.min;
    b.q_max = q.max;
    b.q_tail_min = eigen_range(trace.q_tail[i]).min;
    d_lo = std::min(d_lo, d.min);
    d_hi = std::max(d_hi, d.max);
    q_ranges.push_back(q);
    r.blocks.push_back(b);
  }
  double q_tail_min = std::numeric_limits<double>::infinity();
  for (const auto& b : r.blocks) q_tail_min = std::min(q_tail_min, b.q_tail_min);
  q_tail_min = std::min(q_tail_min, eigen_range(trace.q_tail.back()).min);

  r.kappa = 0.5 * (d_hi + d_lo);
  if (!(r.kappa > 0.0)) throw std::invalid_argument("conditioning: D_k have no positive spectrum");
  for (std::size_t i = 0; i < blocks; ++i) {
    r.delta = std::max(r.delta, std::max(std::abs(r.blocks[i].d_max - r.kappa), std::abs(r.kappa - r.blocks[i].d_min)) / r.kappa);
    r.theta = std::max(r.theta, r.blocks[i].e_norm / r.kappa);
    r.epsilon_measured = std::max(r.epsilon_measured, deviation_from(q_ranges[i], r.kappa) / r.kappa);
  }
  r.regime = in_regime(r.delta, r.theta);
  r.epsilon = r.regime ? epsilon_bound(r.delta, r.theta).epsilon : r.epsilon_measured;
  r.lambda_inv = q_tail_min > 0.0 ? r.kappa / q_tail_min : std::numeric_limits<double>::infinity();

  double y_energy = 0.0;
  for (std::size_t i = 0; i < trace.y.size(); ++i) {
    double s = dot(trace.y[i], trace.y[i]);
    if (i + 1 < trace.y.size()) s += dot(trace.y[i + 1], trace.y[i + 1]);
    y_energy = std::max(y_energy, s);
  }
  r.m_y = std::sqrt(y_energy / r.kappa);
  if (r.epsilon < 1.0) r.rho = r.theta / (1.0 - r.epsilon);
  if (r.epsilon + r.theta < 1.0) r.constant = theorem_constant(r.delta, r.theta, r.epsilon, r.lambda_inv);
  else r.constant = std::numeric_limits<double>::infinity();
  return r;
}

std::vector<double> theorem_envelope(const ConditioningReport& report, std::span<const std::size_t> lags) {
  if (!report.regime) throw OutOfRegime("theorem_envelope: report is out of regime");
  std::vector<double> out;
  for (std::size_t lag : lags)
    out.push_back(report.constant * report.m_y * std::pow(report.rho, static_cast<double>(lag)));
  return out;
}

LagErrorTable lag_table(const EstimateHistory& history, const std::map<long, Vector>& final_estimates, long k_lo,
                        long k_hi, long K_lo, long K_hi) {
  LagErrorTable t;
  for (long K = K_lo; K <= K_hi; ++K) t.rows.push_back(K);
  for (long k = k_lo; k <= k_hi; ++k) t.cols.push_back(k);
  t.values.assign(t.rows.size(), std::vector<std::optional<double>>(t.cols.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (std::size_t j = 0; j < t.cols.size(); ++j) {
      const long K = t.rows[i], k = t.cols[j];
      if (K < k) continue;
      const Vector* est = history.latest(k, K);
      auto fin = final_estimates.find(k);
      if (est == nullptr || fin == final_estimates.end()) continue;
      const double ref = norm2(fin->second);
      const double diff = norm2(subtract(*est, fin->second));
      t.values[i][j] = ref > 0.0 ? std::log10(diff / ref) : std::log10(diff);
    }
  }
  return t;
}

LagSummary summarize_lags(const LagErrorTable& table) {
  std::map<std::size_t, std::vector<double>> by_lag;
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    for (std::size_t j = 0; j < table.cols.size(); ++j) {
      const auto& v = table.values[i][j];
      if (v && std::isfinite(*v)) by_lag[static_cast<std::size_t>(table.rows[i] - table.cols[j])].push_back(*v);
    }
  LagSummary s;
  for (const auto& [lag, vals] : by_lag) {
    double sum = 0.0, mx = -std::numeric_limits<double>::infinity();
    for (double v : vals) {
      sum += v;
      mx = std::max(mx, v);
    }
    s.lags.push_back(lag);
    s.mean_log10.push_back(sum / static_cast<double>(vals.size()));
    s.max_log10.push_back(mx);
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, count = 0.0;
  for (std::size_t i = 0; i < s.lags.size(); ++i) {
    if (s.lags[i] < 1) continue;
    const double x = static_cast<double>(s.lags[i]);
    sx += x;
    sy += s.mean_log10[i];
    sxx += x * x;
    sxy += x * s.mean_log10[i];
    count += 1.0;
  }
  if (count >= 2.0) s.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return s;
}

std::string format_lag_table(const LagErrorTable& t) {
  std::ostringstream out;
  out << std::setw(6) << "K\\k";
  for (long k : t.cols) out << std::setw(9) << k;
  out << "\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    out << std::setw(6) << t.rows[i];
    for (std::size_t j = 0; j < t.cols.size(); ++j) {
      const auto& v = t.values[i][j];
      if (t.rows[i] < t.cols[j]) {
        // setw counts bytes; the dash is three of them in UTF-8
        out << std::string(8, ' ') << "—";
      } else if (!v) {
        out << std::setw(9) << "nan";
      } else {
        std::ostringstream cell;
        cell << std::fixed << std::setprecision(2) << *v;
        out << std::setw(9) << cell.str();
      }
    }
    out << "\n";
  }
  return out.str();
}

std::string lag_table_csv(const LagErrorTable& t) {
  std::ostringstream out;
  out << "K";
  for (long k : t.cols) out << "," << k;
  out << "\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    out << t.rows[i];
    for (std::size_t j = 0; j < t.cols.size(); ++j) {
      out << ",";
      if (t.values[i][j]) out << format_double(*t.values[i][j]);
    }
    out << "\n";
  }
  return out.str();
}

std::string conditioning_csv(const ConditioningReport& r) {
  std::ostringstream out;
  out << "k,d_min,d_max,e_norm,q_min,q_max,q_tail_min\n";
  for (const auto& b : r.blocks) {
    out << b.k << "," << format_double(b.d_min) << "," << format_double(b.d_max) << "," << format_double(b.e_norm) << ","
        << format_double(b.q_min) << "," << format_double(b.q_max) << "," << format_double(b.q_tail_min) << "\n";
  }
  return out.str();
}

MonteCarloResult sampling_monte_carlo(const PacketBasis& basis, std::span<const double> m_grid, std::size_t trials,
                                      double p_target, double delta_target, std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("sampling_monte_carlo: need at least one trial");
  if (!(p_target > 0.0 && p_target < 1.0 / 3.0)) throw std::invalid_argument("sampling_monte_carlo: p must be in (0, 1/3)");
  const std::size_t n = basis.size();
  const double eta = basis.eta();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale += basis.gram()(i, i);
  scale /= static_cast<double>(n);

  MonteCarloResult result;
  Vector p0(n), p1(n);
  for (double m : m_grid) {
    if (!(m > 0.0)) throw std::invalid_argument("sampling_monte_carlo: rates must be positive");
    MonteCarloPoint pt;
    pt.m = m;
    pt.samples = static_cast<std::size_t>(std::lround(m * (2.0 + 2.0 * eta)));
    std::vector<double> lmin, lmax, enorm, delta;
    std::size_t ok = 0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
      std::mt19937_64 rng(seed + trial);
      std::uniform_real_distribution<double> uni(-eta, 2.0 + eta);
      Matrix d0(n, n), d1(n, n), e0(n, n);
      for (std::size_t s = 0; s < pt.samples; ++s) {
        const double t = uni(rng);
        basis.evaluate(0, t, p0);
        basis.evaluate(1, t, p1);
        for (std::size_t a = 0; a < n; ++a) {
          auto r0 = d0.row(a);
          auto r1 = d1.row(a);
          auto re = e0.row(a);
          for (std::size_t b = 0; b < n; ++b) {
            r0[b] += p0[a] * p0[b];
            r1[b] += p1[a] * p1[b];
            re[b] += p1[a] * p0[b];
          }
        }
      }
      const double norm = m * scale;
      d0 *= 1.0 / norm;
      d1 *= 1.0 / norm;
      e0 *= 1.0 / norm;
      const EigenRange r0 = eigen_range(d0), r1 = eigen_range(d1);
      const double lo = std::min(r0.min, r1.min), hi = std::max(r0.max, r1.max);
      const double dl = std::max(1.0 - lo, hi - 1.0);
      lmin.push_back(lo);
      lmax.push_back(hi);
      enorm.push_back(spectral_norm(e0));
      delta.push_back(dl);
      if (dl <= delta_target) ++ok;
    }
    pt.lambda_min = quantiles(lmin);
    pt.lambda_max = quantiles(lmax);
    pt.e_norm = quantiles(enorm);
    pt.delta = quantiles(delta);
    pt.success = static_cast<double>(ok) / static_cast<double>(trials);
    if (!result.required_m && pt.success >= 1.0 - 3.0 * p_target) result.required_m = m;
    result.points.push_back(std::move(pt));
  }
  return result;
}

}  // namespace streamrec
