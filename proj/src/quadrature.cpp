#include "streamrec/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace streamrec {

double QuadratureRule::integrate(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
  return s;
}

void QuadratureRule::append(const QuadratureRule& other) {
  nodes.insert(nodes.end(), other.nodes.begin(), other.nodes.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
}

QuadratureRule gauss_legendre(double a, double b, std::size_t order) {
  if (!(a < b)) throw std::invalid_argument("gauss_legendre: need a < b");
  if (order < 2 || order > 32) throw std::invalid_argument("gauss_legendre: order must be in 2..32");

  // Newton iteration on P_order from the Chebyshev-like initial guess; nodes are
  // symmetric so only half are computed.
  const std::size_t n = order;
  std::vector<double> x(n), w(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / static_cast<double>(j);
      }
      dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0, p1 = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / static_cast<double>(j);
    }
    dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
    const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = wi;
    w[n - 1 - i] = wi;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] = mid + half * x[i];
    rule.weights[i] = half * w[i];
  }
  return rule;
}

QuadratureRule composite_gauss_legendre(double a, double b, std::size_t panels, std::size_t order) {
  if (panels == 0) throw std::invalid_argument("composite_gauss_legendre: need at least one panel");
  QuadratureRule rule;
  rule.nodes.reserve(panels * order);
  rule.weights.reserve(panels * order);
  const double h = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + h * static_cast<double>(p);
    const double hi = p + 1 == panels ? b : a + h * static_cast<double>(p + 1);
    rule.append(gauss_legendre(lo, hi, order));
  }
  return rule;
}

QuadratureRule composite_gauss_legendre(std::span<const double> breakpoints, std::size_t order,
                                        double max_panel_width) {
  if (breakpoints.size() < 2) throw std::invalid_argument("composite_gauss_legendre: need two breakpoints");
  if (!(max_panel_width > 0.0)) throw std::invalid_argument("composite_gauss_legendre: bad panel width");
  QuadratureRule rule;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    if (b < a) throw std::invalid_argument("composite_gauss_legendre: breakpoints must be sorted");
    if (b == a) continue;
    const auto panels = static_cast<std::size_t>(std::ceil((b - a) / max_panel_width - 1e-9));
    rule.append(composite_gauss_legendre(a, b, std::max<std::size_t>(panels, 1), order));
  }
  return rule;
}

}  // namespace streamrec
