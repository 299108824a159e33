#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace streamrec {

struct QuadratureRule {
  std::vector<double> nodes;    // strictly increasing
  std::vector<double> weights;  // positive

  std::size_t size() const { return nodes.size(); }

  double integrate(const std::function<double(double)>& f) const;
  /// Appends another rule (used to glue panels together).
  void append(const QuadratureRule& other);
};

/// Gauss-Legendre rule of the given order (2..32) mapped to [a, b].
QuadratureRule gauss_legendre(double a, double b, std::size_t order);

/// Composite Gauss-Legendre rule. Every interval between consecutive breakpoints
/// is split into equal panels no wider than max_panel_width.
QuadratureRule composite_gauss_legendre(std::span<const double> breakpoints, std::size_t order,
                                        double max_panel_width);

/// Same, with a fixed number of panels on [a, b].
QuadratureRule composite_gauss_legendre(double a, double b, std::size_t panels, std::size_t order);

inline constexpr std::size_t kDefaultQuadratureOrder = 10;

}  // namespace streamrec
