#include "streamrec/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "streamrec/errors.hpp"

namespace streamrec {

namespace detail {

class BasisImpl {
 public:
  virtual ~BasisImpl() = default;
  virtual void evaluate_local(double u, std::span<double> out) const = 0;

  BasisDescriptor descriptor;
  std::vector<double> breakpoints;
  Matrix gram;
};

}  // namespace detail

namespace {

constexpr double kPi = std::numbers::pi;

bool outside(double u, double eta) { return u < -eta || u > 1.0 + eta; }

// ---------------------------------------------------------------------------
// LOT: psi_{0,n}(u) = g(u) sqrt(2) cos(pi (n - 1/2) u)

class LotImpl final : public detail::BasisImpl {
 public:
  void evaluate_local(double u, std::span<double> out) const override {
    const double eta = descriptor.eta;
    if (outside(u, eta)) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    const double g = window_eval(WindowSpec{eta}, u) * std::numbers::sqrt2;
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = g * std::cos(kPi * (static_cast<double>(i) + 0.5) * u);
    }
  }
};

// ---------------------------------------------------------------------------
// Slepian-LOT: eigenfunctions of the band-and-fold kernel, evaluated through
// their Nystrom extension psi_n(u) = sum_w [Pc_w(u) C_c(w,n) + Ps_w(u) C_s(w,n)]
// where Pc_w, Ps_w are the fold projections of cos(2 pi w u), sin(2 pi w u).

struct FoldedSinusoid {
  double c = 0.0;
  double s = 0.0;
};

FoldedSinusoid fold_sinusoid(double omega, double u, double eta, double g_u) {
  const double arg = 2.0 * kPi * omega;
  if (u <= eta) {
    // [-eta, eta]: g(u) x(u) + g(-u) x(-u)
    const double g_m = window_eval(WindowSpec{eta}, -u);
    const double cu = std::cos(arg * u);
    const double su = std::sin(arg * u);
    return {g_u * (g_u + g_m) * cu, g_u * (g_u - g_m) * su};
  }
  if (u < 1.0 - eta) {
    return {g_u * std::cos(arg * u), g_u * std::sin(arg * u)};
  }
  // [1 - eta, 1 + eta]: g(u) x(u) - g(2 - u) x(2 - u)
  const double g_r = window_eval(WindowSpec{eta}, 2.0 - u);
  const double v = 2.0 - u;
  return {g_u * (g_u * std::cos(arg * u) - g_r * std::cos(arg * v)),
          g_u * (g_u * std::sin(arg * u) - g_r * std::sin(arg * v))};
}

class SlepianImpl final : public detail::BasisImpl {
 public:
  std::vector<double> freqs;  // positive half of the frequency rule
  Matrix coef_cos;            // freqs x N
  Matrix coef_sin;            // freqs x N

  void evaluate_local(double u, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    const double eta = descriptor.eta;
    if (outside(u, eta)) return;
    const double g_u = window_eval(WindowSpec{eta}, u);
    if (g_u == 0.0) return;
    const std::size_t n = out.size();
    for (std::size_t f = 0; f < freqs.size(); ++f) {
      const auto p = fold_sinusoid(freqs[f], u, eta, g_u);
      auto cc = coef_cos.row(f);
      auto cs = coef_sin.row(f);
      for (std::size_t i = 0; i < n; ++i) out[i] += p.c * cc[i] + p.s * cs[i];
    }
  }
};

// ---------------------------------------------------------------------------
// Shift-invariant Daubechies-4 packets: psi_{0,n}(u) = N phi_c(N u - n + 1/2)
// with phi_c(x) = phi(x + 3/2) centred on [-3/2, 3/2].

constexpr int kDyadicLevel = 12;
constexpr std::size_t kDyadicPerUnit = std::size_t{1} << kDyadicLevel;

const std::vector<double>& d4_table() {
  static const std::vector<double> table = [] {
    const double r3 = std::sqrt(3.0);
    const double c[4] = {(1.0 + r3) / 4.0, (3.0 + r3) / 4.0, (3.0 - r3) / 4.0, (1.0 - r3) / 4.0};
    std::vector<double> v(3 * kDyadicPerUnit + 1, 0.0);
    v[1 * kDyadicPerUnit] = (1.0 + r3) / 2.0;
    v[2 * kDyadicPerUnit] = (1.0 - r3) / 2.0;
    // Level l fills the odd multiples of 2^-l: phi(x) = sum_j c_j phi(2x - j).
    for (int level = 1; level <= kDyadicLevel; ++level) {
      const std::size_t step = kDyadicPerUnit >> level;  // index spacing of the new points
      for (std::size_t i = step; i < v.size(); i += 2 * step) {
        double s = 0.0;
        for (int j = 0; j < 4; ++j) {
          // 2x - j in table units: 2i - j * kDyadicPerUnit
          const long idx = 2 * static_cast<long>(i) - j * static_cast<long>(kDyadicPerUnit);
          if (idx > 0 && idx < static_cast<long>(v.size())) s += c[j] * v[static_cast<std::size_t>(idx)];
        }
        v[i] = s;
      }
    }
    return v;
  }();
  return table;
}

class ShiftInvariantImpl final : public detail::BasisImpl {
 public:
  void evaluate_local(double u, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    const double eta = descriptor.eta;
    if (outside(u, eta)) return;
    const double n_scale = static_cast<double>(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      // n = i + 1: phi(N u - n + 1/2 + 3/2) = phi(N u - i + 1)
      out[i] = n_scale * daubechies4_phi(n_scale * u - static_cast<double>(i) + 1.0);
    }
  }
};

Matrix d4_gram(std::size_t n) {
  // Exact Gram of the piecewise-linear interpolant: <psi_n, psi_m> = N a(m - n)
  // with a the autocorrelation of phi at integer lags.
  const auto& v = d4_table();
  const double h = 1.0 / static_cast<double>(kDyadicPerUnit);
  auto autocorr = [&](std::size_t lag) {
    const std::size_t off = lag * kDyadicPerUnit;
    double s = 0.0;
    for (std::size_t i = 0; i + 1 + off < v.size(); ++i) {
      const double f0 = v[i + off], f1 = v[i + off + 1], g0 = v[i], g1 = v[i + 1];
      s += h / 6.0 * (2.0 * f0 * g0 + f0 * g1 + f1 * g0 + 2.0 * f1 * g1);
    }
    return s;
  };
  const double a[3] = {autocorr(0), autocorr(1), autocorr(2)};
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t lag = i > j ? i - j : j - i;
      g(i, j) = lag < 3 ? static_cast<double>(n) * a[lag] : 0.0;
    }
  return g;
}

void validate_eta(double eta) {
  if (!(eta > 0.0 && eta <= 0.5)) throw std::invalid_argument("basis: eta must be in (0, 1/2]");
}

std::vector<double> window_breakpoints(double eta) {
  std::vector<double> b{-eta, eta, 1.0 - eta, 1.0 + eta};
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

// Upper-triangular inverse transpose of a Cholesky factor: T = L^{-T}.
Matrix inverse_transpose_lower(const Matrix& l) {
  const std::size_t n = l.rows();
  Matrix t(n, n);
  // Solve L^T x = e_j by back substitution for every column j.
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t ii = n; ii-- > 0;) {
      double s = ii == j ? 1.0 : 0.0;
      for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * t(k, j);
      t(ii, j) = s / l(ii, ii);
    }
  }
  return t;
}

double golden_max(const std::function<double(double)>& f, double lo, double hi) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  return std::max(f1, f2);
}

double flatness_impl(const PacketBasis& basis, std::size_t grid_size, bool two_packets) {
  const std::size_t n = basis.size();
  const double eta = basis.eta();
  const Cholesky gram(basis.gram());
  Vector values(n);
  auto energy = [&](long k, double t) {
    basis.evaluate(k, t, values);
    Vector y = values;
    y = gram.solve(y);
    return dot(values, y);
  };
  auto f = [&](double t) { return energy(0, t) + (two_packets ? energy(1, t) : 0.0); };

  const double lo = -eta;
  const double hi = two_packets ? 2.0 + eta : 1.0 + eta;
  const std::size_t points = std::max(grid_size, 64 * n);
  const double h = (hi - lo) / static_cast<double>(points - 1);
  double best = -1.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < points; ++i) {
    const double v = f(lo + h * static_cast<double>(i));
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  const double a = lo + h * static_cast<double>(arg == 0 ? 0 : arg - 1);
  const double b = lo + h * static_cast<double>(std::min(arg + 1, points - 1));
  best = std::max(best, golden_max(f, a, b));
  return best / static_cast<double>(n);
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(BasisFamily family) {
  switch (family) {
    case BasisFamily::LOT: return "lot";
    case BasisFamily::SlepianLOT: return "slepian-lot";
    case BasisFamily::ShiftInvariant: return "shift-invariant";
  }
  return "unknown";
}

BasisFamily basis_family_from_string(const std::string& name) {
  if (name == "lot") return BasisFamily::LOT;
  if (name == "slepian-lot") return BasisFamily::SlepianLOT;
  if (name == "shift-invariant") return BasisFamily::ShiftInvariant;
  throw std::invalid_argument("unknown basis family '" + name + "'");
}

double window_ramp(double x) {
  const double s = std::sin(0.5 * kPi * x);
  return std::sin(0.5 * kPi * s * s);
}

double window_eval(const WindowSpec& spec, double t) {
  const double eta = spec.eta;
  if (t < -eta || t > 1.0 + eta) return 0.0;
  if (t <= eta) return window_ramp((t + eta) / (2.0 * eta));
  if (t < 1.0 - eta) return 1.0;
  return window_ramp((1.0 + eta - t) / (2.0 * eta));
}

double daubechies4_phi(double x) {
  if (!(x > 0.0 && x < 3.0)) return 0.0;
  const auto& v = d4_table();
  const double pos = x * static_cast<double>(kDyadicPerUnit);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= v.size()) return v.back();
  const double frac = pos - static_cast<double>(i);
  return v[i] + frac * (v[i + 1] - v[i]);
}

PacketBasis::PacketBasis(std::shared_ptr<const detail::BasisImpl> impl) : impl_(std::move(impl)) {}

BasisFamily PacketBasis::family() const { return impl_->descriptor.family; }
std::size_t PacketBasis::size() const { return impl_->descriptor.n; }
double PacketBasis::eta() const { return impl_->descriptor.eta; }
const BasisDescriptor& PacketBasis::descriptor() const { return impl_->descriptor; }
const std::vector<double>& PacketBasis::breakpoints() const { return impl_->breakpoints; }
const Matrix& PacketBasis::gram() const { return impl_->gram; }

std::pair<double, double> PacketBasis::support(long k) const {
  const auto kk = static_cast<double>(k);
  return {kk - eta(), kk + 1.0 + eta()};
}

void PacketBasis::evaluate_local(double u, std::span<double> out) const {
  if (out.size() != size()) throw std::invalid_argument("PacketBasis::evaluate: output size mismatch");
  impl_->evaluate_local(u, out);
}

void PacketBasis::evaluate(long k, double t, std::span<double> out) const {
  evaluate_local(t - static_cast<double>(k), out);
}

Vector PacketBasis::evaluate(long k, double t) const {
  Vector out(size());
  evaluate(k, t, out);
  return out;
}

double PacketBasis::eval(long k, std::size_t n, double t) const {
  if (n < 1 || n > size()) throw std::invalid_argument("PacketBasis::eval: n must be in 1..=N");
  Vector out(size());
  evaluate(k, t, out);
  return out[n - 1];
}

PacketBasis build_lot(std::size_t n, double eta) {
  validate_eta(eta);
  if (n < 1) throw std::invalid_argument("build_lot: N must be positive");
  auto impl = std::make_shared<LotImpl>();
  impl->descriptor = BasisDescriptor{BasisFamily::LOT, n, eta, 0.0, 0, Generator::Daubechies4};
  impl->breakpoints = window_breakpoints(eta);
  PacketBasis partial(impl);
  impl->gram = quadrature_gram(partial, packet_quadrature(partial, 0));
  return PacketBasis(std::move(impl));
}

SlepianBuild build_slepian_lot(double omega, double eta, std::size_t n, std::size_t grid_size) {
  validate_eta(eta);
  if (!(omega > 0.0)) throw std::invalid_argument("build_slepian_lot: omega must be positive");
  if (n < 1) throw std::invalid_argument("build_slepian_lot: N must be positive");
  if (static_cast<double>(grid_size) < 8.0 * (2.0 * omega / kPi + static_cast<double>(n)))
    throw std::invalid_argument("build_slepian_lot: grid_size below 8 (2 omega / pi + N)");
  if (grid_size > 2048) throw std::invalid_argument("build_slepian_lot: grid_size above 2048");

  // Time grid on [-eta, 1 + eta], panels split at the window breakpoints.
  const std::size_t order = kDefaultQuadratureOrder;
  const std::size_t panels = std::max<std::size_t>(3, grid_size / order);
  const double total = 1.0 + 2.0 * eta;
  const auto edge_panels = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(panels * 2.0 * eta / total)));
  const std::size_t mid_panels = panels > 2 * edge_panels ? panels - 2 * edge_panels : 1;
  QuadratureRule grid = composite_gauss_legendre(-eta, eta, edge_panels, order);
  if (eta < 0.5) grid.append(composite_gauss_legendre(eta, 1.0 - eta, mid_panels, order));
  grid.append(composite_gauss_legendre(1.0 - eta, 1.0 + eta, edge_panels, order));
  const std::size_t g_size = grid.size();
  if (n > g_size) throw std::invalid_argument("build_slepian_lot: N exceeds the grid size");

  // Frequency rule on [-omega, omega], at least 4 panels per unit, even panel
  // count so the nodes come in +/- pairs.
  auto f_panels = static_cast<std::size_t>(std::ceil(8.0 * omega));
  if (f_panels % 2 == 1) ++f_panels;
  const QuadratureRule freq = composite_gauss_legendre(-omega, omega, f_panels, order);
  const std::size_t f_size = freq.size();

  // H = [Pc sqrt(w) | Ps sqrt(w)] so that K = H H^T (real part).
  Matrix hc(g_size, f_size), hs(g_size, f_size);
  for (std::size_t i = 0; i < g_size; ++i) {
    const double u = grid.nodes[i];
    const double g_u = window_eval(WindowSpec{eta}, u);
    for (std::size_t f = 0; f < f_size; ++f) {
      const auto p = fold_sinusoid(freq.nodes[f], u, eta, g_u);
      const double sw = std::sqrt(freq.weights[f]);
      hc(i, f) = p.c * sw;
      hs(i, f) = p.s * sw;
    }
  }
  Matrix m(g_size, g_size);
  double re_max = 0.0, im_max = 0.0;
  for (std::size_t i = 0; i < g_size; ++i) {
    auto ci = hc.row(i);
    auto si = hs.row(i);
    for (std::size_t j = i; j < g_size; ++j) {
      auto cj = hc.row(j);
      auto sj = hs.row(j);
      double re = 0.0, im = 0.0;
      for (std::size_t f = 0; f < f_size; ++f) {
        re += ci[f] * cj[f] + si[f] * sj[f];
        im += si[f] * cj[f] - ci[f] * sj[f];
      }
      re_max = std::max(re_max, std::abs(re));
      im_max = std::max(im_max, std::abs(im));
      const double scaled = re * std::sqrt(grid.weights[i] * grid.weights[j]);
      m(i, j) = scaled;
      m(j, i) = scaled;
    }
  }

  auto eig = jacobi_eigh(m);

  SlepianSpectrum spectrum;
  spectrum.omega = omega;
  spectrum.eigenvalues = eig.values;
  spectrum.imaginary_magnitude = re_max > 0.0 ? im_max / re_max : 0.0;
  spectrum.grid = grid;

  // Grid values of the leading eigenfunctions, sign fixed by the largest entry.
  Matrix psi_grid(g_size, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t arg = 0;
    for (std::size_t i = 0; i < g_size; ++i)
      if (std::abs(eig.vectors(i, j)) > std::abs(eig.vectors(arg, j))) arg = i;
    const double sign = eig.vectors(arg, j) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < g_size; ++i) psi_grid(i, j) = sign * eig.vectors(i, j) / std::sqrt(grid.weights[i]);
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!(eig.values[j] > 0.0)) throw GridTooCoarse("build_slepian_lot: non-positive leading eigenvalue");
  }

  // Nystrom extension over the positive frequencies (the kernel is even in w).
  auto impl = std::make_shared<SlepianImpl>();
  impl->descriptor = BasisDescriptor{BasisFamily::SlepianLOT, n, eta, omega, grid_size, Generator::Daubechies4};
  impl->breakpoints = window_breakpoints(eta);
  const std::size_t half = f_size / 2;
  impl->freqs.assign(freq.nodes.begin() + static_cast<long>(half), freq.nodes.end());
  impl->coef_cos = Matrix(half, n);
  impl->coef_sin = Matrix(half, n);
  for (std::size_t f = 0; f < half; ++f) {
    const std::size_t full = half + f;
    const double sw = std::sqrt(freq.weights[full]);
    for (std::size_t j = 0; j < n; ++j) {
      double ac = 0.0, as = 0.0;
      for (std::size_t i = 0; i < g_size; ++i) {
        const double wpsi = grid.weights[i] * psi_grid(i, j);
        ac += hc(i, full) * wpsi;
        as += hs(i, full) * wpsi;
      }
      // hc already carries sqrt(w_f); the second sqrt(w_f) completes w_f, the
      // factor 2 accounts for the mirrored negative frequency.
      impl->coef_cos(f, j) = 2.0 * sw * ac / eig.values[j];
      impl->coef_sin(f, j) = 2.0 * sw * as / eig.values[j];
    }
  }

  // Re-orthonormalise the extended functions on the construction grid.
  Matrix ext(g_size, n);
  for (std::size_t i = 0; i < g_size; ++i) impl->evaluate_local(grid.nodes[i], ext.row(i));
  Matrix g0(n, n);
  for (std::size_t i = 0; i < g_size; ++i) {
    auto r = ext.row(i);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) g0(a, b) += grid.weights[i] * r[a] * r[b];
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) g0(a, b) = g0(b, a) = 0.5 * (g0(a, b) + g0(b, a));
  const Matrix t = inverse_transpose_lower(Cholesky(g0).lower());
  impl->coef_cos = impl->coef_cos * t;
  impl->coef_sin = impl->coef_sin * t;
  spectrum.eigenfunctions = ext * t;

  // Independent check on a finer, differently placed rule.
  PacketBasis partial(impl);
  const QuadratureRule check =
      composite_gauss_legendre(impl->breakpoints, 12, 2.0 * total / (3.0 * static_cast<double>(panels)));
  impl->gram = quadrature_gram(partial, check);
  const double deviation = max_abs(impl->gram - Matrix::identity(n));
  if (deviation > 1e-6) {
    throw GridTooCoarse("build_slepian_lot: Gram deviates from identity by " + std::to_string(deviation));
  }
  return {PacketBasis(std::move(impl)), std::move(spectrum)};
}

PacketBasis build_shift_invariant(Generator generator, std::size_t n) {
  if (generator != Generator::Daubechies4) throw std::invalid_argument("build_shift_invariant: unknown generator");
  if (n < 4) throw std::invalid_argument("build_shift_invariant: N must be at least 4");
  auto impl = std::make_shared<ShiftInvariantImpl>();
  const double s = 1.5;
  const double nn = static_cast<double>(n);
  const double eta = s / nn - 1.0 / (2.0 * nn);
  impl->descriptor = BasisDescriptor{BasisFamily::ShiftInvariant, n, eta, 0.0, 0, generator};
  for (long j = -1; j <= static_cast<long>(n) + 1; ++j) impl->breakpoints.push_back(static_cast<double>(j) / nn);
  impl->gram = d4_gram(n);
  return PacketBasis(std::move(impl));
}

PacketBasis make_basis(const BasisDescriptor& d) {
  switch (d.family) {
    case BasisFamily::LOT: return build_lot(d.n, d.eta);
    case BasisFamily::SlepianLOT: return build_slepian_lot(d.omega, d.eta, d.n, d.grid_size).basis;
    case BasisFamily::ShiftInvariant: return build_shift_invariant(d.generator, d.n);
  }
  throw std::invalid_argument("make_basis: unknown family");
}

QuadratureRule packet_quadrature(const PacketBasis& basis, long k, std::size_t order) {
  std::vector<double> b = basis.breakpoints();
  for (double& x : b) x += static_cast<double>(k);
  const auto n = static_cast<double>(basis.size());
  // piecewise linear between dyadic nodes: two points per cell are exact
  if (basis.family() == BasisFamily::ShiftInvariant)
    return composite_gauss_legendre(b, 2, 1.0 / (n * static_cast<double>(kDyadicPerUnit)));
  return composite_gauss_legendre(b, order, 1.0 / (4.0 * n));
}

Matrix quadrature_gram(const PacketBasis& basis, const QuadratureRule& rule) {
  const std::size_t n = basis.size();
  Matrix g(n, n);
  Vector v(n);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    basis.evaluate_local(rule.nodes[q], v);
    const double w = rule.weights[q];
    for (std::size_t a = 0; a < n; ++a) {
      const double wa = w * v[a];
      if (wa == 0.0) continue;
      auto row = g.row(a);
      for (std::size_t b = 0; b < n; ++b) row[b] += wa * v[b];
    }
  }
  return g;
}

Vector packet_project(const PacketBasis& basis, const std::function<double(double)>& x, long k) {
  const QuadratureRule rule = packet_quadrature(basis, k);
  const std::size_t n = basis.size();
  Vector alpha(n, 0.0), v(n);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    basis.evaluate(k, rule.nodes[q], v);
    const double wx = rule.weights[q] * x(rule.nodes[q]);
    for (std::size_t i = 0; i < n; ++i) alpha[i] += wx * v[i];
  }
  return alpha;
}

double synthesize(const PacketBasis& basis, std::span<const double> coefficients, long k, double t) {
  Vector v(basis.size());
  basis.evaluate(k, t, v);
  return dot(v, coefficients);
}

double fold_project(const WindowSpec& window, const std::function<double(double)>& x, long k, double t) {
  const double eta = window.eta;
  const double kk = static_cast<double>(k);
  const double u = t - kk;
  const double g = window_eval(window, u);
  if (g == 0.0) return 0.0;
  double z;
  if (u <= eta) {
    z = g * x(t) + window_eval(window, -u) * x(2.0 * kk - t);
  } else if (u < 1.0 - eta) {
    z = x(t);
  } else {
    z = g * x(t) - window_eval(window, 2.0 - u) * x(2.0 * kk + 2.0 - t);
  }
  return g * z;
}

double flatness_beta(const PacketBasis& basis, std::size_t grid_size) {
  return flatness_impl(basis, grid_size, true);
}

double flatness_beta_single(const PacketBasis& basis, std::size_t grid_size) {
  return flatness_impl(basis, grid_size, false);
}

}  // namespace streamrec
