#pragma once

// Packetized basis families. Every family is a set of N functions psi_{0,n}
// supported on [-eta, 1 + eta]; packet k is the integer shift
// psi_{k,n}(t) = psi_{0,n}(t - k).

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "streamrec/linalg.hpp"
#include "streamrec/quadrature.hpp"

namespace streamrec {

enum class BasisFamily { LOT, SlepianLOT, ShiftInvariant };
enum class Generator { Daubechies4 };

std::string to_string(BasisFamily family);
BasisFamily basis_family_from_string(const std::string& name);

/// Smooth overlapping window g on [-eta, 1 + eta] built from the ramp
/// r(x) = sin(pi/2 * sin^2(pi/2 * x)).
struct WindowSpec {
  double eta = 0.25;
};

double window_ramp(double x);
double window_eval(const WindowSpec& spec, double t);

/// Everything needed to rebuild a basis exactly.
struct BasisDescriptor {
  BasisFamily family = BasisFamily::LOT;
  std::size_t n = 32;
  double eta = 0.25;          // ignored for ShiftInvariant (derived from the generator)
  double omega = 16.0;        // SlepianLOT bandlimit, cycles per unit time
  std::size_t grid_size = 1024;  // SlepianLOT time grid
  Generator generator = Generator::Daubechies4;

  bool operator==(const BasisDescriptor&) const = default;
};

/// Eigen-data of the band-and-fold kernel used to build the Slepian-LOT family.
struct SlepianSpectrum {
  double omega = 0.0;
  Vector eigenvalues;           // descending, all grid_size of them
  double imaginary_magnitude = 0.0;  // max |Im K(s,t)| discarded by symmetrisation
  QuadratureRule grid;
  Matrix eigenfunctions;        // grid.size() x N, values of psi_{0,n} at grid nodes
};

namespace detail {
class BasisImpl;
}

class PacketBasis {
 public:
  explicit PacketBasis(std::shared_ptr<const detail::BasisImpl> impl);

  BasisFamily family() const;
  std::size_t size() const;
  double eta() const;
  const BasisDescriptor& descriptor() const;

  /// Support [k - eta, k + 1 + eta] of packet k.
  std::pair<double, double> support(long k) const;

  /// psi_{k,n}(t) with n in 1..=N.
  double eval(long k, std::size_t n, double t) const;
  /// All N functions of packet k at t.
  void evaluate(long k, double t, std::span<double> out) const;
  Vector evaluate(long k, double t) const;
  /// All N functions of packet 0 at local time u.
  void evaluate_local(double u, std::span<double> out) const;

  /// Points in local time where the functions are not smooth; quadrature panels
  /// are aligned to them.
  const std::vector<double>& breakpoints() const;

  /// Gram matrix of {psi_{0,n}} as measured at construction.
  const Matrix& gram() const;

 private:
  std::shared_ptr<const detail::BasisImpl> impl_;
};

PacketBasis build_lot(std::size_t n, double eta);

struct SlepianBuild {
  PacketBasis basis;
  SlepianSpectrum spectrum;
};

/// Builds the Slepian-LOT family for bandlimit omega (cycles per unit time).
/// Throws GridTooCoarse when the interpolated eigenfunctions fail an
/// independent Gram check at 1e-6.
SlepianBuild build_slepian_lot(double omega, double eta, std::size_t n, std::size_t grid_size);

PacketBasis build_shift_invariant(Generator generator, std::size_t n);

PacketBasis make_basis(const BasisDescriptor& descriptor);

/// Composite Gauss-Legendre rule on the support of packet k with panels aligned
/// to the basis breakpoints and no wider than 1/(4N). Shift-invariant packets
/// get a two-point rule on every dyadic cell of the generator table instead.
QuadratureRule packet_quadrature(const PacketBasis& basis, long k,
                                 std::size_t order = kDefaultQuadratureOrder);

/// Gram matrix of {psi_{0,n}} under the given rule.
Matrix quadrature_gram(const PacketBasis& basis, const QuadratureRule& rule);

/// alpha_{k,n} = integral of x * psi_{k,n} over the support of packet k.
Vector packet_project(const PacketBasis& basis, const std::function<double(double)>& x, long k);

/// Sum_n coefficients[n] * psi_{k,n}(t).
double synthesize(const PacketBasis& basis, std::span<const double> coefficients, long k, double t);

/// Orthogonal projection of x onto the packet space W_k (window + local
/// symmetric extension), evaluated at t.
double fold_project(const WindowSpec& window, const std::function<double(double)>& x, long k, double t);

/// Flatness: (1/N) max_t sum_n |psi_{k,n}(t)|^2 + |psi_{k+1,n}(t)|^2, computed in
/// an orthonormalised basis for the packet space (so non-orthonormal families
/// are handled through their Gram matrix).
double flatness_beta(const PacketBasis& basis, std::size_t grid_size);
/// Single-packet variant without the k+1 term.
double flatness_beta_single(const PacketBasis& basis, std::size_t grid_size);

/// Daubechies-4 scaling function on [0, 3] from dyadic refinement (level 12)
/// with linear interpolation between dyadic points.
double daubechies4_phi(double x);

}  // namespace streamrec
