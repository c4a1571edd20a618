#pragma once

#include <complex>
#include <compare>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "momentsnet/grid.hpp"

namespace momentsnet {

enum class Family {
  Geometric,
  Legendre,
  Zernike,
  Tchebichef,
  Krawtchouk,
  DualHahn,
  PCET,
  PCT,
  PST,
  GPCET,
  GPCT,
  GPST,
  PCA,  // learned filters, see pca.hpp
};

inline constexpr Family kMomentFamilies[] = {
    Family::Geometric, Family::Legendre,   Family::Zernike, Family::Tchebichef,
    Family::Krawtchouk, Family::DualHahn,  Family::PCET,    Family::PCT,
    Family::PST,       Family::GPCET,      Family::GPCT,    Family::GPST,
};

std::string_view family_name(Family family);
std::optional<Family> parse_family(std::string_view name);

/// Unit-disk families: Zernike and the (generic) polar harmonic transforms.
bool is_circular(Family family);
/// Lattice families: Tchebichef, Krawtchouk, dual Hahn.
bool is_discrete(Family family);
/// Families whose kernels carry an angular phase e^{-jm theta}.
bool is_complex(Family family);

struct FamilyParams {
  double krawtchouk_p1 = 0.5;  // rows
  double krawtchouk_p2 = 0.5;  // columns
  double hahn_a = 0.0;         // b is always a + lattice size
  double hahn_c = 0.0;
  double gpht_s = 2.0;
};

struct MomentFamily {
  Family tag = Family::Zernike;
  FamilyParams params{};

  /// Throws ParameterError when the family parameters are out of range.
  void validate() const;
};

struct OrderIndex {
  int n = 0;
  int m = 0;

  friend auto operator<=>(const OrderIndex&, const OrderIndex&) = default;
};

/// Total degree used to rank orders: n for Zernike (the radial degree, which
/// already bounds |m|), n + |m| for every other family.
int order_degree(Family family, OrderIndex index);

/// True when (n, m) belongs to the family's index domain.
bool is_valid_order(Family family, OrderIndex index);

/// The first `count` family-valid orders, ranked by ascending degree, then n,
/// then m. The result for count is always a prefix of the result for count+1.
std::vector<OrderIndex> enumerate_orders(Family family, std::size_t count);

/// Same ranking restricted to n < max_n and m < max_m (lattice families).
/// Throws CapacityError when fewer than `count` orders exist.
std::vector<OrderIndex> enumerate_orders(Family family, std::size_t count,
                                         int max_n, int max_m);

// ---------------------------------------------------------------------------
// Basis evaluators

/// Zernike radial polynomial E_{n|m|}(r) from its explicit factorial sum.
double zernike_radial(int n, int m_abs, double r);

/// Legendre polynomial P_n(x) from its explicit factorial sum.
double legendre_poly(int n, double x);

/// Discrete Tchebichef polynomial t_n(x) on {0, ..., N-1}.
double tchebichef_poly(int n, int x, int N);
/// Squared norm rho(n, N) = N (N^2-1)(N^2-4)...(N^2-n^2) / (2n+1).
double tchebichef_norm(int n, int N);

/// Weighted Krawtchouk polynomial Kbar_n(x; p, N) for 0 <= n, x <= N.
/// The family is orthonormal over x = 0..N.
double krawtchouk_weighted(int n, int x, double p, int N);

/// Weighted dual Hahn polynomial at lattice point s in {a, a+1, ..., b-1}
/// (N = b - a points), orthonormal over that lattice for 0 <= n < N.
double dual_hahn_weighted(int n, double s, double a, double b, double c);

enum class PhtVariant { Exponential, Cosine, Sine };

/// Radial factor of PCET / PCT / PST.
std::complex<double> pht_radial(PhtVariant variant, int n, double r);

/// Radial factor of GPCET / GPCT / GPST including the sqrt(s r^{s-2} / 2pi)
/// weight. The weight is defined as 0 at r = 0 when s < 2.
std::complex<double> gpht_radial(PhtVariant variant, int n, double r, double s);

// ---------------------------------------------------------------------------
// Kernel banks

/// How complex moments are reduced to a real feature value.
enum class ComplexReduction { Modulus, RealPart };

/// Ordered set of sampled filters over a rows x cols patch grid.
///
/// Filters hold the kernel values themselves (normalization prefactors
/// included, conjugation applied); the quadrature weight lives in
/// `cell_area()` and is applied by `moment_project`. Immutable once built.
class KernelBank {
 public:
  KernelBank(MomentFamily family, std::size_t rows, std::size_t cols,
             std::vector<ComplexGrid> filters, std::vector<OrderIndex> orders,
             double cell_area,
             ComplexReduction reduction = ComplexReduction::Modulus);

  const MomentFamily& family() const noexcept { return family_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return filters_.size(); }
  double cell_area() const noexcept { return cell_area_; }
  bool complex_valued() const noexcept { return complex_valued_; }
  ComplexReduction reduction() const noexcept { return reduction_; }

  const ComplexGrid& filter(std::size_t j) const { return filters_.at(j); }
  const OrderIndex& order(std::size_t j) const { return orders_.at(j); }
  std::span<const ComplexGrid> filters() const noexcept { return filters_; }
  std::span<const OrderIndex> orders() const noexcept { return orders_; }

  /// Projects a flattened row-major patch onto every filter and writes the
  /// reduced values into `out` (length size()). No shape checks.
  void project(std::span<const double> patch, std::span<double> out) const;

  /// Filter-major flattened weights with the cell area folded in.
  std::span<const double> real_weights() const noexcept { return re_; }
  std::span<const double> imag_weights() const noexcept { return im_; }

 private:
  MomentFamily family_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<ComplexGrid> filters_;
  std::vector<OrderIndex> orders_;
  double cell_area_;
  ComplexReduction reduction_;
  bool complex_valued_ = false;
  std::vector<double> re_;
  std::vector<double> im_;
};

/// Samples `count` filters of `family` on a rows x cols patch.
///
/// Continuous Cartesian families use pixel centres mapped into [-1, 1]^2 with
/// cell area (2/rows)(2/cols); disk families use the same mapping and zero
/// every pixel whose centre lies outside the unit disk; lattice families use
/// the integer grid with N = rows and M = cols.
KernelBank build_kernel_bank(const MomentFamily& family, std::size_t rows,
                             std::size_t cols, std::size_t count,
                             ComplexReduction reduction = ComplexReduction::Modulus);

/// Bank sampled over the same grid as `build_kernel_bank` but for an explicit
/// order list (used for whole-image moment descriptors).
KernelBank build_kernel_bank(const MomentFamily& family, std::size_t rows,
                             std::size_t cols, std::vector<OrderIndex> orders,
                             ComplexReduction reduction = ComplexReduction::Modulus);

/// Discretised moment of `patch` against every filter in `bank`: the
/// cell-area weighted inner product, reduced to a real value for complex
/// families. Throws ShapeError on a size mismatch.
std::vector<double> moment_project(const RealGrid& patch, const KernelBank& bank);

/// Writes every filter as a plain-text matrix (row-major, space-separated,
/// blank line between filters). Complex banks write real and imaginary parts
/// as separate matrices.
void write_bank_text(std::ostream& out, const KernelBank& bank);

/// Pixel-centre coordinate in [-1, 1] for index i of an axis of length n.
double grid_coordinate(std::size_t i, std::size_t n);

}  // namespace momentsnet
