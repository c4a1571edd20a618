#include "momentsnet/kernels.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "momentsnet/errors.hpp"
#include "momentsnet/special.hpp"

namespace momentsnet {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRadiusSlack = 1e-12;

struct FamilyEntry {
  Family family;
  std::string_view name;
};

constexpr FamilyEntry kFamilyNames[] = {
    {Family::Geometric, "geometric"}, {Family::Legendre, "legendre"},
    {Family::Zernike, "zernike"},     {Family::Tchebichef, "tchebichef"},
    {Family::Krawtchouk, "krawtchouk"}, {Family::DualHahn, "dualhahn"},
    {Family::PCET, "pcet"},           {Family::PCT, "pct"},
    {Family::PST, "pst"},             {Family::GPCET, "gpcet"},
    {Family::GPCT, "gpct"},           {Family::GPST, "gpst"},
    {Family::PCA, "pca"},
};

void check_radius(double r, const char* fn) {
  if (!(r >= 0.0 && r <= 1.0 + kRadiusSlack)) {
    throw ParameterError(std::string(fn) + ": radius " + std::to_string(r) +
                         " outside [0, 1]");
  }
}

PhtVariant pht_variant(Family family) {
  switch (family) {
    case Family::PCET:
    case Family::GPCET:
      return PhtVariant::Exponential;
    case Family::PCT:
    case Family::GPCT:
      return PhtVariant::Cosine;
    default:
      return PhtVariant::Sine;
  }
}

// Kernel value at a disk point, conjugated as the moment definitions require.
std::complex<double> circular_kernel(const MomentFamily& family, OrderIndex idx,
                                     double r, double theta) {
  const std::complex<double> angular = std::polar(1.0, -idx.m * theta);
  switch (family.tag) {
    case Family::Zernike:
      return (idx.n + 1) / kPi * zernike_radial(idx.n, std::abs(idx.m), r) * angular;
    case Family::PCET:
    case Family::PCT:
    case Family::PST:
      return std::conj(pht_radial(pht_variant(family.tag), idx.n, r)) * angular;
    case Family::GPCET:
    case Family::GPCT:
    case Family::GPST:
      return std::conj(gpht_radial(pht_variant(family.tag), idx.n, r,
                                   family.params.gpht_s)) * angular;
    default:
      throw ParameterError("not a disk family");
  }
}

double cartesian_kernel(Family family, OrderIndex idx, double x, double y) {
  switch (family) {
    case Family::Geometric:
      return std::pow(x, idx.n) * std::pow(y, idx.m);
    case Family::Legendre:
      return (2.0 * idx.n + 1.0) * (2.0 * idx.m + 1.0) / 4.0 *
             legendre_poly(idx.n, x) * legendre_poly(idx.m, y);
    default:
      throw ParameterError("not a Cartesian family");
  }
}

std::vector<double> lattice_basis(const MomentFamily& family, int n, int size,
                                  bool column_axis) {
  std::vector<double> values(static_cast<std::size_t>(size));
  const auto& p = family.params;
  switch (family.tag) {
    case Family::Tchebichef: {
      const double norm = tchebichef_norm(n, size);
      for (int x = 0; x < size; ++x) values[x] = tchebichef_poly(n, x, size) / norm;
      break;
    }
    case Family::Krawtchouk: {
      const double prob = column_axis ? p.krawtchouk_p2 : p.krawtchouk_p1;
      for (int x = 0; x < size; ++x) values[x] = krawtchouk_weighted(n, x, prob, size - 1);
      break;
    }
    case Family::DualHahn: {
      const double a = p.hahn_a;
      for (int x = 0; x < size; ++x) {
        values[x] = dual_hahn_weighted(n, a + x, a, a + size, p.hahn_c);
      }
      break;
    }
    default:
      throw ParameterError("not a lattice family");
  }
  return values;
}

}  // namespace

std::string_view family_name(Family family) {
  for (const auto& e : kFamilyNames) {
    if (e.family == family) return e.name;
  }
  return "unknown";
}

std::optional<Family> parse_family(std::string_view name) {
  std::string key;
  for (char ch : name) {
    if (ch == '_' || ch == '-' || ch == ' ') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  if (key == "geometry") key = "geometric";
  if (key == "chebyshev") key = "tchebichef";
  if (key == "pcanet") key = "pca";
  for (const auto& e : kFamilyNames) {
    if (e.name == key) return e.family;
  }
  return std::nullopt;
}

bool is_circular(Family family) {
  switch (family) {
    case Family::Zernike:
    case Family::PCET:
    case Family::PCT:
    case Family::PST:
    case Family::GPCET:
    case Family::GPCT:
    case Family::GPST:
      return true;
    default:
      return false;
  }
}

bool is_discrete(Family family) {
  return family == Family::Tchebichef || family == Family::Krawtchouk ||
         family == Family::DualHahn;
}

bool is_complex(Family family) { return is_circular(family); }

void MomentFamily::validate() const {
  const auto& p = params;
  switch (tag) {
    case Family::Krawtchouk:
      if (!(p.krawtchouk_p1 > 0.0 && p.krawtchouk_p1 < 1.0) ||
          !(p.krawtchouk_p2 > 0.0 && p.krawtchouk_p2 < 1.0)) {
        throw ParameterError("krawtchouk: p1 and p2 must lie strictly inside (0, 1)");
      }
      break;
    case Family::DualHahn:
      if (!(p.hahn_a > -0.5)) throw ParameterError("dual hahn: requires a > -1/2");
      if (!(p.hahn_c < 1.0 + p.hahn_a)) throw ParameterError("dual hahn: requires c < 1 + a");
      break;
    case Family::GPCET:
    case Family::GPCT:
    case Family::GPST:
      if (!(p.gpht_s > 0.0)) throw ParameterError("generic polar harmonic: requires s > 0");
      break;
    default:
      break;
  }
}

int order_degree(Family family, OrderIndex index) {
  if (family == Family::Zernike) return index.n;
  return index.n + std::abs(index.m);
}

bool is_valid_order(Family family, OrderIndex idx) {
  if (idx.n < 0) return false;
  switch (family) {
    case Family::Zernike:
      return std::abs(idx.m) <= idx.n && (idx.n - std::abs(idx.m)) % 2 == 0;
    case Family::PCET:
    case Family::PCT:
    case Family::GPCET:
    case Family::GPCT:
      return true;
    case Family::PST:
    case Family::GPST:
      return idx.n >= 1;
    case Family::PCA:
      return idx.m == 0;
    default:
      return idx.m >= 0;
  }
}

namespace {

// All valid orders of exactly `degree`, ascending n then m.
void append_degree(Family family, int degree, int max_n, int max_m,
                   std::vector<OrderIndex>& out, std::size_t count) {
  auto push = [&](OrderIndex idx) {
    if (out.size() < count && idx.n < max_n && idx.m < max_m && is_valid_order(family, idx)) {
      out.push_back(idx);
    }
  };
  if (family == Family::Zernike) {
    for (int m = -degree; m <= degree; m += 2) push({degree, m});
  } else if (family == Family::PCA) {
    push({degree, 0});
  } else if (is_circular(family)) {
    for (int n = 0; n <= degree; ++n) {
      const int rest = degree - n;
      push({n, -rest});
      if (rest != 0) push({n, rest});
    }
  } else {
    for (int n = 0; n <= degree; ++n) push({n, degree - n});
  }
}

std::vector<OrderIndex> enumerate_impl(Family family, std::size_t count, int max_n,
                                       int max_m, int max_degree) {
  std::vector<OrderIndex> out;
  out.reserve(count);
  for (int degree = 0; out.size() < count && degree <= max_degree; ++degree) {
    append_degree(family, degree, max_n, max_m, out, count);
  }
  return out;
}

}  // namespace

std::vector<OrderIndex> enumerate_orders(Family family, std::size_t count) {
  constexpr int kUnbounded = 1 << 20;
  return enumerate_impl(family, count, kUnbounded, kUnbounded, kUnbounded);
}

std::vector<OrderIndex> enumerate_orders(Family family, std::size_t count, int max_n,
                                         int max_m) {
  auto out = enumerate_impl(family, count, max_n, max_m, max_n + max_m);
  if (out.size() < count) {
    throw CapacityError(std::string(family_name(family)) + ": requested " +
                        std::to_string(count) + " orders but only " +
                        std::to_string(out.size()) + " fit n < " + std::to_string(max_n) +
                        ", m < " + std::to_string(max_m));
  }
  return out;
}

// ---------------------------------------------------------------------------

double zernike_radial(int n, int m_abs, double r) {
  if (n < 0 || m_abs < 0 || m_abs > n || (n - m_abs) % 2 != 0) {
    throw IndexDomainError("zernike: invalid order (n=" + std::to_string(n) +
                           ", |m|=" + std::to_string(m_abs) + ")");
  }
  check_radius(r, "zernike_radial");
  // (n-k)! / (k! ((n+|m|)/2-k)! ((n-|m|)/2-k)!) = C(n-k, k) C(n-2k, (n+|m|)/2-k)
  long double sum = 0.0L;
  const int half_plus = (n + m_abs) / 2;
  const int half_minus = (n - m_abs) / 2;
  for (int k = 0; k <= half_minus; ++k) {
    const long double coeff = special::binomial(n - k, k) *
                              special::binomial(n - 2 * k, half_plus - k);
    const long double term = coeff * std::pow(static_cast<long double>(r), n - 2 * k);
    sum += (k % 2 == 0) ? term : -term;
  }
  return static_cast<double>(sum);
}

double legendre_poly(int n, double x) {
  if (n < 0) throw IndexDomainError("legendre: negative degree");
  // (2n-2k)! / (k! (n-k)! (n-2k)!) = C(n, k) C(2n-2k, n)
  long double sum = 0.0L;
  for (int k = 0; k <= n / 2; ++k) {
    const long double coeff = special::binomial(n, k) * special::binomial(2L * n - 2L * k, n);
    const long double term = coeff * std::pow(static_cast<long double>(x), n - 2 * k);
    sum += (k % 2 == 0) ? term : -term;
  }
  return static_cast<double>(std::ldexp(sum, -n));
}

double tchebichef_poly(int n, int x, int N) {
  if (n < 0 || n >= N) {
    throw IndexDomainError("tchebichef: order " + std::to_string(n) +
                           " outside [0, " + std::to_string(N - 1) + "]");
  }
  if (x < 0 || x >= N) {
    throw IndexDomainError("tchebichef: x = " + std::to_string(x) + " outside lattice");
  }
  long double sum = 0.0L;
  for (int k = 0; k <= std::min(n, x); ++k) {
    const long double term = special::binomial(N - 1 - k, n - k) *
                             special::binomial(n + k, n) * special::binomial(x, k);
    sum += ((n - k) % 2 == 0) ? term : -term;
  }
  return static_cast<double>(special::factorial(n) * sum);
}

double tchebichef_norm(int n, int N) {
  if (n < 0 || n >= N) {
    throw IndexDomainError("tchebichef: order " + std::to_string(n) +
                           " outside [0, " + std::to_string(N - 1) + "]");
  }
  const long double NN = static_cast<long double>(N) * N;
  long double rho = N;
  for (int i = 1; i <= n; ++i) rho *= NN - static_cast<long double>(i) * i;
  return static_cast<double>(rho / (2 * n + 1));
}

double krawtchouk_weighted(int n, int x, double p, int N) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ParameterError("krawtchouk: p = " + std::to_string(p) + " outside (0, 1)");
  }
  if (N < 0 || n < 0 || n > N || x < 0 || x > N) {
    throw IndexDomainError("krawtchouk: requires 0 <= n, x <= N");
  }
  const long double lp = p;
  // 2F1(-n, -x; -N; 1/p) terminates at k = min(n, x).
  long double term = 1.0L;
  long double sum = 1.0L;
  for (int k = 0; k < std::min(n, x); ++k) {
    term *= static_cast<long double>(k - n) * (k - x) /
            (static_cast<long double>(k - N) * (k + 1) * lp);
    sum += term;
  }
  // w(x) = C(N, x) p^x (1-p)^(N-x);  rho(n) = ((1-p)/p)^n / C(N, n)
  const long double log_w = std::log(special::binomial(N, x)) + x * std::log(lp) +
                            (N - x) * std::log1p(-lp);
  const long double log_rho = n * (std::log1p(-lp) - std::log(lp)) -
                              std::log(special::binomial(N, n));
  return static_cast<double>(sum * std::exp(0.5L * (log_w - log_rho)));
}

double dual_hahn_weighted(int n, double s, double a, double b, double c) {
  if (!(a > -0.5) || !(a < b) || !(c < 1.0 + a)) {
    throw ParameterError("dual hahn: parameters violate -1/2 < a < b, c < 1 + a");
  }
  const double lattice = b - a;
  const int N = static_cast<int>(std::lround(lattice));
  if (std::fabs(lattice - N) > 1e-9 || N < 1) {
    throw ParameterError("dual hahn: b - a must be a positive integer");
  }
  if (n < 0 || n >= N) {
    throw IndexDomainError("dual hahn: order " + std::to_string(n) + " outside [0, " +
                           std::to_string(N - 1) + "]");
  }
  const double offset = s - a;
  if (offset < -1e-9 || offset > N - 1 + 1e-9 || std::fabs(offset - std::round(offset)) > 1e-9) {
    throw IndexDomainError("dual hahn: s is not a lattice point of [a, b-1]");
  }

  const long double la = a, lb = b, lc = c, ls = s;
  // w_n = (a-b+1)_n (a+c+1)_n / n! * 3F2(-n, a-s, a+s+1; a-b+1, a+c+1; 1)
  long double series = 0.0L;
  long double term = 1.0L;
  for (int k = 0; k <= n; ++k) {
    series += term;
    if (k == n) break;
    term *= (static_cast<long double>(k) - n) * (la - ls + k) * (la + ls + 1 + k) /
            ((la - lb + 1 + k) * (la + lc + 1 + k) * (k + 1));
  }
  const auto pre1 = special::log_pochhammer(la - lb + 1, n);
  const auto pre2 = special::log_pochhammer(la + lc + 1, n);
  const long double w = series * pre1.sign * pre2.sign *
                        std::exp(pre1.log_abs + pre2.log_abs - special::log_factorial(n));

  // rho(s) = G(a+s+1) G(c+s+1) / (G(s-a+1) G(b-s) G(b+s+1) G(s-c+1))
  const auto g1 = special::log_gamma(la + ls + 1, "a+s+1");
  const auto g2 = special::log_gamma(lc + ls + 1, "c+s+1");
  const auto g3 = special::log_gamma(ls - la + 1, "s-a+1");
  const auto g4 = special::log_gamma(lb - ls, "b-s");
  const auto g5 = special::log_gamma(lb + ls + 1, "b+s+1");
  const auto g6 = special::log_gamma(ls - lc + 1, "s-c+1");
  // d_n^2 = G(a+c+n+1) / (n! G(b-a-n) G(b-c-n))
  const auto d1 = special::log_gamma(la + lc + n + 1, "a+c+n+1");
  const auto d2 = special::log_gamma(lb - la - n, "b-a-n");
  const auto d3 = special::log_gamma(lb - lc - n, "b-c-n");

  const int sign = g1.sign * g2.sign * g3.sign * g4.sign * g5.sign * g6.sign * d1.sign *
                   d2.sign * d3.sign;
  // Lattice factor Delta x(s - 1/2) for x(s) = s(s+1).
  const long double lattice_factor = 2.0L * ls + 1.0L;
  if (sign <= 0 || lattice_factor <= 0.0L) {
    throw ParameterError("dual hahn: negative weight at s = " + std::to_string(s));
  }
  const long double log_ratio = g1.log_abs + g2.log_abs - g3.log_abs - g4.log_abs -
                                g5.log_abs - g6.log_abs -
                                (d1.log_abs - special::log_factorial(n) - d2.log_abs -
                                 d3.log_abs);
  return static_cast<double>(w * std::sqrt(std::exp(log_ratio) * lattice_factor));
}

std::complex<double> pht_radial(PhtVariant variant, int n, double r) {
  check_radius(r, "pht_radial");
  const double r2 = r * r;
  switch (variant) {
    case PhtVariant::Exponential:
      return std::polar(1.0, 2.0 * kPi * n * r2);
    case PhtVariant::Cosine:
      if (n < 0) throw IndexDomainError("pct: requires n >= 0");
      return n == 0 ? 1.0 : std::numbers::sqrt2 * std::cos(kPi * n * r2);
    case PhtVariant::Sine:
      if (n < 1) throw IndexDomainError("pst: requires n >= 1");
      return std::sin(kPi * n * r2);
  }
  return 0.0;
}

std::complex<double> gpht_radial(PhtVariant variant, int n, double r, double s) {
  check_radius(r, "gpht_radial");
  if (!(s > 0.0)) throw ParameterError("gpht: requires s > 0");
  if (variant == PhtVariant::Sine && n < 1) throw IndexDomainError("gpst: requires n >= 1");
  if (variant == PhtVariant::Cosine && n < 0) throw IndexDomainError("gpct: requires n >= 0");
  // The weight diverges at the origin for s < 2; that single point is set to 0.
  if (r == 0.0 && s < 2.0) return 0.0;
  const double weight = std::sqrt(s * std::pow(r, s - 2.0) / (2.0 * kPi));
  const double rs = std::pow(r, s);
  switch (variant) {
    case PhtVariant::Exponential:
      return weight * std::polar(1.0, 2.0 * kPi * n * rs);
    case PhtVariant::Cosine:
      return n == 0 ? weight : weight * std::numbers::sqrt2 * std::cos(kPi * n * rs);
    case PhtVariant::Sine:
      return weight * std::numbers::sqrt2 * std::sin(kPi * n * rs);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

KernelBank::KernelBank(MomentFamily family, std::size_t rows, std::size_t cols,
                       std::vector<ComplexGrid> filters, std::vector<OrderIndex> orders,
                       double cell_area, ComplexReduction reduction)
    : family_(family),
      rows_(rows),
      cols_(cols),
      filters_(std::move(filters)),
      orders_(std::move(orders)),
      cell_area_(cell_area),
      reduction_(reduction) {
  if (filters_.empty()) throw CapacityError("kernel bank needs at least one filter");
  if (filters_.size() != orders_.size()) {
    throw ShapeError("kernel bank: filter and order counts differ");
  }
  if (!(cell_area_ > 0.0) || !std::isfinite(cell_area_)) {
    throw ParameterError("kernel bank: cell area must be positive and finite");
  }
  const std::size_t area = rows_ * cols_;
  re_.reserve(area * filters_.size());
  im_.reserve(area * filters_.size());
  for (const auto& f : filters_) {
    if (f.rows() != rows_ || f.cols() != cols_) {
      throw ShapeError("kernel bank: filter size differs from patch size");
    }
    for (const auto& v : f.values()) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw ParameterError("kernel bank: non-finite filter entry");
      }
      re_.push_back(v.real() * cell_area_);
      im_.push_back(v.imag() * cell_area_);
      if (v.imag() != 0.0) complex_valued_ = true;
    }
  }
  complex_valued_ = complex_valued_ || is_complex(family_.tag);
}

void KernelBank::project(std::span<const double> patch, std::span<double> out) const {
  const std::size_t area = rows_ * cols_;
  const double* pr = patch.data();
  for (std::size_t j = 0; j < filters_.size(); ++j) {
    const double* wr = re_.data() + j * area;
    double sr = 0.0;
    for (std::size_t i = 0; i < area; ++i) sr += wr[i] * pr[i];
    if (!complex_valued_) {
      out[j] = sr;
      continue;
    }
    if (reduction_ == ComplexReduction::RealPart) {
      out[j] = sr;
      continue;
    }
    const double* wi = im_.data() + j * area;
    double si = 0.0;
    for (std::size_t i = 0; i < area; ++i) si += wi[i] * pr[i];
    out[j] = std::hypot(sr, si);
  }
}

double grid_coordinate(std::size_t i, std::size_t n) {
  return (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n) - 1.0;
}

KernelBank build_kernel_bank(const MomentFamily& family, std::size_t rows, std::size_t cols,
                             std::vector<OrderIndex> orders, ComplexReduction reduction) {
  family.validate();
  if (family.tag == Family::PCA) {
    throw ParameterError("pca banks are learned from data, see learn_pca_filters");
  }
  if (rows < 2 || cols < 2) {
    throw GeometryError("kernel bank: patch size must be at least 2x2");
  }
  if (orders.empty()) throw CapacityError("kernel bank needs at least one filter");
  for (const auto& idx : orders) {
    if (!is_valid_order(family.tag, idx)) {
      throw IndexDomainError(std::string(family_name(family.tag)) + ": invalid order (" +
                             std::to_string(idx.n) + ", " + std::to_string(idx.m) + ")");
    }
    if (is_discrete(family.tag) &&
        (idx.n >= static_cast<int>(rows) || idx.m >= static_cast<int>(cols))) {
      throw CapacityError(std::string(family_name(family.tag)) + ": order (" +
                          std::to_string(idx.n) + ", " + std::to_string(idx.m) +
                          ") exceeds the " + std::to_string(rows) + "x" +
                          std::to_string(cols) + " lattice");
    }
  }

  std::vector<ComplexGrid> filters;
  filters.reserve(orders.size());
  double cell_area = 4.0 / (static_cast<double>(rows) * static_cast<double>(cols));

  if (is_discrete(family.tag)) {
    cell_area = 1.0;
    for (const auto& idx : orders) {
      const auto row_basis = lattice_basis(family, idx.n, static_cast<int>(rows), false);
      const auto col_basis = lattice_basis(family, idx.m, static_cast<int>(cols), true);
      ComplexGrid g(rows, cols);
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) g(i, j) = row_basis[i] * col_basis[j];
      }
      filters.push_back(std::move(g));
    }
  } else if (is_circular(family.tag)) {
    for (const auto& idx : orders) {
      ComplexGrid g(rows, cols);
      for (std::size_t i = 0; i < rows; ++i) {
        const double u = grid_coordinate(i, rows);
        for (std::size_t j = 0; j < cols; ++j) {
          const double v = grid_coordinate(j, cols);
          const double r = std::hypot(u, v);
          if (r > 1.0) continue;
          g(i, j) = circular_kernel(family, idx, r, std::atan2(v, u));
        }
      }
      filters.push_back(std::move(g));
    }
  } else {
    for (const auto& idx : orders) {
      ComplexGrid g(rows, cols);
      for (std::size_t i = 0; i < rows; ++i) {
        const double u = grid_coordinate(i, rows);
        for (std::size_t j = 0; j < cols; ++j) {
          g(i, j) = cartesian_kernel(family.tag, idx, u, grid_coordinate(j, cols));
        }
      }
      filters.push_back(std::move(g));
    }
  }
  return KernelBank(family, rows, cols, std::move(filters), std::move(orders), cell_area,
                    reduction);
}

KernelBank build_kernel_bank(const MomentFamily& family, std::size_t rows, std::size_t cols,
                             std::size_t count, ComplexReduction reduction) {
  if (count == 0) throw CapacityError("kernel bank needs at least one filter");
  auto orders = is_discrete(family.tag)
                    ? enumerate_orders(family.tag, count, static_cast<int>(rows),
                                       static_cast<int>(cols))
                    : enumerate_orders(family.tag, count);
  return build_kernel_bank(family, rows, cols, std::move(orders), reduction);
}

std::vector<double> moment_project(const RealGrid& patch, const KernelBank& bank) {
  if (patch.rows() != bank.rows() || patch.cols() != bank.cols()) {
    throw ShapeError("moment_project: patch is " + std::to_string(patch.rows()) + "x" +
                     std::to_string(patch.cols()) + ", bank expects " +
                     std::to_string(bank.rows()) + "x" + std::to_string(bank.cols()));
  }
  std::vector<double> out(bank.size());
  bank.project(patch.values(), out);
  return out;
}

void write_bank_text(std::ostream& out, const KernelBank& bank) {
  auto write_part = [&](const ComplexGrid& g, bool imag) {
    for (std::size_t i = 0; i < g.rows(); ++i) {
      for (std::size_t j = 0; j < g.cols(); ++j) {
        if (j) out << ' ';
        out << (imag ? g(i, j).imag() : g(i, j).real());
      }
      out << '\n';
    }
    out << '\n';
  };
  const auto old_precision = out.precision(17);
  for (std::size_t k = 0; k < bank.size(); ++k) {
    const auto& idx = bank.order(k);
    out << "# " << family_name(bank.family().tag) << " filter " << k << " n=" << idx.n
        << " m=" << idx.m << (bank.complex_valued() ? " real" : "") << '\n';
    write_part(bank.filter(k), false);
    if (bank.complex_valued()) {
      out << "# " << family_name(bank.family().tag) << " filter " << k << " n=" << idx.n
          << " m=" << idx.m << " imag\n";
      write_part(bank.filter(k), true);
    }
  }
  out.precision(old_precision);
}

}  // namespace momentsnet
