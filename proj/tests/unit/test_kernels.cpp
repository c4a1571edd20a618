#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "momentsnet/errors.hpp"
#include "momentsnet/kernels.hpp"
#include "oracles.hpp"

using namespace momentsnet;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<OrderIndex> orders_of(std::initializer_list<std::pair<int, int>> pairs) {
  std::vector<OrderIndex> out;
  for (auto [n, m] : pairs) out.push_back({n, m});
  return out;
}

}  // namespace

TEST(Orders, CanonicalExamples) {
  EXPECT_EQ(enumerate_orders(Family::Geometric, 3), orders_of({{0, 0}, {0, 1}, {1, 0}}));
  EXPECT_EQ(enumerate_orders(Family::Zernike, 4), orders_of({{0, 0}, {1, -1}, {1, 1}, {2, -2}}));
  EXPECT_EQ(enumerate_orders(Family::PST, 2), orders_of({{1, 0}, {1, -1}}));
}

TEST(Orders, PrefixStableAndValid) {
  for (Family f : kMomentFamilies) {
    const auto big = enumerate_orders(f, 60);
    ASSERT_EQ(big.size(), 60u);
    for (std::size_t l = 1; l < 60; ++l) {
      const auto small = enumerate_orders(f, l);
      ASSERT_TRUE(std::equal(small.begin(), small.end(), big.begin())) << family_name(f) << l;
    }
    for (std::size_t i = 0; i < big.size(); ++i) {
      EXPECT_TRUE(is_valid_order(f, big[i]));
      if (i > 0) {
        // Canonical order: degree, then n, then m.
        const auto key = [&](OrderIndex o) {
          return std::tuple(order_degree(f, o), o.n, o.m);
        };
        EXPECT_LT(key(big[i - 1]), key(big[i])) << family_name(f);
      }
    }
  }
}

TEST(Orders, ExhaustiveZernikeListing) {
  // Every valid pair with n <= 6 appears, in degree order.
  std::vector<OrderIndex> expected;
  for (int n = 0; n <= 6; ++n) {
    for (int m = -n; m <= n; ++m) {
      if ((n - std::abs(m)) % 2 == 0) expected.push_back({n, m});
    }
  }
  EXPECT_EQ(enumerate_orders(Family::Zernike, expected.size()), expected);
}

TEST(Orders, LatticeCapacity) {
  EXPECT_EQ(enumerate_orders(Family::Tchebichef, 16, 4, 4).size(), 16u);
  EXPECT_THROW(enumerate_orders(Family::Tchebichef, 17, 4, 4), CapacityError);
  EXPECT_THROW(build_kernel_bank({Family::Tchebichef}, 4, 4, 17), CapacityError);
  EXPECT_EQ(build_kernel_bank({Family::Tchebichef}, 4, 4, 16).size(), 16u);
}

TEST(ZernikeRadial, Examples) {
  EXPECT_DOUBLE_EQ(zernike_radial(0, 0, 0.37), 1.0);
  for (double r : {0.0, 0.5, 1.0}) EXPECT_DOUBLE_EQ(zernike_radial(1, 1, r), r);
  for (double r : {0.0, 0.3, 0.8, 1.0}) EXPECT_NEAR(zernike_radial(2, 0, r), 2 * r * r - 1, 1e-15);
  EXPECT_DOUBLE_EQ(zernike_radial(2, 0, 1.0), 1.0);
}

TEST(ZernikeRadial, IdentitiesAndJacobiOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int n = 0; n <= 10; ++n) {
    for (int m = n % 2; m <= n; m += 2) {
      EXPECT_NEAR(zernike_radial(n, m, 1.0), 1.0, 1e-9) << n << ' ' << m;
      for (int s = 0; s < 10; ++s) {
        const double r = unit(rng);
        EXPECT_NEAR(zernike_radial(n, m, r), oracle::zernike_radial(n, m, r), 1e-10);
      }
    }
    for (double r : {0.0, 0.25, 0.6, 1.0}) EXPECT_NEAR(zernike_radial(n, n, r), std::pow(r, n), 1e-15);
  }
}

TEST(ZernikeRadial, InvalidOrders) {
  EXPECT_THROW(zernike_radial(3, 2, 0.5), IndexDomainError);
  EXPECT_THROW(zernike_radial(2, 4, 0.5), IndexDomainError);
}

TEST(Legendre, ExamplesAndBonnetOracle) {
  EXPECT_EQ(legendre_poly(0, 0.3), 1.0);
  EXPECT_DOUBLE_EQ(legendre_poly(1, 0.5), 0.5);
  EXPECT_NEAR(legendre_poly(2, 0.4), (3 * 0.16 - 1) / 2, 1e-15);
  EXPECT_DOUBLE_EQ(legendre_poly(2, 1.0), 1.0);
  for (int n = 0; n <= 12; ++n) {
    for (int i = 0; i <= 20; ++i) {
      const double x = -1.0 + 0.1 * i;
      EXPECT_NEAR(legendre_poly(n, x), oracle::legendre(n, x), 1e-12);
      EXPECT_LE(std::fabs(legendre_poly(n, x)), 1.0 + 1e-12);
    }
  }
}

TEST(Tchebichef, ExamplesAndRecurrenceOracle) {
  EXPECT_EQ(tchebichef_poly(0, 2, 5), 1.0);
  EXPECT_EQ(tchebichef_norm(0, 7), 7.0);
  EXPECT_DOUBLE_EQ(tchebichef_poly(1, 0, 4), -3.0);
  EXPECT_DOUBLE_EQ(tchebichef_norm(1, 4), 20.0);
  for (int N : {4, 8, 11, 15}) {
    for (int n = 0; n < N; ++n) {
      EXPECT_NEAR(tchebichef_norm(n, N) / oracle::tchebichef_rho(n, N), 1.0, 1e-12);
      for (int x = 0; x < N; ++x) {
        const double ref = oracle::tchebichef(n, x, N);
        EXPECT_NEAR(tchebichef_poly(n, x, N), ref, 1e-9 * std::max(1.0, std::fabs(ref)));
      }
    }
  }
  EXPECT_THROW(tchebichef_poly(4, 0, 4), IndexDomainError);
  EXPECT_THROW(tchebichef_poly(1, 4, 4), IndexDomainError);
}

TEST(Krawtchouk, ExamplesAndRecurrenceOracle) {
  EXPECT_NEAR(krawtchouk_weighted(0, 0, 0.5, 4), 0.25, 1e-15);
  for (double p : {0.2, 0.5, 0.7}) {
    double sum = 0;
    for (int x = 0; x <= 10; ++x) {
      const double k0 = krawtchouk_weighted(0, x, p, 10);
      const double w = std::exp(std::lgamma(11.0) - std::lgamma(x + 1.0) - std::lgamma(11.0 - x)) *
                       std::pow(p, x) * std::pow(1 - p, 10 - x);
      EXPECT_NEAR(k0, std::sqrt(w), 1e-14);
      sum += k0 * k0;
    }
    EXPECT_NEAR(sum, 1.0, 1e-13);
  }
  double cross = 0;
  for (int x = 0; x <= 8; ++x) cross += krawtchouk_weighted(1, x, 0.5, 8) * krawtchouk_weighted(2, x, 0.5, 8);
  EXPECT_NEAR(cross, 0.0, 1e-13);
  for (double p : {0.3, 0.5, 0.8}) {
    for (int n = 0; n <= 12; ++n) {
      for (int x = 0; x <= 12; ++x) {
        EXPECT_NEAR(krawtchouk_weighted(n, x, p, 12), oracle::krawtchouk(n, x, p, 12), 1e-10)
            << n << ' ' << x << ' ' << p;
      }
    }
  }
  EXPECT_THROW(krawtchouk_weighted(0, 0, 1.0, 4), ParameterError);
  EXPECT_THROW(krawtchouk_weighted(5, 0, 0.5, 4), IndexDomainError);
}

TEST(DualHahn, ZeroOrderNormAndOrthogonality) {
  double norm = 0;
  double cross = 0;
  for (int x = 0; x < 8; ++x) {
    const double w0 = dual_hahn_weighted(0, x, 0, 8, 0);
    norm += w0 * w0;
    cross += dual_hahn_weighted(1, x, 0, 8, 0) * dual_hahn_weighted(3, x, 0, 8, 0);
  }
  EXPECT_NEAR(norm, 1.0, 1e-10);
  EXPECT_NEAR(cross, 0.0, 1e-8);
}

TEST(DualHahn, OrthonormalForShiftedParameters) {
  for (auto [a, c] : {std::pair{0.0, 0.0}, {1.0, 0.5}, {2.5, -1.0}}) {
    const int N = 9;
    for (int n = 0; n < N; ++n) {
      for (int m = 0; m < N; ++m) {
        double s = 0;
        for (int x = 0; x < N; ++x) {
          s += dual_hahn_weighted(n, a + x, a, a + N, c) * dual_hahn_weighted(m, a + x, a, a + N, c);
        }
        EXPECT_NEAR(s, n == m ? 1.0 : 0.0, 1e-8) << a << ' ' << c << ' ' << n << ' ' << m;
      }
    }
  }
}

TEST(DualHahn, ParameterErrors) {
  EXPECT_THROW(dual_hahn_weighted(0, 0, -1.0, 7, 0), ParameterError);
  EXPECT_THROW(dual_hahn_weighted(0, 0, 0, 8, 1.5), ParameterError);
  EXPECT_THROW(dual_hahn_weighted(8, 0, 0, 8, 0), IndexDomainError);
}

TEST(PolarHarmonic, Examples) {
  for (int n : {0, 1, 5}) {
    EXPECT_EQ(pht_radial(PhtVariant::Exponential, n, 0.0), std::complex<double>(1.0, 0.0));
  }
  for (double r : {0.0, 0.4, 1.0}) EXPECT_EQ(pht_radial(PhtVariant::Cosine, 0, r), 1.0);
  EXPECT_NEAR(std::abs(pht_radial(PhtVariant::Sine, 1, 1.0)), 0.0, 1e-15);
  EXPECT_THROW(pht_radial(PhtVariant::Sine, 0, 0.5), IndexDomainError);
  for (int n = -3; n <= 3; ++n) {
    EXPECT_NEAR(std::abs(pht_radial(PhtVariant::Exponential, n, 0.77)), 1.0, 1e-15);
  }
  EXPECT_EQ(pht_radial(PhtVariant::Cosine, 3, 0.4).imag(), 0.0);
}

TEST(PolarHarmonic, GeneralisedExamples) {
  for (int n : {0, 2, -1}) {
    for (double r : {0.2, 0.9}) {
      const auto g = gpht_radial(PhtVariant::Exponential, n, r, 2.0);
      const auto p = pht_radial(PhtVariant::Exponential, n, r);
      EXPECT_NEAR(std::abs(g - p / std::sqrt(kPi)), 0.0, 1e-14);
    }
  }
  EXPECT_NEAR(gpht_radial(PhtVariant::Cosine, 0, 0.5, 2.0).real(), std::sqrt(1 / kPi), 1e-15);
  EXPECT_NEAR(std::abs(gpht_radial(PhtVariant::Sine, 1, 1.0, 2.0)), 0.0, 1e-15);
  // Forced to zero at the centre where the weight diverges.
  EXPECT_EQ(gpht_radial(PhtVariant::Cosine, 0, 0.0, 1.0), std::complex<double>(0.0));
  EXPECT_THROW(gpht_radial(PhtVariant::Cosine, 0, 0.5, 0.0), ParameterError);
  EXPECT_THROW(gpht_radial(PhtVariant::Sine, 0, 0.5, 2.0), IndexDomainError);
}

TEST(Banks, GeometricZeroOrderIsOnes) {
  const auto bank = build_kernel_bank({Family::Geometric}, 3, 3, 1);
  ASSERT_EQ(bank.size(), 1u);
  for (auto v : bank.filter(0).values()) EXPECT_EQ(v, std::complex<double>(1.0));
  EXPECT_FALSE(bank.complex_valued());
}

TEST(Banks, ZernikeZeroOrderFilter) {
  const auto bank = build_kernel_bank({Family::Zernike}, 11, 11, 10);
  EXPECT_EQ(bank.order(0), (OrderIndex{0, 0}));
  EXPECT_NEAR(bank.cell_area(), 4.0 / 121.0, 1e-16);
  for (std::size_t i = 0; i < 11; ++i) {
    for (std::size_t j = 0; j < 11; ++j) {
      const double u = grid_coordinate(i, 11);
      const double v = grid_coordinate(j, 11);
      const auto f = bank.filter(0)(i, j);
      if (u * u + v * v > 1.0) {
        EXPECT_EQ(f, std::complex<double>(0.0));
      } else {
        EXPECT_NEAR(f.real(), 1.0 / kPi, 1e-15);
        EXPECT_EQ(f.imag(), 0.0);
      }
    }
  }
}

TEST(Banks, DiskFamiliesZeroOutsideAndAllFinite) {
  for (Family f : kMomentFamilies) {
    for (auto [k1, k2] : {std::pair<std::size_t, std::size_t>{7, 7}, {6, 9}, {2, 2}}) {
      const std::size_t count = is_discrete(f) ? std::min<std::size_t>(k1 * k2, 12) : 12;
      const auto bank = build_kernel_bank({f}, k1, k2, count);
      EXPECT_EQ(bank.size(), count);
      EXPECT_EQ(bank.orders().size(), bank.filters().size());
      for (std::size_t j = 0; j < bank.size(); ++j) {
        for (std::size_t r = 0; r < k1; ++r) {
          for (std::size_t c = 0; c < k2; ++c) {
            const auto v = bank.filter(j)(r, c);
            ASSERT_TRUE(std::isfinite(v.real()) && std::isfinite(v.imag())) << family_name(f);
            const double u = grid_coordinate(r, k1);
            const double w = grid_coordinate(c, k2);
            if (is_circular(f) && u * u + w * w > 1.0) {
              EXPECT_EQ(v, std::complex<double>(0.0)) << family_name(f);
            }
            if (!is_complex(f)) EXPECT_EQ(v.imag(), 0.0);
          }
        }
      }
    }
  }
}

TEST(Banks, Errors) {
  EXPECT_THROW(build_kernel_bank({Family::Zernike}, 1, 5, 3), GeometryError);
  EXPECT_THROW(build_kernel_bank({Family::Zernike}, 5, 5, 0), CapacityError);
  EXPECT_THROW(build_kernel_bank({Family::PCA}, 5, 5, 3), ParameterError);
  EXPECT_THROW(build_kernel_bank({Family::Zernike}, 5, 5, orders_of({{2, 1}})), IndexDomainError);
  MomentFamily bad_p{Family::Krawtchouk};
  bad_p.params.krawtchouk_p2 = 0.0;
  EXPECT_THROW(build_kernel_bank(bad_p, 5, 5, 3), ParameterError);
  MomentFamily bad_hahn{Family::DualHahn};
  bad_hahn.params.hahn_c = 2.0;
  EXPECT_THROW(bad_hahn.validate(), ParameterError);
  MomentFamily bad_s{Family::GPCT};
  bad_s.params.gpht_s = -1.0;
  EXPECT_THROW(bad_s.validate(), ParameterError);
}

TEST(Project, ZeroPatchGivesZeroVector) {
  for (Family f : kMomentFamilies) {
    const auto bank = build_kernel_bank({f}, 5, 5, 6);
    for (double v : moment_project(RealGrid(5, 5), bank)) EXPECT_EQ(v, 0.0) << family_name(f);
  }
}

TEST(Project, ShapeMismatch) {
  const auto bank = build_kernel_bank({Family::Legendre}, 5, 5, 3);
  EXPECT_THROW(moment_project(RealGrid(5, 4), bank), ShapeError);
}

TEST(Project, RealPartReduction) {
  const auto patch = oracle::random_patches(1, 6, 6, 11).front();
  const auto modulus = build_kernel_bank({Family::PCET}, 6, 6, 8);
  const auto real = build_kernel_bank({Family::PCET}, 6, 6, 8, ComplexReduction::RealPart);
  const auto a = moment_project(patch, modulus);
  const auto b = moment_project(patch, real);
  for (std::size_t j = 0; j < a.size(); ++j) {
    EXPECT_GE(a[j], 0.0);
    EXPECT_LE(std::fabs(b[j]), a[j] + 1e-15);
  }
}

TEST(Project, DiscreteReconstructionFromCompleteMoments) {
  // Complete Tchebichef and Krawtchouk moment sets on 8x8 invert exactly.
  for (Family f : {Family::Tchebichef, Family::Krawtchouk}) {
    const auto bank = build_kernel_bank({f}, 8, 8, 64);
    for (const auto& patch : oracle::random_patches(5, 8, 8, 21)) {
      const auto moments = moment_project(patch, bank);
      RealGrid rebuilt(8, 8);
      for (std::size_t j = 0; j < bank.size(); ++j) {
        const auto [n, m] = bank.order(j);
        for (int x = 0; x < 8; ++x) {
          for (int y = 0; y < 8; ++y) {
            // Synthesis basis: t_n t_m for Tchebichef (analysis carries 1/rho),
            // the orthonormal product for Krawtchouk.
            const double basis = f == Family::Tchebichef
                                     ? oracle::tchebichef(n, x, 8) * oracle::tchebichef(m, y, 8)
                                     : oracle::krawtchouk(n, x, 0.5, 7) * oracle::krawtchouk(m, y, 0.5, 7);
            rebuilt(x, y) += moments[j] * basis;
          }
        }
      }
      for (std::size_t i = 0; i < 64; ++i) {
        EXPECT_NEAR(rebuilt.values()[i], patch.values()[i], 1e-6) << family_name(f);
      }
    }
  }
}

TEST(BankText, Format) {
  const auto bank = build_kernel_bank({Family::Geometric}, 2, 3, 2);
  std::ostringstream out;
  write_bank_text(out, bank);
  EXPECT_EQ(out.str(),
            "# geometric filter 0 n=0 m=0\n1 1 1\n1 1 1\n\n"
            "# geometric filter 1 n=0 m=1\n-0.66666666666666674 0 0.66666666666666674\n"
            "-0.66666666666666674 0 0.66666666666666674\n\n");
  std::ostringstream complex_out;
  write_bank_text(complex_out, build_kernel_bank({Family::Zernike}, 3, 3, 2));
  EXPECT_NE(complex_out.str().find("filter 1 n=1 m=-1 imag"), std::string::npos);
}

TEST(FamilyNames, RoundTrip) {
  for (Family f : kMomentFamilies) EXPECT_EQ(parse_family(family_name(f)), f);
  EXPECT_EQ(parse_family("pca"), Family::PCA);
  EXPECT_FALSE(parse_family("hermite").has_value());
}
