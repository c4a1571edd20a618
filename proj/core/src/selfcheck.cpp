#include "momentsnet/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "momentsnet/kernels.hpp"

namespace momentsnet {

namespace {

using Basis = std::function<double(int n, int x)>;

// max |sum_x f_n(x) f_m(x) - delta_nm| over n, m < N.
double gram_deviation(int N, const Basis& f) {
  double worst = 0.0;
  for (int n = 0; n < N; ++n) {
    for (int m = n; m < N; ++m) {
      double s = 0.0;
      for (int x = 0; x < N; ++x) s += f(n, x) * f(m, x);
      worst = std::max(worst, std::fabs(s - (n == m ? 1.0 : 0.0)));
    }
  }
  return worst;
}

// Expands a random patch in a complete separable orthonormal basis and back.
double reconstruction_error(int N, const Basis& f, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> patch(N * N);
  for (auto& v : patch) v = unit(rng);
  std::vector<double> back(N * N, 0.0);
  for (int n = 0; n < N; ++n) {
    for (int m = 0; m < N; ++m) {
      double moment = 0.0;
      for (int x = 0; x < N; ++x) {
        for (int y = 0; y < N; ++y) moment += patch[x * N + y] * f(n, x) * f(m, y);
      }
      for (int x = 0; x < N; ++x) {
        for (int y = 0; y < N; ++y) back[x * N + y] += moment * f(n, x) * f(m, y);
      }
    }
  }
  double worst = 0.0;
  for (int i = 0; i < N * N; ++i) worst = std::max(worst, std::fabs(back[i] - patch[i]));
  return worst;
}

}  // namespace

std::vector<CheckResult> run_selfcheck(const SelfCheckOptions& options) {
  const double perturb = options.norm_perturbation;
  auto tchebichef = [perturb](int N) {
    return Basis([N, perturb](int n, int x) {
      return tchebichef_poly(n, x, N) / std::sqrt(perturb * tchebichef_norm(n, N));
    });
  };
  auto krawtchouk = [](int N) {
    return Basis([N](int n, int x) { return krawtchouk_weighted(n, x, 0.5, N - 1); });
  };
  auto dual_hahn = [](int N) {
    return Basis([N](int n, int x) { return dual_hahn_weighted(n, x, 0.0, N, 0.0); });
  };

  std::vector<CheckResult> out;
  const int sizes[] = {4, 8, 11, 15};
  auto orthonormality = [&](const char* name, auto make) {
    double worst = 0.0;
    for (int N : sizes) worst = std::max(worst, gram_deviation(N, make(N)));
    out.push_back({std::string("orthonormality/") + name, worst, 1e-8});
  };
  orthonormality("tchebichef", tchebichef);
  orthonormality("krawtchouk", krawtchouk);
  orthonormality("dual_hahn", dual_hahn);

  {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double x = -1.0 + 2.0 * (i + 0.5) / 20.0;
      for (int n = 1; n < 12; ++n) {
        const double lhs = (n + 1) * legendre_poly(n + 1, x);
        const double rhs = (2 * n + 1) * x * legendre_poly(n, x) - n * legendre_poly(n - 1, x);
        worst = std::max(worst, std::fabs(lhs - rhs));
      }
    }
    out.push_back({"recurrence/legendre", worst, 1e-10});
  }

  {
    double worst = 0.0;
    for (int n = 0; n <= 10; ++n) {
      for (int i = 0; i <= 20; ++i) {
        const double r = i / 20.0;
        worst = std::max(worst, std::fabs(zernike_radial(n, n, r) - std::pow(r, n)));
      }
      for (int m = n % 2; m <= n; m += 2) {
        worst = std::max(worst, std::fabs(zernike_radial(n, m, 1.0) - 1.0));
      }
    }
    out.push_back({"identity/zernike_radial", worst, 1e-9});
  }

  {
    std::mt19937_64 rng(options.seed);
    double t = 0.0;
    double k = 0.0;
    for (int trial = 0; trial < 4; ++trial) {
      t = std::max(t, reconstruction_error(8, tchebichef(8), rng));
      k = std::max(k, reconstruction_error(8, krawtchouk(8), rng));
    }
    out.push_back({"reconstruction/tchebichef", t, 1e-6});
    out.push_back({"reconstruction/krawtchouk", k, 1e-6});
  }

  {
    // A disk-supported patch and its exact 90 degree rotation.
    constexpr std::size_t kSize = 16;
    std::mt19937_64 rng(options.seed + 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    RealGrid patch(kSize, kSize);
    for (std::size_t r = 0; r < kSize; ++r) {
      for (std::size_t c = 0; c < kSize; ++c) {
        const double x = grid_coordinate(r, kSize);
        const double y = grid_coordinate(c, kSize);
        patch(r, c) = x * x + y * y <= 1.0 ? unit(rng) : 0.0;
      }
    }
    RealGrid turned(kSize, kSize);
    for (std::size_t r = 0; r < kSize; ++r) {
      for (std::size_t c = 0; c < kSize; ++c) turned(kSize - 1 - c, r) = patch(r, c);
    }
    const auto bank = build_kernel_bank(MomentFamily{Family::Zernike, {}}, kSize, kSize, 12);
    const auto a = moment_project(patch, bank);
    const auto b = moment_project(turned, bank);
    double worst = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      worst = std::max(worst, std::fabs(a[j] - b[j]) / std::max(std::fabs(a[j]), 1e-12));
    }
    out.push_back({"rotation/zernike_modulus", worst, 0.05});
  }
  return out;
}

}  // namespace momentsnet
