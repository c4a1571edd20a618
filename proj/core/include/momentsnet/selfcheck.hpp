#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace momentsnet {

struct CheckResult {
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool passed() const noexcept { return max_deviation <= tolerance; }
};

struct SelfCheckOptions {
  /// Multiplies the Tchebichef norm constant before the orthonormality and
  /// reconstruction checks. Anything but 1 should make them fail; used to
  /// test the failure path.
  double norm_perturbation = 1.0;
  std::uint64_t seed = 7;
};

/// Basis property checks: discrete orthonormality, Legendre recurrence,
/// Zernike radial identities, Tchebichef/Krawtchouk reconstruction and
/// Zernike modulus stability under 90 degree rotation.
std::vector<CheckResult> run_selfcheck(const SelfCheckOptions& options = {});

}  // namespace momentsnet
