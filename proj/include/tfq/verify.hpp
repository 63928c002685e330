#pragma once

// Randomized property suites behind `tfq verify`. Trial k of property p at
// dimension d draws from std::mt19937_64 seeded with seed_seq{seed, p, d, k},
// so results do not depend on which other properties run.

#include <cstdint>
#include <string>
#include <vector>

namespace tfq::verify {

struct Config {
  std::uint64_t seed = 42;
  std::size_t trials = 100;
  double tol = 1e-9;
  std::vector<std::size_t> dims{2, 3};
  /// Drop the complex conjugation from the anti-unitary steps.
  bool inject_fault = false;
};

struct PropertyResult {
  std::string name;
  std::size_t trials = 0;  // total checks across all dimensions
  double max_deviation = 0.0;
  bool passed = false;
};

struct Report {
  std::vector<PropertyResult> results;
  bool all_passed() const;
};

/// Throws std::invalid_argument for trials = 0, an empty or invalid
/// dimension list, or a non-positive tolerance.
Report run(const Config& config);

std::vector<std::string> property_names();

}  // namespace tfq::verify
