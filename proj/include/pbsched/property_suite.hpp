#pragma once

// Randomized self-checks of the circuit and scheduler invariants, behind
// the `check` CLI subcommand.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace pbsched {

struct PropertyResult {
  std::string name;
  std::size_t instances = 0;
  std::size_t failures = 0;
  double worst = 0;      // largest observed residual
  double tolerance = 0;  // residual bound
  std::string first_failure;

  bool passed() const { return failures == 0; }
};

/// Runs every property over `instances` random packs drawn from `seed`.
std::vector<PropertyResult> run_property_suite(std::uint64_t seed, std::size_t instances);

}  // namespace pbsched
