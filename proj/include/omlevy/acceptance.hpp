#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace omlevy::acceptance {

struct Criterion {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // deterministic; no timings
};

struct Options {
  std::uint64_t seed = 20240601;
  int threads = 1;
  /// Replaces the computed small-jump mean in criterion 1 (mutation testing).
  std::optional<double> lambda_override;
};

// Pinned tolerances.
inline constexpr double kLambdaExpected = 0.398942;
inline constexpr double kLambdaTol = 1e-4;
inline constexpr double kVelocityTol = 1e-3;
inline constexpr double kActionTol = 1e-4;
inline constexpr double kOracleTol = 1e-5;
inline constexpr double kResidualTol = 1e-4;
inline constexpr double kLowerBoundSlack = 1e-6;
inline constexpr double kGradientRelTol = 1e-4;
inline constexpr double kJumpSE = 4.0;
inline constexpr double kRatioRelTol = 0.2;
inline constexpr double kRatioSE = 3.0;
inline constexpr double kCoverage = 0.9;

Criterion lambda_constant(double lambda);
Criterion global_velocities();
Criterion action_floor();
/// Criteria 4 and 5 share the solves.
std::vector<Criterion> oracle_equivalence();
Criterion action_lower_bound(std::uint64_t seed);
Criterion gradient_check(std::uint64_t seed);
Criterion jump_statistics(std::uint64_t seed);
Criterion tube_ratio(std::uint64_t seed, int threads);
Criterion bridge_concentration(std::uint64_t seed, int threads);

/// Criteria 1-10.
std::vector<Criterion> run_suite(const Options& opts);
/// Criteria 1-10 plus 11, which reruns the suite with a different thread count and
/// compares the rendered reports byte for byte.
std::vector<Criterion> run_all(const Options& opts);

/// One `[PASS] n name: detail` / `[FAIL] ...` line per criterion.
std::string render(const std::vector<Criterion>& results);
bool all_passed(const std::vector<Criterion>& results);

}  // namespace omlevy::acceptance
