#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "omlevy/levy.hpp"
#include "omlevy/model.hpp"
#include "omlevy/path.hpp"
#include "omlevy/rng.hpp"

namespace omlevy {

/// Simulated trajectory: `path.phi1` holds X, `path.phi2` holds Y (no dphi2).
struct SamplePath {
  Path path;
  std::uint64_t seed = 0;  // key of the stream that produced it
  JumpTrain jumps;
};

struct SimulationOptions {
  /// Jumps with |xi| < delta are replaced by their mean drift.
  double delta = 1e-3;
  int threads = 1;
};

/// Number of Euler steps used for horizon T and requested step dt: round(T/dt),
/// the effective step being T / steps. Throws DomainError if fewer than 2.
int euler_steps(double T, double dt);

/// Euler-Maruyama for the degenerate system:
///   X+ = X + g dt
///   Y+ = Y + f dt + c sqrt(dt) N(0,1) + (m_delta - Lambda) dt + (jumps in the step)
/// The Levy part follows the Levy-Ito representation: jumps below unit size are
/// compensated by -Lambda dt, jumps below delta are replaced by their mean m_delta,
/// jumps in (t_k, t_k+1] are applied at the end of step k.
/// The jump train is drawn from `rng` first, then one normal per step.
/// Throws BlowUp when the state stops being finite.
SamplePath simulate_sde(const DegenerateModel& model, std::array<double, 2> z0, double T,
                        double dt, RandomStream& rng, const SimulationOptions& opts = {});

struct BridgeAttempt {
  std::uint64_t seed = 0;
  bool accepted = false;
  double endpoint_error = 0.0;  // |X(T) - xT|; infinity after a blow-up
};

struct BridgeEnsemble {
  std::vector<SamplePath> kept;
  std::vector<BridgeAttempt> manifest;  // every attempt up to the last kept one
  long long attempts = 0;
};

/// Rejection sampling of paths with |X(T) - xT| <= end_tol. Attempt i uses stream
/// (master_seed, i); the first n_keep accepted attempts in index order are kept, so
/// the result does not depend on the thread count. Throws BudgetExceeded.
BridgeEnsemble simulate_bridge_ensemble(const DegenerateModel& model, std::array<double, 2> z0,
                                        double xT, double end_tol, int n_keep, double T,
                                        double dt, std::uint64_t master_seed,
                                        const SimulationOptions& opts = {},
                                        long long max_attempts = 10'000'000);

/// Pointwise empirical quantiles (linear interpolation between order statistics) of
/// the X channel of an ensemble sharing one grid.
std::pair<std::vector<double>, std::vector<double>> percentile_band(
    const std::vector<SamplePath>& paths, double q_low, double q_high);

/// Fraction of nodes where lower[i] <= reference[i] <= upper[i].
double band_coverage(const std::vector<double>& lower, const std::vector<double>& upper,
                     const std::vector<double>& reference);

struct TubeEstimate {
  double epsilon = 0.0;
  long long hits = 0;
  long long n = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  /// Set when hits == 0: ci_high is then the exact one-sided 95% bound 1 - 0.05^(1/n).
  bool one_sided = false;
};

/// 95% Wilson score interval.
TubeEstimate wilson_estimate(long long hits, long long n, double epsilon);

/// Monte Carlo probability that the simulated path stays within sup-norm distance
/// epsilon of phi (max over grid nodes of max(|X - phi1|, |Y - phi2|)). The
/// simulation starts at phi's initial point and runs over phi's horizon; phi is
/// linearly interpolated onto the simulation grid. Sample i uses stream (seed, i).
TubeEstimate estimate_tube_probability(const DegenerateModel& model, const Path& phi,
                                       double epsilon, long long n, double dt,
                                       std::uint64_t seed, const SimulationOptions& opts = {});

/// Same estimator for several radii on common random numbers: the hit counts are
/// monotone in epsilon sample by sample.
std::vector<TubeEstimate> estimate_tube_probabilities(const DegenerateModel& model,
                                                      const Path& phi,
                                                      const std::vector<double>& epsilons,
                                                      long long n, double dt,
                                                      std::uint64_t seed,
                                                      const SimulationOptions& opts = {});

struct RatioReport {
  TubeEstimate a, b;
  long long joint_hits = 0;
  double action_a = 0.0;
  double action_b = 0.0;
  /// ln(p_a / p_b); NaN when degenerate.
  double delta_hat = 0.0;
  /// -(I(phi_a) - I(phi_b)).
  double delta_theory = 0.0;
  double difference = 0.0;  // delta_hat - delta_theory
  /// Delta-method standard error of delta_hat including the common-random-number
  /// covariance.
  double std_error = 0.0;
  bool degenerate = false;
  /// For degenerate reports: +1 when `bound` is an upper bound on delta_hat, -1 for
  /// a lower bound, 0 when both hit counts vanish.
  int bound_kind = 0;
  double bound = 0.0;

  /// |delta_hat - delta_theory| <= max(rel_tol |delta_theory|, se_mult SE).
  bool within(double rel_tol = 0.2, double se_mult = 3.0) const;
};

/// Compares the empirical log tube-probability ratio of two reference paths with the
/// Onsager-Machlup prediction. Both paths must share initial point and horizon; the
/// same samples are tested against both tubes.
RatioReport om_ratio_check(const DegenerateModel& model, const Path& phi_a, const Path& phi_b,
                           double epsilon, long long n, double dt, std::uint64_t seed,
                           const SimulationOptions& opts = {},
                           const ActionOptions& action_opts = {});

}  // namespace omlevy
