#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "omlevy/model.hpp"
#include "omlevy/path.hpp"

namespace omlevy {

/// Shooting state of the Hamilton-Pontryagin system. p is the conjugate variable
/// (dphi2/dt - f + Lambda) / c^2 and lambda the multiplier of dphi1/dt = g.
struct HPState {
  double phi1 = 0.0;
  double phi2 = 0.0;
  double p = 0.0;
  double lambda = 0.0;
};

/// Boundary data of a transition problem. Velocities are optional for
/// configuration-only problems.
struct BoundaryProblem {
  double x0 = 0.0;
  std::optional<double> y0;
  double xT = 0.0;
  std::optional<double> yT;
  double T = 1.0;

  bool has_velocities() const { return y0.has_value() && yT.has_value(); }
  /// DomainError unless T > 0 and all data finite.
  void validate() const;
};

struct SolverConfig {
  double rtol = 1e-10;
  double atol = 1e-12;
  /// Newton stops when the max-norm of the shooting residual drops below this.
  double bvp_tol = 1e-9;
  int max_newton = 50;
  /// 1 = single shooting; m > 1 = multiple shooting over m equal segments.
  int segments = 1;
  /// Nodes of the returned path (intervals = nodes - 1).
  int nodes = 2001;
  /// Explicit initial guess for the free initial components: (p(0), lambda(0)) for
  /// Hamilton-Pontryagin, (x''(0), x'''(0)) for the fourth-order problem.
  std::optional<std::array<double, 2>> initial_guess;
  /// Langevin models only: seed Newton from the fourth-order problem linearized at x0.
  bool warm_start = false;

  // Boundary-velocity optimization.
  double vel_tol = 1e-6;
  int max_outer = 500;
  int restarts = 5;
  std::uint64_t seed = 0;
};

struct BvpReport {
  int iterations = 0;
  /// Final max-norm of the shooting residual (terminal mismatch plus, for multiple
  /// shooting, segment continuity defects).
  double mismatch = 0.0;
  int segments = 1;
};

/// Time derivative of the first-order Hamilton-Pontryagin system:
///   phi1' = g,  phi2' = c^2 p + f - Lambda,
///   p'    = -p f_y + f_yy/2 + lambda g_y,
///   lambda' = p f_x - f_xy/2 - lambda g_x.
HPState hp_rhs(const DegenerateModel& model, const HPState& state);

struct HpSolution {
  Path path;  // dphi2 channel = c^2 p + f - Lambda
  std::vector<double> multiplier;  // lambda(t) on the path grid
  std::vector<double> conjugate;   // p(t) on the path grid
  std::array<double, 2> initial_unknowns{};  // converged (p(0), lambda(0))
  BvpReport report;
};

/// Shooting on (p(0), lambda(0)) against (phi1(T), phi2(T)) = (xT, yT). Requires
/// both boundary velocities. Throws NoConvergence or IntegrationFailure.
HpSolution solve_hp_bvp(const DegenerateModel& model, const BoundaryProblem& problem,
                        const SolverConfig& cfg = {});
/// As above; honours cfg.warm_start.
HpSolution solve_hp_bvp(const LangevinModel& model, const BoundaryProblem& problem,
                        const SolverConfig& cfg = {});

/// (x', x'', x''', x'''') for the fourth-order Euler-Lagrange equation with
///   x'''' = -x''(2U''(x) - gamma^2) - x'^2 U'''(x) - (U'(x) + Lambda) U''(x).
std::array<double, 4> el4_rhs(const LangevinModel& model, const std::array<double, 4>& state);

struct El4Solution {
  Path path;  // phi2 = x', dphi2 = x''
  std::array<double, 2> initial_unknowns{};  // converged (x''(0), x'''(0))
  BvpReport report;
};

/// Shooting on (x''(0), x'''(0)) against (x(T), x'(T)) = (xT, yT).
El4Solution solve_el4_bvp(const LangevinModel& model, const BoundaryProblem& problem,
                          const SolverConfig& cfg = {});

/// Initial guess (x''(0), x'''(0)) from the fourth-order problem with U' linearized
/// at x0. Empty when the linearization is degenerate (U''(x0) = 0, repeated roots).
std::optional<std::array<double, 2>> linearized_el4_guess(const LangevinModel& model,
                                                         const BoundaryProblem& problem);

/// x(t) = offset + sum_i coeffs[i] exp(exponents[i] t).
struct QuadraticMPTP {
  std::vector<double> exponents;
  std::vector<double> coeffs;
  double offset = 0.0;

  double position(double t) const;
  /// order-th time derivative, order >= 1.
  double derivative(double t, int order) const;
  /// Samples (x, x', x'') on `nodes` uniform nodes of [0, T].
  Path sample(double T, int nodes) const;
};

/// Sorted roots of r^4 - (2 + gamma^2) r^2 + 1 = 0.
std::array<double, 4> quadratic_el4_exponents(double gamma);
/// (-gamma - sqrt(gamma^2+4))/2 and (-gamma + sqrt(gamma^2+4))/2.
std::array<double, 2> quadratic_global_exponents(double gamma);

/// Closed-form solution of the fourth-order problem for U(x) = -x^2/2 with full
/// boundary data. Throws SingularSystem when the 4x4 system is numerically singular.
QuadraticMPTP quadratic_analytic_mptp(double gamma, double Lambda,
                                      const BoundaryProblem& problem);

struct GlobalQuadraticMPTP {
  QuadraticMPTP solution;
  double y0 = 0.0;  // induced optimal boundary velocities
  double yT = 0.0;
};

/// Two-exponent global minimizer between configurations x0 and xT for U(x) = -x^2/2;
/// its action equals -gamma T / 2.
GlobalQuadraticMPTP quadratic_global_mptp(double gamma, double Lambda, double x0, double xT,
                                          double T);

struct VelocityOptimum {
  double y0 = 0.0;
  double yT = 0.0;
  Path path;
  double action = 0.0;
  int evaluations = 0;       // objective calls over all restarts
  int restarts_converged = 0;
  double simplex_diameter = 0.0;
  BvpReport inner;           // report of the final inner solve
};

/// Minimizes the action over boundary velocities (y0, yT) by Nelder-Mead, each
/// objective call solving the fourth-order problem. Runs cfg.restarts starts (the
/// first from the straight-line velocity, the rest randomly perturbed with
/// cfg.seed) and keeps the best. Trial points whose inner solve fails count as
/// +infinity; if every start fails the last inner error propagates.
VelocityOptimum optimize_boundary_velocities(const LangevinModel& model, double x0, double xT,
                                             double T, const SolverConfig& cfg = {});

/// Noise-free flow phi1' = g, phi2' = f - Lambda from z0 over [0, T] on `nodes`
/// nodes, with the exact dphi2 channel. Its OM integrand reduces to f_y / 2.
Path deterministic_flow(const DegenerateModel& model, std::array<double, 2> z0, double T,
                        int nodes, const SolverConfig& cfg = {});

/// base + kappa * (t^2, 2t, 2) on (phi1, phi2, dphi2). Keeps phi1' = phi2 intact, so
/// it is constraint-preserving for models with g(x, y) = y. Needs a dphi2 channel.
Path bend_path(const Path& base, double kappa);

}  // namespace omlevy
