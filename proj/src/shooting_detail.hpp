#pragma once

#include <array>
#include <vector>

#include "omlevy/ode.hpp"
#include "omlevy/pathways.hpp"

namespace omlevy::detail {

using State4 = ode::State<4>;

/// Two-point problem for a 4-dimensional autonomous system whose components 0 and 1
/// are prescribed at both ends and components 2 and 3 are free at t = 0.
struct ShootingProblem {
  ode::Rhs<4> rhs;
  double T = 1.0;
  std::array<double, 2> start{};   // components 0, 1 at t = 0
  std::array<double, 2> target{};  // components 0, 1 at t = T
};

struct ShootingOutcome {
  std::vector<State4> segment_starts;  // converged state at each segment start
  BvpReport report;
};

/// Damped Newton with forward-difference Jacobian (step 1e-7 (1 + |u|)) on the
/// single- or multiple-shooting residual.
ShootingOutcome shoot(const ShootingProblem& prob, std::array<double, 2> guess,
                      const SolverConfig& cfg);

/// Re-integrates a converged solution onto `nodes` uniform nodes of [0, T].
std::vector<State4> sample_solution(const ShootingProblem& prob, const ShootingOutcome& sol,
                                    int nodes, const SolverConfig& cfg);

ode::Rhs<4> el4_system(const LangevinModel& model);

}  // namespace omlevy::detail
