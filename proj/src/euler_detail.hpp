#pragma once

#include <cmath>
#include <sstream>

#include "omlevy/errors.hpp"
#include "omlevy/levy.hpp"
#include "omlevy/model.hpp"
#include "omlevy/rng.hpp"

namespace omlevy::detail {

/// Euler-Maruyama core shared by path simulation and tube estimation.
/// visit(k, x, y) is called for nodes k = 0..steps; returning false stops early.
template <class Visit>
void euler_run(const DegenerateModel& model, double x, double y, int steps, double T,
               RandomStream& rng, double delta, JumpTrain* jumps_out, Visit&& visit) {
  const double dt = T / steps;
  const double sdt = model.c * std::sqrt(dt);

  JumpTrain jumps;
  double jump_drift = 0.0;
  if (model.measure) {
    jumps = sample_jumps(*model.measure, T, delta, rng);
    jump_drift = jumps.compensator_drift - model.measure->lambda_mean();
  }
  std::size_t next_jump = 0;

  if (!visit(0, x, y)) {
    if (jumps_out) *jumps_out = std::move(jumps);
    return;
  }
  for (int k = 0; k < steps; ++k) {
    const double gx = model.g(x, y);
    const double fy = model.f(x, y);
    double y_new = y + (fy + jump_drift) * dt + sdt * rng.normal();
    // jumps in (t_k, t_{k+1}] land at the end of step k
    const double t_end = T * static_cast<double>(k + 1) / steps;
    while (next_jump < jumps.times.size() &&
           (jumps.times[next_jump] <= t_end || k + 1 == steps)) {
      y_new += jumps.sizes[next_jump++];
    }
    const double x_new = x + gx * dt;
    if (!std::isfinite(x_new) || !std::isfinite(y_new)) {
      std::ostringstream os;
      os << "simulation blew up after t = " << T * static_cast<double>(k) / steps
         << " (last finite state " << x << ", " << y << ")";
      throw BlowUp(os.str(), T * static_cast<double>(k) / steps, x, y);
    }
    x = x_new;
    y = y_new;
    if (!visit(k + 1, x, y)) break;
  }
  if (jumps_out) *jumps_out = std::move(jumps);
}

}  // namespace omlevy::detail
