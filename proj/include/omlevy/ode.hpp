#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "omlevy/errors.hpp"

namespace omlevy::ode {

template <std::size_t N>
using State = std::array<double, N>;

/// Autonomous right-hand side: writes dx/dt for state x.
template <std::size_t N>
using Rhs = std::function<void(const State<N>&, State<N>&)>;

struct Options {
  double rtol = 1e-10;
  double atol = 1e-12;
  /// Upper bound on steps between two requested output times.
  int max_steps = 200000;
};

/// Integrates with the embedded Runge-Kutta-Fehlberg 7(8) pair under step-size
/// control and returns the state at each of `times` (ascending, times[0] = start).
/// Throws IntegrationFailure on step-size underflow, step-count exhaustion or a
/// non-finite / overflowing state.
template <std::size_t N>
std::vector<State<N>> integrate_on_times(const Rhs<N>& rhs, State<N> x,
                                         const std::vector<double>& times,
                                         const Options& opts = {}) {
  namespace odeint = boost::numeric::odeint;
  auto guarded = [&rhs](const State<N>& s, State<N>& d, double) {
    for (double v : s) {
      if (!std::isfinite(v) || std::abs(v) > 1e150) {
        throw IntegrationFailure("ODE state left the representable range (blow-up)");
      }
    }
    rhs(s, d);
  };
  std::vector<State<N>> out;
  out.reserve(times.size());
  auto observe = [&out](const State<N>& s, double) { out.push_back(s); };
  auto stepper = odeint::make_controlled(opts.atol, opts.rtol,
                                         odeint::runge_kutta_fehlberg78<State<N>>());
  double dt0 = times.size() > 1 ? (times.back() - times.front()) / 1000.0 : 1e-3;
  if (times.size() > 1) dt0 = std::min(dt0, times[1] - times[0]);
  try {
    odeint::integrate_times(stepper, guarded, x, times.begin(), times.end(), dt0, observe,
                            odeint::max_step_checker(opts.max_steps));
  } catch (const odeint::odeint_error& e) {
    throw IntegrationFailure(std::string("ODE integration failed: ") + e.what());
  }
  if (out.size() != times.size()) throw IntegrationFailure("ODE integration stopped early");
  return out;
}

template <std::size_t N>
State<N> integrate_to(const Rhs<N>& rhs, const State<N>& x, double t0, double t1,
                      const Options& opts = {}) {
  return integrate_on_times<N>(rhs, x, {t0, t1}, opts).back();
}

}  // namespace omlevy::ode
