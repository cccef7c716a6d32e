#include "omlevy/errors.hpp"
#include "omlevy/ode.hpp"
#include "omlevy/pathways.hpp"

namespace omlevy {

Path deterministic_flow(const DegenerateModel& model, std::array<double, 2> z0, double T,
                        int nodes, const SolverConfig& cfg) {
  if (!(T > 0.0)) throw DomainError("deterministic_flow: T must be positive");
  if (nodes < 3) throw GridTooCoarse("deterministic_flow: need at least 3 nodes");
  const double Lambda = model.lambda();
  ode::Rhs<2> rhs = [&](const ode::State<2>& s, ode::State<2>& d) {
    d[0] = model.g(s[0], s[1]);
    d[1] = model.f(s[0], s[1]) - Lambda;
  };
  Path path = make_path(0.0, T, nodes - 1, true);
  std::vector<double> times(path.nodes());
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = path.time(static_cast<int>(i));
  ode::Options opts;
  opts.rtol = cfg.rtol;
  opts.atol = cfg.atol;
  const auto states = ode::integrate_on_times<2>(rhs, {z0[0], z0[1]}, times, opts);
  for (std::size_t i = 0; i < states.size(); ++i) {
    path.phi1[i] = states[i][0];
    path.phi2[i] = states[i][1];
    (*path.dphi2)[i] = model.f(states[i][0], states[i][1]) - Lambda;
  }
  return path;
}

Path bend_path(const Path& base, double kappa) {
  if (!base.dphi2) throw DomainError("bend_path: base path needs a dphi2 channel");
  Path out = base;
  for (std::size_t i = 0; i < out.nodes(); ++i) {
    const double t = out.time(static_cast<int>(i)) - out.t0;
    out.phi1[i] += kappa * t * t;
    out.phi2[i] += 2.0 * kappa * t;
    (*out.dphi2)[i] += 2.0 * kappa;
  }
  return out;
}

}  // namespace omlevy
