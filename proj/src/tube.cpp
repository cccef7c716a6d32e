#include <algorithm>
#include <cmath>
#include <limits>

#include "euler_detail.hpp"
#include "omlevy/errors.hpp"
#include "omlevy/parallel.hpp"
#include "omlevy/simulate.hpp"

namespace omlevy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Reference {
  std::vector<double> x, y;
};

Reference resample(const Path& phi, int steps) {
  Reference r;
  r.x.resize(static_cast<std::size_t>(steps) + 1);
  r.y.resize(r.x.size());
  for (int k = 0; k <= steps; ++k) {
    const double s = static_cast<double>(k) * phi.n / steps;
    const int i = std::min(static_cast<int>(std::floor(s)), phi.n - 1);
    const double w = s - i;
    r.x[k] = (1.0 - w) * phi.phi1[i] + w * phi.phi1[i + 1];
    r.y[k] = (1.0 - w) * phi.phi2[i] + w * phi.phi2[i + 1];
  }
  return r;
}

/// Sup-norm distances of one simulated path to each reference. Simulation stops
/// once every distance exceeds `cutoff`; a blow-up yields infinite distances.
void distances(const DegenerateModel& model, const std::vector<Reference>& refs, int steps,
               double T, double cutoff, RandomStream& rng, double delta,
               std::vector<double>& dist) {
  std::fill(dist.begin(), dist.end(), 0.0);
  try {
    detail::euler_run(model, refs[0].x[0], refs[0].y[0], steps, T, rng, delta, nullptr,
                      [&](int k, double x, double y) {
                        bool any_inside = false;
                        for (std::size_t r = 0; r < refs.size(); ++r) {
                          const double d =
                              std::max(std::abs(x - refs[r].x[k]), std::abs(y - refs[r].y[k]));
                          dist[r] = std::max(dist[r], d);
                          any_inside = any_inside || dist[r] <= cutoff;
                        }
                        return any_inside;
                      });
  } catch (const BlowUp&) {
    std::fill(dist.begin(), dist.end(), kInf);
  }
}

bool hit(double dist, double eps) { return std::isfinite(dist) && dist <= eps; }

struct Counts {
  std::vector<std::vector<long long>> hits;  // [epsilon][reference]
  long long joint = 0;                       // both of references 0 and 1 at epsilon 0
};

Counts run_tubes(const DegenerateModel& model, const std::vector<const Path*>& phis,
                 const std::vector<double>& epsilons, long long n, double dt,
                 std::uint64_t seed, const SimulationOptions& opts) {
  if (n <= 0) throw DomainError("tube estimation: sample count must be positive");
  for (double e : epsilons) {
    if (!(e > 0.0)) throw DomainError("tube estimation: epsilon must be positive");
  }
  const Path& first = *phis.front();
  first.validate();
  for (const Path* p : phis) {
    p->validate();
    if (p->T != first.T || p->phi1[0] != first.phi1[0] || p->phi2[0] != first.phi2[0]) {
      throw DomainError("tube estimation: reference paths must share initial point and horizon");
    }
  }
  const double T = first.T;
  const int steps = euler_steps(T, dt);
  std::vector<Reference> refs;
  for (const Path* p : phis) refs.push_back(resample(*p, steps));
  const double cutoff = *std::max_element(epsilons.begin(), epsilons.end());

  const int workers = std::max(1, opts.threads);
  std::vector<Counts> local(static_cast<std::size_t>(workers));
  for (auto& c : local) {
    c.hits.assign(epsilons.size(), std::vector<long long>(phis.size(), 0));
  }
  std::vector<std::vector<double>> scratch(static_cast<std::size_t>(workers),
                                           std::vector<double>(phis.size()));
  parallel_for(n, workers, [&](long long i, int w) {
    RandomStream rng(seed, static_cast<std::uint64_t>(i));
    auto& dist = scratch[static_cast<std::size_t>(w)];
    distances(model, refs, steps, T, cutoff, rng, opts.delta, dist);
    auto& c = local[static_cast<std::size_t>(w)];
    for (std::size_t j = 0; j < epsilons.size(); ++j) {
      for (std::size_t r = 0; r < phis.size(); ++r) c.hits[j][r] += hit(dist[r], epsilons[j]);
    }
    if (phis.size() > 1 && hit(dist[0], epsilons[0]) && hit(dist[1], epsilons[0])) ++c.joint;
  });
  Counts total = std::move(local[0]);
  for (std::size_t w = 1; w < local.size(); ++w) {
    for (std::size_t j = 0; j < epsilons.size(); ++j) {
      for (std::size_t r = 0; r < phis.size(); ++r) total.hits[j][r] += local[w].hits[j][r];
    }
    total.joint += local[w].joint;
  }
  return total;
}

}  // namespace

TubeEstimate wilson_estimate(long long hits, long long n, double epsilon) {
  if (n <= 0 || hits < 0 || hits > n) throw DomainError("wilson_estimate: need 0 <= hits <= n");
  constexpr double z = 1.959963984540054;
  TubeEstimate e;
  e.epsilon = epsilon;
  e.hits = hits;
  e.n = n;
  const double nn = static_cast<double>(n);
  e.p_hat = static_cast<double>(hits) / nn;
  if (hits == 0) {
    e.ci_low = 0.0;
    e.ci_high = 1.0 - std::pow(0.05, 1.0 / nn);
    e.one_sided = true;
    return e;
  }
  const double denom = 1.0 + z * z / nn;
  const double centre = (e.p_hat + z * z / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(e.p_hat * (1.0 - e.p_hat) / nn + z * z / (4.0 * nn * nn)) / denom;
  e.ci_low = std::min(e.p_hat, std::max(0.0, centre - half));
  e.ci_high = std::max(e.p_hat, std::min(1.0, centre + half));
  return e;
}

std::vector<TubeEstimate> estimate_tube_probabilities(const DegenerateModel& model,
                                                      const Path& phi,
                                                      const std::vector<double>& epsilons,
                                                      long long n, double dt,
                                                      std::uint64_t seed,
                                                      const SimulationOptions& opts) {
  if (epsilons.empty()) return {};
  const Counts c = run_tubes(model, {&phi}, epsilons, n, dt, seed, opts);
  std::vector<TubeEstimate> out;
  for (std::size_t j = 0; j < epsilons.size(); ++j) {
    out.push_back(wilson_estimate(c.hits[j][0], n, epsilons[j]));
  }
  return out;
}

TubeEstimate estimate_tube_probability(const DegenerateModel& model, const Path& phi,
                                       double epsilon, long long n, double dt,
                                       std::uint64_t seed, const SimulationOptions& opts) {
  return estimate_tube_probabilities(model, phi, {epsilon}, n, dt, seed, opts).front();
}

bool RatioReport::within(double rel_tol, double se_mult) const {
  if (degenerate) return false;
  return std::abs(difference) <= std::max(rel_tol * std::abs(delta_theory), se_mult * std_error);
}

RatioReport om_ratio_check(const DegenerateModel& model, const Path& phi_a, const Path& phi_b,
                           double epsilon, long long n, double dt, std::uint64_t seed,
                           const SimulationOptions& opts, const ActionOptions& action_opts) {
  RatioReport r;
  r.action_a = action(model, phi_a, action_opts);
  r.action_b = action(model, phi_b, action_opts);
  r.delta_theory = r.action_b - r.action_a;

  const Counts c = run_tubes(model, {&phi_a, &phi_b}, {epsilon}, n, dt, seed, opts);
  r.a = wilson_estimate(c.hits[0][0], n, epsilon);
  r.b = wilson_estimate(c.hits[0][1], n, epsilon);
  r.joint_hits = c.joint;

  const long long ha = r.a.hits, hb = r.b.hits;
  if (ha == 0 || hb == 0) {
    r.degenerate = true;
    r.delta_hat = std::numeric_limits<double>::quiet_NaN();
    r.difference = r.delta_hat;
    r.std_error = r.delta_hat;
    if (ha == 0 && hb > 0) {
      r.bound_kind = +1;
      r.bound = std::log(r.a.ci_high / r.b.p_hat);
    } else if (hb == 0 && ha > 0) {
      r.bound_kind = -1;
      r.bound = std::log(r.a.p_hat / r.b.ci_high);
    } else {
      r.bound = r.delta_hat;
    }
    return r;
  }
  r.delta_hat = std::log(static_cast<double>(ha)) - std::log(static_cast<double>(hb));
  r.difference = r.delta_hat - r.delta_theory;
  const double pa = r.a.p_hat, pb = r.b.p_hat;
  const double pab = static_cast<double>(c.joint) / static_cast<double>(n);
  const double var =
      ((1.0 - pa) / pa + (1.0 - pb) / pb - 2.0 * (pab - pa * pb) / (pa * pb)) /
      static_cast<double>(n);
  r.std_error = std::sqrt(std::max(0.0, var));
  return r;
}

}  // namespace omlevy
