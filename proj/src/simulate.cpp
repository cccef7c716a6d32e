#include "omlevy/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "euler_detail.hpp"
#include "omlevy/errors.hpp"
#include "omlevy/parallel.hpp"

namespace omlevy {

int euler_steps(double T, double dt) {
  if (!(dt > 0.0) || !(T > 0.0)) throw DomainError("simulation: T and dt must be positive");
  const double ratio = T / dt;
  if (!(ratio >= 2.0 - 1e-9) || ratio > 1e9) {
    throw DomainError("simulation: need 2 <= T/dt <= 1e9");
  }
  return static_cast<int>(std::llround(ratio));
}

SamplePath simulate_sde(const DegenerateModel& model, std::array<double, 2> z0, double T,
                        double dt, RandomStream& rng, const SimulationOptions& opts) {
  const int steps = euler_steps(T, dt);
  SamplePath out;
  out.seed = rng.key();
  out.path = make_path(0.0, T, steps);
  auto& xs = out.path.phi1;
  auto& ys = out.path.phi2;
  detail::euler_run(model, z0[0], z0[1], steps, T, rng, opts.delta, &out.jumps,
                    [&](int k, double x, double y) {
                      xs[k] = x;
                      ys[k] = y;
                      return true;
                    });
  return out;
}

BridgeEnsemble simulate_bridge_ensemble(const DegenerateModel& model, std::array<double, 2> z0,
                                        double xT, double end_tol, int n_keep, double T,
                                        double dt, std::uint64_t master_seed,
                                        const SimulationOptions& opts, long long max_attempts) {
  if (!(end_tol > 0.0)) throw DomainError("bridge ensemble: end_tol must be positive");
  if (n_keep < 0) throw DomainError("bridge ensemble: n_keep must be non-negative");
  euler_steps(T, dt);
  BridgeEnsemble out;
  if (n_keep == 0) return out;

  const long long batch = std::max<long long>(64, 16LL * std::max(1, opts.threads));
  long long base = 0;
  while (static_cast<int>(out.kept.size()) < n_keep) {
    if (base >= max_attempts) {
      throw BudgetExceeded("bridge ensemble: " + std::to_string(base) +
                               " attempts exhausted with " + std::to_string(out.kept.size()) +
                               " accepted",
                           base, static_cast<long long>(out.kept.size()));
    }
    const long long count = std::min(batch, max_attempts - base);
    std::vector<std::optional<SamplePath>> sims(static_cast<std::size_t>(count));
    parallel_for(count, opts.threads, [&](long long j, int) {
      RandomStream rng(master_seed, static_cast<std::uint64_t>(base + j));
      try {
        sims[static_cast<std::size_t>(j)] = simulate_sde(model, z0, T, dt, rng, opts);
      } catch (const BlowUp&) {
        sims[static_cast<std::size_t>(j)].reset();
      }
    }, 4);
    for (long long j = 0; j < count && static_cast<int>(out.kept.size()) < n_keep; ++j) {
      BridgeAttempt a;
      a.seed = derive_seed(master_seed, static_cast<std::uint64_t>(base + j));
      auto& sim = sims[static_cast<std::size_t>(j)];
      a.endpoint_error = sim ? std::abs(sim->path.phi1.back() - xT)
                             : std::numeric_limits<double>::infinity();
      a.accepted = sim && a.endpoint_error <= end_tol;
      out.manifest.push_back(a);
      out.attempts = base + j + 1;
      if (a.accepted) out.kept.push_back(std::move(*sim));
    }
    base += count;
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> percentile_band(
    const std::vector<SamplePath>& paths, double q_low, double q_high) {
  if (paths.empty()) throw DomainError("percentile_band: empty ensemble");
  if (!(0.0 <= q_low && q_low <= q_high && q_high <= 1.0)) {
    throw DomainError("percentile_band: need 0 <= q_low <= q_high <= 1");
  }
  const std::size_t nodes = paths.front().path.nodes();
  for (const auto& p : paths) {
    if (p.path.nodes() != nodes) throw DomainError("percentile_band: grids differ");
  }
  auto quantile = [](const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return (1.0 - w) * sorted[lo] + w * sorted[hi];
  };
  std::vector<double> lower(nodes), upper(nodes), column(paths.size());
  for (std::size_t i = 0; i < nodes; ++i) {
    for (std::size_t k = 0; k < paths.size(); ++k) column[k] = paths[k].path.phi1[i];
    std::sort(column.begin(), column.end());
    lower[i] = quantile(column, q_low);
    upper[i] = quantile(column, q_high);
  }
  return {lower, upper};
}

double band_coverage(const std::vector<double>& lower, const std::vector<double>& upper,
                     const std::vector<double>& reference) {
  if (lower.size() != reference.size() || upper.size() != reference.size() || reference.empty()) {
    throw DomainError("band_coverage: size mismatch");
  }
  std::size_t inside = 0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    if (lower[i] <= reference[i] && reference[i] <= upper[i]) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(reference.size());
}

}  // namespace omlevy
