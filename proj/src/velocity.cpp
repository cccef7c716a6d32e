#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <boost/math/tools/roots.hpp>

#include "omlevy/errors.hpp"
#include "omlevy/ode.hpp"
#include "omlevy/pathways.hpp"
#include "omlevy/rng.hpp"
#include "shooting_detail.hpp"

namespace omlevy {

namespace {

using Point = std::array<double, 2>;

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Action of the fourth-order solution with the given boundary velocities, computed
/// by carrying the running action integral as a fifth ODE component.
class InnerObjective {
 public:
  InnerObjective(const LangevinModel& model, double x0, double xT, double T,
                 const SolverConfig& cfg)
      : model_(model), x0_(x0), xT_(xT), T_(T), cfg_(cfg) {
    cfg_.initial_guess.reset();
  }

  double operator()(const Point& y) {
    ++evaluations_;
    detail::ShootingProblem prob;
    prob.rhs = detail::el4_system(model_);
    prob.T = T_;
    prob.start = {x0_, y[0]};
    prob.target = {xT_, y[1]};

    // Candidate Newton seeds: continuation from the previous point, the seed of the
    // zero-residual path x'' = f - Lambda, and the linearized problem. The BVP may
    // have several solutions; the lowest-action one is kept.
    std::vector<Point> seeds;
    if (last_guess_) seeds.push_back(*last_guess_);
    const auto& U = model_.potential;
    const double acc = -model_.gamma * y[0] - U.dU(x0_) - model_.lambda();
    seeds.push_back({acc, -model_.gamma * acc - U.d2U(x0_) * y[0]});
    BoundaryProblem bp{x0_, y[0], xT_, y[1], T_};
    if (const auto lin = linearized_el4_guess(model_, bp)) seeds.push_back(*lin);

    double best = kInf;
    std::optional<Point> best_unknowns;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      bool duplicate = false;
      for (std::size_t j = 0; j < i; ++j) {
        duplicate = duplicate || (std::abs(seeds[i][0] - seeds[j][0]) < 1e-9 &&
                                  std::abs(seeds[i][1] - seeds[j][1]) < 1e-9);
      }
      if (duplicate) continue;
      try {
        const detail::ShootingOutcome sol = detail::shoot(prob, seeds[i], cfg_);
        const double value = path_action(sol);
        if (value < best) {
          best = value;
          best_unknowns = Point{sol.segment_starts[0][2], sol.segment_starts[0][3]};
        }
      } catch (const NumericalError& e) {
        last_error_ = e.what();
      }
    }
    if (best_unknowns) last_guess_ = best_unknowns;
    return best;
  }

  int evaluations() const { return evaluations_; }
  const std::optional<Point>& last_unknowns() const { return last_guess_; }
  const std::string& last_error() const { return last_error_; }

 private:
  double path_action(const detail::ShootingOutcome& sol) const {
    const double c2 = model_.mu * model_.gamma;
    const LangevinModel& m = model_;
    const ode::Rhs<5> augmented = [&m, c2](const ode::State<5>& s, ode::State<5>& d) {
      const auto r = el4_rhs(m, {s[0], s[1], s[2], s[3]});
      d = {r[0], r[1], r[2], r[3], 0.0};
      const double res = s[2] + m.gamma * s[1] + m.potential.dU(s[0]) + m.lambda();
      d[4] = 0.5 * res * res / c2 - 0.5 * m.gamma;
    };
    ode::Options opts;
    opts.rtol = cfg_.rtol;
    opts.atol = cfg_.atol;
    const int segs = static_cast<int>(sol.segment_starts.size());
    double total = 0.0;
    for (int k = 0; k < segs; ++k) {
      const auto& s = sol.segment_starts[k];
      const auto e = ode::integrate_to<5>(augmented, {s[0], s[1], s[2], s[3], 0.0},
                                          T_ * k / segs, T_ * (k + 1) / segs, opts);
      total += e[4];
    }
    return total;
  }

  LangevinModel model_;
  double x0_, xT_, T_;
  SolverConfig cfg_;
  std::optional<Point> last_guess_;
  int evaluations_ = 0;
  std::string last_error_;
};

struct SimplexResult {
  Point best{};
  double value = kInf;
  double diameter = kInf;
  bool converged = false;
};

double distance(const Point& a, const Point& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

double diameter(const std::array<Point, 3>& v) {
  return std::max({distance(v[0], v[1]), distance(v[0], v[2]), distance(v[1], v[2])});
}

// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
// Stops when the largest vertex distance drops below `tol`.
SimplexResult nelder_mead(InnerObjective& fn, const Point& start, double step, double tol,
                          int max_evals) {
  std::array<Point, 3> v{start, Point{start[0] + step, start[1]},
                         Point{start[0], start[1] + step}};
  std::array<double, 3> fv{};
  const int first = fn.evaluations();
  for (int i = 0; i < 3; ++i) fv[i] = fn(v[i]);
  auto used = [&] { return fn.evaluations() - first; };

  SimplexResult out;
  while (true) {
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const std::array<Point, 3> sv{v[idx[0]], v[idx[1]], v[idx[2]]};
    const std::array<double, 3> sf{fv[idx[0]], fv[idx[1]], fv[idx[2]]};
    v = sv;
    fv = sf;
    out.diameter = diameter(v);
    if (std::isfinite(fv[0]) && out.diameter < tol) {
      out.converged = true;
      break;
    }
    if (used() >= max_evals) break;

    const Point centroid{(v[0][0] + v[1][0]) / 2.0, (v[0][1] + v[1][1]) / 2.0};
    auto along = [&](double coef) {
      return Point{centroid[0] + coef * (v[2][0] - centroid[0]),
                   centroid[1] + coef * (v[2][1] - centroid[1])};
    };
    const Point xr = along(-1.0);
    const double fr = fn(xr);
    if (fr < fv[0]) {
      const Point xe = along(-2.0);
      const double fe = fn(xe);
      if (fe < fr) {
        v[2] = xe;
        fv[2] = fe;
      } else {
        v[2] = xr;
        fv[2] = fr;
      }
      continue;
    }
    if (fr < fv[1]) {
      v[2] = xr;
      fv[2] = fr;
      continue;
    }
    const bool outside = fr < fv[2];
    const Point xc = along(outside ? -0.5 : 0.5);
    const double fc = fn(xc);
    if (fc < (outside ? fr : fv[2])) {
      v[2] = xc;
      fv[2] = fc;
      continue;
    }
    for (int i = 1; i < 3; ++i) {
      v[i] = Point{v[0][0] + 0.5 * (v[i][0] - v[0][0]), v[0][1] + 0.5 * (v[i][1] - v[0][1])};
      fv[i] = fn(v[i]);
    }
  }
  out.best = v[0];
  out.value = fv[0];
  return out;
}

}  // namespace

namespace {

// The Langevin action is bounded below by -gamma T / 2, attained exactly by the
// noise-free flow of (y, f - Lambda). If such a flow from (x0, y0) reaches xT at
// time T for some y0, return (y0, y(T)) for the root closest to `slope`.
std::optional<Point> flow_start(const LangevinModel& model, double x0, double xT, double T,
                                double slope, const SolverConfig& cfg) {
  const DegenerateModel d = model.to_degenerate();
  const double Lambda = model.lambda();
  ode::Rhs<2> rhs = [&](const ode::State<2>& s, ode::State<2>& ds) {
    ds[0] = s[1];
    ds[1] = d.f(s[0], s[1]) - Lambda;
  };
  ode::Options opts;
  opts.rtol = cfg.rtol;
  opts.atol = cfg.atol;
  auto end = [&](double y0) -> std::optional<ode::State<2>> {
    try {
      return ode::integrate_to<2>(rhs, {x0, y0}, 0.0, T, opts);
    } catch (const IntegrationFailure&) {
      return std::nullopt;
    }
  };
  auto miss = [&](double y0) {
    const auto e = end(y0);
    return e ? (*e)[0] - xT : std::numeric_limits<double>::quiet_NaN();
  };

  constexpr int kGrid = 80;
  const double half = 10.0 * std::max(1.0, std::abs(slope));
  std::optional<double> root;
  double prev_y = slope - half;
  double prev_m = miss(prev_y);
  for (int i = 1; i <= kGrid; ++i) {
    const double y = slope - half + 2.0 * half * i / kGrid;
    const double m = miss(y);
    if (std::isfinite(prev_m) && std::isfinite(m) && (prev_m == 0.0 || prev_m * m < 0.0)) {
      double cand = prev_y;
      if (prev_m != 0.0) {
        boost::uintmax_t iters = 100;
        const auto br = boost::math::tools::toms748_solve(
            miss, prev_y, y, prev_m, m, boost::math::tools::eps_tolerance<double>(50), iters);
        cand = 0.5 * (br.first + br.second);
      }
      if (!root || std::abs(cand - slope) < std::abs(*root - slope)) root = cand;
    }
    prev_y = y;
    prev_m = m;
  }
  if (!root) return std::nullopt;
  const auto e = end(*root);
  if (!e) return std::nullopt;
  return Point{*root, (*e)[1]};
}

}  // namespace

VelocityOptimum optimize_boundary_velocities(const LangevinModel& model, double x0, double xT,
                                             double T, const SolverConfig& cfg) {
  BoundaryProblem{x0, std::nullopt, xT, std::nullopt, T}.validate();
  model.validate();
  InnerObjective objective(model, x0, xT, T, cfg);

  const double slope = (xT - x0) / T;
  const double spread = 2.0 * std::max(1.0, std::abs(slope));
  RandomStream rng(cfg.seed, 0x5EED);

  std::optional<SimplexResult> best;
  int converged = 0;
  const std::optional<Point> flow = flow_start(model, x0, xT, T, slope, cfg);
  for (int r = 0; r < std::max(1, cfg.restarts); ++r) {
    Point start{slope, slope};
    if (r == 0 && flow) {
      start = *flow;
    } else if (r > 0) {
      start[0] += spread * rng.normal();
      start[1] += spread * rng.normal();
    }
    const SimplexResult res =
        nelder_mead(objective, start, std::max(1.0, 0.5 * std::abs(slope)), cfg.vel_tol,
                    cfg.max_outer);
    if (!res.converged) continue;
    ++converged;
    if (!best || res.value < best->value) best = res;
  }
  if (!best) {
    if (!objective.last_error().empty()) {
      throw NoConvergence("velocity optimization: no start converged; last inner failure: " +
                              objective.last_error(),
                          objective.evaluations(), kInf);
    }
    throw NoConvergence("velocity optimization: simplex did not shrink below vel_tol within "
                        "max_outer evaluations",
                        objective.evaluations(), kInf);
  }

  // Re-evaluate at the optimum so the inner Newton seed belongs to that point.
  objective(best->best);
  BoundaryProblem bp{x0, best->best[0], xT, best->best[1], T};
  SolverConfig inner = cfg;
  inner.initial_guess = objective.last_unknowns();
  inner.warm_start = !inner.initial_guess.has_value();
  const El4Solution sol = solve_el4_bvp(model, bp, inner);

  VelocityOptimum out;
  out.y0 = best->best[0];
  out.yT = best->best[1];
  out.path = sol.path;
  out.action = action(model.to_degenerate(), sol.path);
  out.evaluations = objective.evaluations();
  out.restarts_converged = converged;
  out.simplex_diameter = best->diameter;
  out.inner = sol.report;
  return out;
}

}  // namespace omlevy
