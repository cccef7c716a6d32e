#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "omlevy/errors.hpp"
#include "omlevy/pathways.hpp"
#include "shooting_detail.hpp"

namespace omlevy {

namespace detail {

namespace {

ode::Options ode_options(const SolverConfig& cfg) {
  ode::Options o;
  o.rtol = cfg.rtol;
  o.atol = cfg.atol;
  return o;
}

double segment_time(const ShootingProblem& prob, int k, int m) {
  return prob.T * static_cast<double>(k) / m;
}

State4 unpack_start(const ShootingProblem& prob, const Eigen::VectorXd& u, int k) {
  if (k == 0) return {prob.start[0], prob.start[1], u[0], u[1]};
  const int o = 2 + 4 * (k - 1);
  return {u[o], u[o + 1], u[o + 2], u[o + 3]};
}

Eigen::VectorXd residual(const ShootingProblem& prob, const Eigen::VectorXd& u, int m,
                         const ode::Options& opts) {
  Eigen::VectorXd F(u.size());
  for (int k = 0; k < m; ++k) {
    const State4 s = unpack_start(prob, u, k);
    const State4 e =
        ode::integrate_to<4>(prob.rhs, s, segment_time(prob, k, m), segment_time(prob, k + 1, m),
                             opts);
    if (k + 1 < m) {
      const State4 next = unpack_start(prob, u, k + 1);
      for (int j = 0; j < 4; ++j) F[4 * k + j] = e[j] - next[j];
    } else {
      F[4 * k] = e[0] - prob.target[0];
      F[4 * k + 1] = e[1] - prob.target[1];
    }
  }
  return F;
}

}  // namespace

ShootingOutcome shoot(const ShootingProblem& prob, std::array<double, 2> guess,
                      const SolverConfig& cfg) {
  const int m = std::max(1, cfg.segments);
  const ode::Options opts = ode_options(cfg);
  const int dim = 2 + 4 * (m - 1);

  Eigen::VectorXd u(dim);
  u[0] = guess[0];
  u[1] = guess[1];
  // Interior segment starts come from the guessed trajectory; if that blows up,
  // interpolate the boundary data instead.
  std::vector<State4> along;
  if (m > 1) {
    std::vector<double> times(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) times[k] = segment_time(prob, k, m);
    try {
      along = ode::integrate_on_times<4>(
          prob.rhs, {prob.start[0], prob.start[1], guess[0], guess[1]}, times, opts);
    } catch (const IntegrationFailure&) {
      along.clear();
    }
  }
  for (int k = 1; k < m; ++k) {
    const int o = 2 + 4 * (k - 1);
    if (!along.empty()) {
      for (int j = 0; j < 4; ++j) u[o + j] = along[k][j];
      continue;
    }
    const double w = static_cast<double>(k) / m;
    u[o] = (1.0 - w) * prob.start[0] + w * prob.target[0];
    u[o + 1] = (1.0 - w) * prob.start[1] + w * prob.target[1];
    u[o + 2] = guess[0];
    u[o + 3] = guess[1];
  }

  Eigen::VectorXd F = residual(prob, u, m, opts);
  double norm = F.lpNorm<Eigen::Infinity>();
  int it = 0;
  for (; it < cfg.max_newton && !(norm <= cfg.bvp_tol); ++it) {
    Eigen::MatrixXd J(dim, dim);
    for (int j = 0; j < dim; ++j) {
      Eigen::VectorXd up = u;
      const double h = 1e-7 * (1.0 + std::abs(u[j]));
      up[j] += h;
      J.col(j) = (residual(prob, up, m, opts) - F) / h;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (!lu.isInvertible()) {
      throw NoConvergence("shooting: singular Newton Jacobian", it, norm);
    }
    const Eigen::VectorXd delta = lu.solve(-F);
    if (!delta.allFinite()) throw NoConvergence("shooting: non-finite Newton step", it, norm);

    bool accepted = false;
    for (double alpha = 1.0; alpha >= 1.0 / 1024.0; alpha /= 2.0) {
      const Eigen::VectorXd trial = u + alpha * delta;
      Eigen::VectorXd Ft;
      try {
        Ft = residual(prob, trial, m, opts);
      } catch (const IntegrationFailure&) {
        continue;
      }
      const double tn = Ft.lpNorm<Eigen::Infinity>();
      if (tn < norm || tn <= cfg.bvp_tol) {
        u = trial;
        F = Ft;
        norm = tn;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw NoConvergence("shooting: line search could not reduce the residual", it + 1, norm);
    }
  }
  if (!(norm <= cfg.bvp_tol)) {
    std::ostringstream os;
    os << "shooting: no convergence after " << it << " Newton iterations (mismatch " << norm
       << ")";
    throw NoConvergence(os.str(), it, norm);
  }

  ShootingOutcome out;
  out.report = {it, norm, m};
  for (int k = 0; k < m; ++k) out.segment_starts.push_back(unpack_start(prob, u, k));
  return out;
}

std::vector<State4> sample_solution(const ShootingProblem& prob, const ShootingOutcome& sol,
                                    int nodes, const SolverConfig& cfg) {
  if (nodes < 3) throw GridTooCoarse("shooting: need at least 3 output nodes");
  const int m = static_cast<int>(sol.segment_starts.size());
  const long n = nodes - 1;
  std::vector<State4> out(static_cast<std::size_t>(nodes));
  const ode::Options opts = ode_options(cfg);
  for (int k = 0; k < m; ++k) {
    std::vector<double> times{segment_time(prob, k, m)};
    std::vector<long> index;
    bool start_is_node = false;
    long start_node = 0;
    for (long i = 0; i <= n; ++i) {
      const long seg = std::min<long>(m - 1, (i * m) / n);
      if (seg != k) continue;
      if (i * m == static_cast<long>(k) * n) {
        start_is_node = true;
        start_node = i;
        continue;
      }
      times.push_back(prob.T * static_cast<double>(i) / static_cast<double>(n));
      index.push_back(i);
    }
    if (start_is_node) out[static_cast<std::size_t>(start_node)] = sol.segment_starts[k];
    if (index.empty()) continue;
    const auto states = ode::integrate_on_times<4>(prob.rhs, sol.segment_starts[k], times, opts);
    for (std::size_t j = 0; j < index.size(); ++j) {
      out[static_cast<std::size_t>(index[j])] = states[j + 1];
    }
  }
  return out;
}

ode::Rhs<4> el4_system(const LangevinModel& model) {
  return [model](const State4& s, State4& d) {
    const auto r = el4_rhs(model, s);
    d = r;
  };
}

}  // namespace detail

HPState hp_rhs(const DegenerateModel& m, const HPState& s) {
  const double x = s.phi1, y = s.phi2;
  HPState d;
  d.phi1 = m.g(x, y);
  d.phi2 = m.c * m.c * s.p + m.f(x, y) - m.lambda();
  d.p = -s.p * m.f_y(x, y) + 0.5 * m.f_yy(x, y) + s.lambda * m.g_y(x, y);
  d.lambda = s.p * m.f_x(x, y) - 0.5 * m.f_xy(x, y) - s.lambda * m.g_x(x, y);
  return d;
}

std::array<double, 4> el4_rhs(const LangevinModel& model, const std::array<double, 4>& s) {
  const auto& U = model.potential;
  const double x = s[0], v = s[1], a = s[2];
  const double u2 = U.d2U(x);
  const double snap = -a * (2.0 * u2 - model.gamma * model.gamma) - v * v * U.d3U(x) -
                      (U.dU(x) + model.lambda()) * u2;
  return {v, a, s[3], snap};
}

namespace {

detail::ShootingProblem hp_problem(const DegenerateModel& model, const BoundaryProblem& bp) {
  detail::ShootingProblem prob;
  prob.rhs = [model](const detail::State4& s, detail::State4& d) {
    const HPState r = hp_rhs(model, {s[0], s[1], s[2], s[3]});
    d = {r.phi1, r.phi2, r.p, r.lambda};
  };
  prob.T = bp.T;
  prob.start = {bp.x0, *bp.y0};
  prob.target = {bp.xT, *bp.yT};
  return prob;
}

void require_velocities(const BoundaryProblem& bp, const char* who) {
  bp.validate();
  if (!bp.has_velocities()) {
    throw DomainError(std::string(who) + ": both boundary velocities are required");
  }
}

}  // namespace

HpSolution solve_hp_bvp(const DegenerateModel& model, const BoundaryProblem& bp,
                        const SolverConfig& cfg) {
  require_velocities(bp, "solve_hp_bvp");
  const auto prob = hp_problem(model, bp);
  const auto sol = detail::shoot(prob, cfg.initial_guess.value_or(std::array<double, 2>{}), cfg);
  const auto states = detail::sample_solution(prob, sol, cfg.nodes, cfg);

  HpSolution out;
  out.path = make_path(0.0, bp.T, cfg.nodes - 1, true);
  out.multiplier.resize(states.size());
  out.conjugate.resize(states.size());
  const double c2 = model.c * model.c;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& s = states[i];
    out.path.phi1[i] = s[0];
    out.path.phi2[i] = s[1];
    (*out.path.dphi2)[i] = c2 * s[2] + model.f(s[0], s[1]) - model.lambda();
    out.conjugate[i] = s[2];
    out.multiplier[i] = s[3];
  }
  out.initial_unknowns = {sol.segment_starts[0][2], sol.segment_starts[0][3]};
  out.report = sol.report;
  return out;
}

HpSolution solve_hp_bvp(const LangevinModel& model, const BoundaryProblem& bp,
                        const SolverConfig& cfg) {
  require_velocities(bp, "solve_hp_bvp");
  const DegenerateModel dm = model.to_degenerate();
  SolverConfig c = cfg;
  if (cfg.warm_start && !cfg.initial_guess) {
    if (const auto g = linearized_el4_guess(model, bp)) {
      // p = (x'' - f + Lambda)/c^2,  p' = (x''' - f_x x' - f_y x'')/c^2,  lambda = p' - gamma p
      const double x = bp.x0, y = *bp.y0;
      const double c2 = dm.c * dm.c;
      const double p0 = ((*g)[0] - dm.f(x, y) + dm.lambda()) / c2;
      const double pdot = ((*g)[1] - dm.f_x(x, y) * y - dm.f_y(x, y) * (*g)[0]) / c2;
      c.initial_guess = std::array<double, 2>{p0, pdot - model.gamma * p0};
    }
  }
  return solve_hp_bvp(dm, bp, c);
}

El4Solution solve_el4_bvp(const LangevinModel& model, const BoundaryProblem& bp,
                          const SolverConfig& cfg) {
  require_velocities(bp, "solve_el4_bvp");
  model.validate();
  detail::ShootingProblem prob;
  prob.rhs = detail::el4_system(model);
  prob.T = bp.T;
  prob.start = {bp.x0, *bp.y0};
  prob.target = {bp.xT, *bp.yT};

  std::array<double, 2> guess{};
  if (cfg.initial_guess) {
    guess = *cfg.initial_guess;
  } else if (cfg.warm_start) {
    guess = linearized_el4_guess(model, bp).value_or(guess);
  }
  const auto sol = detail::shoot(prob, guess, cfg);
  const auto states = detail::sample_solution(prob, sol, cfg.nodes, cfg);

  El4Solution out;
  out.path = make_path(0.0, bp.T, cfg.nodes - 1, true);
  for (std::size_t i = 0; i < states.size(); ++i) {
    out.path.phi1[i] = states[i][0];
    out.path.phi2[i] = states[i][1];
    (*out.path.dphi2)[i] = states[i][2];
  }
  out.initial_unknowns = {sol.segment_starts[0][2], sol.segment_starts[0][3]};
  out.report = sol.report;
  return out;
}

}  // namespace omlevy
