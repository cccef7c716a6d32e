#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "omlevy/errors.hpp"
#include "omlevy/pathways.hpp"

using namespace omlevy;

namespace {

LangevinModel example_model() {
  LangevinModel m;
  m.potential = quadratic_potential();
  m.gamma = 3.0;
  m.mu = 0.8;
  m.measure = AlphaStableMeasure(0.5, 0.5);
  return m;
}

double sup_error(const Path& a, const Path& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.nodes(); ++i) {
    e = std::max({e, std::abs(a.phi1[i] - b.phi1[i]), std::abs(a.phi2[i] - b.phi2[i])});
  }
  return e;
}

// Bump vanishing with its first derivative at both ends, applied along g = y.
Path bump(const Path& p, double h) {
  Path out = p;
  const double w = std::numbers::pi / p.T;
  for (std::size_t i = 0; i < p.nodes(); ++i) {
    const double t = p.time(int(i)), s = std::sin(w * t), c = std::cos(w * t);
    out.phi1[i] += h * s * s * (1 + t);
    out.phi2[i] += h * (2 * w * s * c * (1 + t) + s * s);
    (*out.dphi2)[i] += h * (2 * w * w * (c * c - s * s) * (1 + t) + 4 * w * s * c);
  }
  return out;
}

}  // namespace

TEST_CASE("quadratic exponents") {
  const auto r = quadratic_el4_exponents(3.0);
  const double expect[] = {-3.302776, -0.302776, 0.302776, 3.302776};
  for (int i = 0; i < 4; ++i) {
    CHECK(r[i] == doctest::Approx(expect[i]).epsilon(1e-6));
    const double r2 = r[i] * r[i];
    CHECK(std::abs(r2 * r2 - 11 * r2 + 1) < 1e-12);
  }
  const double s = std::sqrt(13.0);
  const auto g = quadratic_global_exponents(3.0);
  CHECK(g[0] == doctest::Approx((-3 - s) / 2).epsilon(1e-15));
  CHECK(g[1] == doctest::Approx((-3 + s) / 2).epsilon(1e-15));
}

TEST_CASE("analytic MPTP matches determinant formula") {
  const double gamma = 3.0, T = 2.0, L = example_model().lambda();
  const BoundaryProblem bp{-1.0, 2.0, 1.0, -0.5, T};
  const auto sol = quadratic_analytic_mptp(gamma, L, bp);
  // Cramer's rule on columns A_i = (1, e^{r T}, r, r e^{r T}).
  Eigen::Matrix4d A;
  const auto r = quadratic_el4_exponents(gamma);
  for (int i = 0; i < 4; ++i) A.col(i) << 1, std::exp(r[i] * T), r[i], r[i] * std::exp(r[i] * T);
  const Eigen::Vector4d A0(-1 - L, 1 - L, 2.0, -0.5);
  for (int i = 0; i < 4; ++i) {
    Eigen::Matrix4d Ai = A;
    Ai.col(i) = A0;
    const double Ci = Ai.determinant() / A.determinant();
    bool matched = false;
    for (std::size_t k = 0; k < sol.exponents.size(); ++k) {
      if (std::abs(sol.exponents[k] - r[i]) < 1e-12) {
        CHECK(sol.coeffs[k] == doctest::Approx(Ci).epsilon(1e-9));
        matched = true;
      }
    }
    CHECK(matched);
  }
  CHECK(std::abs(sol.offset - L) < 1e-15);
  CHECK(sol.position(0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(sol.position(T) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sol.derivative(0, 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sol.derivative(T, 1) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("global quadratic MPTP") {
  const LangevinModel m = example_model();
  const auto g = quadratic_global_mptp(3.0, m.lambda(), -1.0, 1.0, 2.0);
  CHECK(std::abs(g.y0 - 5.8078) <= 1e-4);
  CHECK(std::abs(g.yT - 0.1904) <= 1e-4);
  CHECK(std::abs(action(m.to_degenerate(), g.solution.sample(2.0, 2001)) + 3.0) <= 1e-4);

  for (double gamma : {0.5, 3.0}) {
    for (double T : {0.7, 4.0}) {
      LangevinModel mm = m;
      mm.gamma = gamma;
      const auto gg = quadratic_global_mptp(gamma, mm.lambda(), 0.3, -2.0, T);
      CHECK(action(mm.to_degenerate(), gg.solution.sample(T, 2001)) ==
            doctest::Approx(-gamma * T / 2).epsilon(1e-9));
    }
  }

  // The four-exponent solution with the induced velocities is the global one.
  const BoundaryProblem bp{-1.0, g.y0, 1.0, g.yT, 2.0};
  CHECK(sup_error(quadratic_analytic_mptp(3.0, m.lambda(), bp).sample(2.0, 401),
                  g.solution.sample(2.0, 401)) < 1e-9);
}

TEST_CASE("right-hand sides vanish at equilibria") {
  const LangevinModel m = example_model();
  const DegenerateModel d = m.to_degenerate();
  const HPState s = hp_rhs(d, {m.lambda(), 0.0, 0.0, 0.0});
  CHECK(s.phi1 == 0.0);
  CHECK(std::abs(s.phi2) < 1e-15);
  CHECK(s.p == 0.0);
  CHECK(s.lambda == 0.0);
  for (double v : el4_rhs(m, {m.lambda(), 0.0, 0.0, 0.0})) CHECK(std::abs(v) < 1e-15);
}

TEST_CASE("shooting solvers reproduce the analytic MPTP") {
  const LangevinModel m = example_model();
  for (const BoundaryProblem bp : {BoundaryProblem{-1.0, 5.8078, 1.0, 0.1904, 2.0},
                                   BoundaryProblem{-1.0, 0.0, 1.0, 0.0, 2.0}}) {
    const Path exact = quadratic_analytic_mptp(3.0, m.lambda(), bp).sample(2.0, 2001);
    CHECK(sup_error(solve_el4_bvp(m, bp).path, exact) <= 1e-5);
    const auto hp = solve_hp_bvp(m, bp);
    CHECK(sup_error(hp.path, exact) <= 1e-5);
    CHECK(hp.report.mismatch <= 1e-9);

    SolverConfig multi;
    multi.segments = 4;
    const auto hp4 = solve_hp_bvp(m, bp, multi);
    CHECK(hp4.report.segments == 4);
    CHECK(sup_error(hp4.path, exact) <= 1e-5);

    SolverConfig warm;
    warm.warm_start = true;
    CHECK(sup_error(solve_hp_bvp(m, bp, warm).path, exact) <= 1e-5);

    SolverConfig seeded;
    seeded.initial_guess = hp.initial_unknowns;
    CHECK(solve_hp_bvp(m, bp, seeded).report.iterations <= 1);
  }

  const double L = m.lambda();
  const auto still = solve_hp_bvp(m, BoundaryProblem{L, 0.0, L, 0.0, 1.5});
  for (std::size_t i = 0; i < still.path.nodes(); ++i) {
    CHECK(std::abs(still.path.phi1[i] - L) < 1e-12);
    CHECK(std::abs(still.conjugate[i]) < 1e-12);
    CHECK(std::abs(still.multiplier[i]) < 1e-12);
  }
}

TEST_CASE("HP solution is stationary for a non-Langevin drift") {
  DriftParts parts;
  parts.g = [](double, double y) { return y; };
  parts.f = [](double x, double y) { return -(1 + 0.3 * x * x) * y - x + 0.2 * std::sin(x); };
  parts.g_x = [](double, double) { return 0.0; };
  parts.g_y = [](double, double) { return 1.0; };
  parts.f_x = [](double x, double y) { return -0.6 * x * y - 1 + 0.2 * std::cos(x); };
  parts.f_y = [](double x, double) { return -(1 + 0.3 * x * x); };
  parts.f_xy = [](double x, double) { return -0.6 * x; };
  parts.f_yy = [](double, double) { return 0.0; };
  const DegenerateModel d = make_degenerate_model(parts, 1.2, AlphaStableMeasure(0.6, -0.3));
  const BoundaryProblem bp{0.0, 0.5, 1.0, 0.0, 1.5};
  const auto hp = solve_hp_bvp(d, bp);
  CHECK(kinematic_residual(d, hp.path) < 1e-8);
  CHECK(hp.path.phi1.back() == doctest::Approx(1.0).epsilon(1e-9));

  auto slope = [&](const Path& p) {
    const double h = 1e-5;
    return (action(d, bump(p, h)) - action(d, bump(p, -h))) / (2 * h);
  };
  const double at_solution = slope(hp.path);
  const double elsewhere = slope(bump(hp.path, 0.3));
  CHECK(std::abs(elsewhere) > 1e-2);
  CHECK(std::abs(at_solution) < 1e-6 * std::max(1.0, std::abs(elsewhere)));
}

TEST_CASE("solver failures and validation") {
  const LangevinModel m = example_model();
  CHECK_THROWS_AS(solve_el4_bvp(m, BoundaryProblem{-1.0, 0.0, 1.0, 0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(solve_hp_bvp(m, BoundaryProblem{-1.0, std::nullopt, 1.0, 0.0, 2.0}),
                  DomainError);

  LangevinModel dw;
  dw.potential = double_well_potential();
  dw.gamma = 1.0;
  dw.mu = 1.0;
  SolverConfig one;
  one.max_newton = 1;
  one.initial_guess = std::array<double, 2>{40.0, -300.0};
  try {
    solve_el4_bvp(dw, BoundaryProblem{-1.0, 0.0, 1.0, 0.0, 5.0}, one);
    FAIL("expected NoConvergence");
  } catch (const NoConvergence& e) {
    CHECK(e.iterations() <= 1);
  } catch (const IntegrationFailure&) {
    // A blow-up of the trial trajectory is an equally valid failure mode.
  }
}

TEST_CASE("velocity optimization") {
  const LangevinModel m = example_model();
  SolverConfig cfg;
  cfg.seed = 3;
  const auto opt = optimize_boundary_velocities(m, -1.0, 1.0, 2.0, cfg);
  CHECK(std::abs(opt.y0 - 5.807763) < 1e-4);
  CHECK(std::abs(opt.yT - 0.190416) < 1e-4);
  CHECK(std::abs(opt.action + 3.0) < 1e-6);
  CHECK(opt.simplex_diameter < cfg.vel_tol);

  const double L = m.lambda();
  const auto still = optimize_boundary_velocities(m, L, L, 1.0, cfg);
  CHECK(std::abs(still.y0) < 1e-5);
  CHECK(std::abs(still.yT) < 1e-5);
  CHECK(still.action == doctest::Approx(-1.5).epsilon(1e-8));
}

TEST_CASE("double-well transition path") {
  LangevinModel dw;
  dw.potential = double_well_potential();
  dw.gamma = 1.0;
  dw.mu = 1.0;
  dw.measure = AlphaStableMeasure(0.5, 0.5);
  const auto opt = optimize_boundary_velocities(dw, -1.0, 1.0, 5.0);
  CHECK(opt.action >= -2.5 - 1e-9);
  CHECK(opt.inner.mismatch <= 1e-6);
  CHECK(opt.path.phi1.back() == doctest::Approx(1.0).epsilon(1e-8));

  // Local optimality: walk to perturbed boundary velocities by continuation.
  const DegenerateModel d = dw.to_degenerate();
  const auto jerk = differentiate(*opt.path.dphi2, opt.path.step());
  const std::array<double, 2> seed{(*opt.path.dphi2)[0], jerk[0]};
  for (double dy0 : {-0.05, 0.05}) {
    for (double dyT : {-0.05, 0.05}) {
      SolverConfig step;
      step.initial_guess = seed;
      double I = 0.0;
      for (int k = 1; k <= 10; ++k) {
        const BoundaryProblem bp{-1.0, opt.y0 + dy0 * k / 10, 1.0, opt.yT + dyT * k / 10, 5.0};
        const auto s = solve_el4_bvp(dw, bp, step);
        step.initial_guess = s.initial_unknowns;
        I = action(d, s.path);
      }
      CAPTURE(dy0);
      CAPTURE(dyT);
      CHECK(I > opt.action);
    }
  }
}

TEST_CASE("reference paths") {
  LangevinModel m = example_model();
  m.measure.reset();
  const DegenerateModel d = m.to_degenerate();
  const Path flow = deterministic_flow(d, {0.2, -0.4}, 0.5, 501);
  CHECK(action(d, flow) == doctest::Approx(-0.75).epsilon(1e-12));
  const Path bent = bend_path(flow, 0.7);
  CHECK(kinematic_residual(d, bent) < 1e-9);
  CHECK(bent.phi1.back() - flow.phi1.back() == doctest::Approx(0.7 * 0.25).epsilon(1e-12));
  CHECK(action(d, bent) > action(d, flow));
}
