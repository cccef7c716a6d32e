#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "omlevy/errors.hpp"
#include "omlevy/pathways.hpp"
#include "omlevy/simulate.hpp"

using namespace omlevy;

namespace {

LangevinModel example_model(bool jumps = true) {
  LangevinModel m;
  m.potential = quadratic_potential();
  m.gamma = 3.0;
  m.mu = 0.8;
  if (jumps) m.measure = AlphaStableMeasure(0.5, 0.5);
  return m;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("Euler step count") {
  CHECK(euler_steps(2.0, 1e-3) == 2000);
  CHECK(euler_steps(1.0, 0.3) == 3);
  CHECK_THROWS_AS(euler_steps(1.0, 0.8), DomainError);
  CHECK_THROWS_AS(euler_steps(1.0, 0.0), DomainError);
}

TEST_CASE("simulation is reproducible") {
  const DegenerateModel d = example_model().to_degenerate();
  RandomStream a(9, 1), b(9, 1), c(9, 2);
  const SamplePath pa = simulate_sde(d, {-1.0, 2.0}, 1.0, 1e-3, a);
  const SamplePath pb = simulate_sde(d, {-1.0, 2.0}, 1.0, 1e-3, b);
  const SamplePath pc = simulate_sde(d, {-1.0, 2.0}, 1.0, 1e-3, c);
  CHECK(pa.path.phi1 == pb.path.phi1);
  CHECK(pa.path.phi2 == pb.path.phi2);
  CHECK(pa.path.phi1 != pc.path.phi1);
  CHECK(pa.path.n == 1000);
  CHECK(pa.path.phi1.front() == -1.0);
  CHECK(pa.seed == derive_seed(9, 1));
}

TEST_CASE("noiseless limit follows the flow to first order") {
  LangevinModel m = example_model(false);
  m.mu = 1e-30;
  const DegenerateModel d = m.to_degenerate();
  const Path flow = deterministic_flow(d, {0.3, -0.2}, 1.0, 1001);
  double prev = 0.0;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    RandomStream rng(1);
    const SamplePath s = simulate_sde(d, {0.3, -0.2}, 1.0, dt, rng);
    const int stride = static_cast<int>(std::lround(dt / 1e-3));
    double err = 0.0;
    for (std::size_t i = 0; i < s.path.nodes(); ++i) {
      err = std::max(err, std::abs(s.path.phi1[i] - flow.phi1[i * stride]));
    }
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(2.0).epsilon(0.1));
    prev = err;
  }
  CHECK(prev < 1e-2);
}

TEST_CASE("compensated small jumps: one-step mean displacement is f dt") {
  // Samples with a jump of size >= 1 are discarded; the remaining jumps are
  // independent of that event and their mean cancels the compensator.
  const LangevinModel m = example_model();
  const DegenerateModel d = m.to_degenerate();
  const double dt = 0.01, x = -1.0, y = 2.0;
  double sum = 0.0, sum2 = 0.0;
  long long kept = 0;
  for (int i = 0; i < 100000; ++i) {
    RandomStream rng(77, i);
    const SamplePath s = simulate_sde(d, {x, y}, 2 * dt, dt, rng, {1e-3, 1});
    bool big = false;
    for (std::size_t k = 0; k < s.jumps.sizes.size(); ++k) {
      big |= s.jumps.times[k] <= dt && std::abs(s.jumps.sizes[k]) >= 1.0;
    }
    if (big) continue;
    const double dy = s.path.phi2[1] - y;
    sum += dy;
    sum2 += dy * dy;
    ++kept;
  }
  const double mean = sum / kept;
  const double se = std::sqrt((sum2 / kept - mean * mean) / kept);
  CHECK(std::abs(mean - d.f(x, y) * dt) < 4 * se);
}

TEST_CASE("blow-up is reported") {
  DriftParts parts;
  parts.g = [](double, double y) { return y; };
  parts.f = [](double, double y) { return y * y * y; };
  parts.g_x = [](double, double) { return 0.0; };
  parts.g_y = [](double, double) { return 1.0; };
  parts.f_x = [](double, double) { return 0.0; };
  parts.f_y = [](double, double y) { return 3 * y * y; };
  parts.f_xy = [](double, double) { return 0.0; };
  parts.f_yy = [](double, double y) { return 6 * y; };
  const DegenerateModel d = make_degenerate_model(parts, 0.1, std::nullopt);
  RandomStream rng(1);
  CHECK_THROWS_AS(simulate_sde(d, {0.0, 3.0}, 5.0, 1e-2, rng), BlowUp);
}

TEST_CASE("bridge ensembles") {
  const LangevinModel m = example_model();
  const DegenerateModel d = m.to_degenerate();
  const auto g = quadratic_global_mptp(3.0, m.lambda(), -1.0, 1.0, 2.0);
  const std::array<double, 2> z0{-1.0, g.y0};

  SUBCASE("independent of thread count") {
    const auto a = simulate_bridge_ensemble(d, z0, 1.0, 0.1, 6, 2.0, 1e-3, 5, {1e-3, 1});
    const auto b = simulate_bridge_ensemble(d, z0, 1.0, 0.1, 6, 2.0, 1e-3, 5, {1e-3, 3});
    REQUIRE(a.kept.size() == 6);
    CHECK(a.attempts == b.attempts);
    for (std::size_t i = 0; i < a.kept.size(); ++i) {
      CHECK(a.kept[i].seed == b.kept[i].seed);
      CHECK(a.kept[i].path.phi1 == b.kept[i].path.phi1);
      CHECK(std::abs(a.kept[i].path.phi1.back() - 1.0) <= 0.1);
    }
    CHECK(a.manifest.size() == static_cast<std::size_t>(a.attempts));
  }

  SUBCASE("infinite tolerance keeps the first raw simulations") {
    const auto e = simulate_bridge_ensemble(d, z0, 1.0, kInf, 4, 2.0, 1e-3, 8);
    REQUIRE(e.kept.size() == 4);
    CHECK(e.attempts == 4);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(e.kept[i].seed == derive_seed(8, i));
      RandomStream rng(8, i);
      CHECK(simulate_sde(d, z0, 2.0, 1e-3, rng).path.phi1 == e.kept[i].path.phi1);
    }
  }

  SUBCASE("empty and exhausted requests") {
    const auto e = simulate_bridge_ensemble(d, z0, 1.0, 0.1, 0, 2.0, 1e-3, 8);
    CHECK(e.kept.empty());
    CHECK(e.manifest.empty());
    try {
      simulate_bridge_ensemble(d, z0, 1.0, 1e-9, 1, 2.0, 1e-3, 8, {}, 50);
      FAIL("expected BudgetExceeded");
    } catch (const BudgetExceeded& ex) {
      CHECK(ex.attempts() == 50);
      CHECK(ex.accepted() == 0);
      CHECK(ex.acceptance_rate() == 0.0);
    }
  }

  SUBCASE("acceptance shrinks with the tolerance") {
    const auto e = simulate_bridge_ensemble(d, z0, 1.0, kInf, 400, 2.0, 1e-3, 21);
    int prev = 401;
    for (double tol : {0.4, 0.2, 0.1, 0.05}) {
      int acc = 0;
      for (const auto& a : e.manifest) acc += a.endpoint_error <= tol;
      CHECK(acc <= prev);
      prev = acc;
    }
    CHECK(prev < 400);
  }

  SUBCASE("ensemble concentrates around the global MPTP") {
    const auto e = simulate_bridge_ensemble(d, z0, 1.0, 0.1, 15, 2.0, 1e-3, 2);
    const auto [lo, hi] = percentile_band(e.kept, 0.1, 0.9);
    CHECK(band_coverage(lo, hi, g.solution.sample(2.0, 2001).phi1) >= 0.9);
  }
}

TEST_CASE("percentile band") {
  std::vector<SamplePath> paths(5);
  for (int i = 0; i < 5; ++i) {
    paths[i].path = make_path(0.0, 1.0, 2);
    paths[i].path.phi1 = {double(i), double(4 - i), 2.0};
  }
  const auto [lo, hi] = percentile_band(paths, 0.25, 0.75);
  CHECK(lo == std::vector<double>{1.0, 1.0, 2.0});
  CHECK(hi == std::vector<double>{3.0, 3.0, 2.0});
  const auto [lo2, hi2] = percentile_band(paths, 0.1, 0.9);
  CHECK(lo2[0] == doctest::Approx(0.4));
  CHECK(hi2[0] == doctest::Approx(3.6));
  CHECK(band_coverage(lo, hi, {0.0, 2.0, 2.0}) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("Wilson interval") {
  const TubeEstimate e = wilson_estimate(50, 100, 0.5);
  CHECK(e.p_hat == 0.5);
  CHECK(e.ci_low == doctest::Approx(0.403831).epsilon(1e-5));
  CHECK(e.ci_high == doctest::Approx(0.596169).epsilon(1e-5));
  const TubeEstimate z = wilson_estimate(0, 1000, 0.1);
  CHECK(z.one_sided);
  CHECK(z.ci_low == 0.0);
  CHECK(z.ci_high == doctest::Approx(1 - std::pow(0.05, 1e-3)).epsilon(1e-12));
}

TEST_CASE("tube probabilities") {
  const LangevinModel m = example_model(false);
  const DegenerateModel d = m.to_degenerate();
  const Path flow = deterministic_flow(d, {0.0, 0.0}, 0.5, 501);

  const auto est = estimate_tube_probabilities(d, flow, {0.2, 0.5, 1.0, 1e300}, 4000, 1e-3, 4);
  REQUIRE(est.size() == 4);
  for (std::size_t i = 1; i < est.size(); ++i) CHECK(est[i].hits >= est[i - 1].hits);
  CHECK(est.back().p_hat == 1.0);
  const auto single = estimate_tube_probability(d, flow, 0.5, 4000, 1e-3, 4);
  CHECK(single.hits == est[1].hits);
  CHECK(estimate_tube_probability(d, flow, 1e-6, 200, 1e-3, 4).one_sided);

  const auto threaded = estimate_tube_probabilities(d, flow, {0.5}, 4000, 1e-3, 4, {1e-3, 3});
  CHECK(threaded[0].hits == est[1].hits);
}

TEST_CASE("ratio check") {
  const LangevinModel m = example_model(false);
  const DegenerateModel d = m.to_degenerate();
  const Path a = deterministic_flow(d, {0.0, 0.0}, 0.5, 501);
  const Path b = bend_path(a, 0.6);

  const RatioReport same = om_ratio_check(d, a, a, 0.5, 5000, 1e-3, 3);
  CHECK(same.delta_hat == 0.0);
  CHECK(same.delta_theory == 0.0);
  CHECK(same.within());

  const RatioReport ab = om_ratio_check(d, a, b, 0.5, 20000, 1e-3, 3);
  const RatioReport ba = om_ratio_check(d, b, a, 0.5, 20000, 1e-3, 3);
  CHECK(ab.delta_hat == -ba.delta_hat);
  CHECK(ab.delta_theory == -ba.delta_theory);
  CHECK(ab.delta_theory > 0.0);
  CHECK(ab.joint_hits <= std::min(ab.a.hits, ab.b.hits));

  const RatioReport zero = om_ratio_check(d, a, bend_path(a, 40.0), 0.05, 500, 1e-3, 3);
  CHECK(zero.degenerate);
  CHECK(std::isnan(zero.delta_hat));

  // Small-ball controllability: the hit ratio of a tube and a tube twice as wide
  // cannot exceed one on common samples.
  const auto radii = estimate_tube_probabilities(d, a, {0.25, 0.5}, 20000, 1e-3, 6);
  CHECK(radii[0].hits <= radii[1].hits);
}
