#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "omlevy/errors.hpp"
#include "omlevy/levy.hpp"
#include "omlevy/rng.hpp"

using namespace omlevy;

namespace {

// Independent oracle for the jump measure density c|xi|^(-1-alpha), using Boost's Gamma.
double oracle_k(double a) {
  return a * (1 - a) / (boost::math::tgamma(2 - a) * std::cos(std::numbers::pi * a / 2));
}

double density(double a, double b, double xi) {
  const double k = oracle_k(a);
  const double c = xi > 0 ? k * (1 + b) / 2 : k * (1 - b) / 2;
  return c * std::pow(std::abs(xi), -1 - a);
}

// Integral of xi nu(dxi) over 0 < |xi| < r, by double-exponential quadrature.
double oracle_truncated_mean(double a, double b, double r) {
  boost::math::quadrature::tanh_sinh<double> ts;
  // xi * density = c xi^(-alpha): integrable at 0, but must not be formed as a product.
  const double k = oracle_k(a);
  auto pos = [&](double x) { return x > 0 ? k * (1 + b) / 2 * std::pow(x, -a) : 0.0; };
  auto neg = [&](double x) { return x > 0 ? -k * (1 - b) / 2 * std::pow(x, -a) : 0.0; };
  return ts.integrate(pos, 0.0, r) + ts.integrate(neg, 0.0, r);
}

double oracle_tail(double a, double b, double delta) {
  boost::math::quadrature::exp_sinh<double> es;
  auto both = [&](double x) { return density(a, b, x) + density(a, b, -x); };
  return es.integrate(both, delta, std::numeric_limits<double>::infinity());
}

}  // namespace

TEST_CASE("k_alpha against Boost Gamma") {
  for (double a : {0.05, 0.2, 0.5, 0.75, 0.95}) {
    CHECK(k_alpha(a) == doctest::Approx(oracle_k(a)).epsilon(1e-13));
  }
  CHECK(k_alpha(1.0) == doctest::Approx(2 / std::numbers::pi).epsilon(1e-15));
  CHECK(k_alpha(0.5) == doctest::Approx(0.398942).epsilon(1e-6));
  CHECK(k_alpha(1e-9) < 1e-8);
  CHECK_THROWS_AS(k_alpha(0.0), DomainError);
  CHECK_THROWS_AS(k_alpha(1.2), DomainError);
  CHECK_THROWS_AS(k_alpha(NAN), DomainError);
}

TEST_CASE("measure rejects bad parameters") {
  CHECK_THROWS_AS(AlphaStableMeasure(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(AlphaStableMeasure(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(AlphaStableMeasure(0.5, 1.5), DomainError);
  CHECK_THROWS_AS(AlphaStableMeasure(0.5, NAN), DomainError);
  const AlphaStableMeasure nu(0.5, 1.0);
  CHECK(nu.c_minus() == 0.0);
  CHECK(nu.c_plus() == doctest::Approx(nu.k()));
}

TEST_CASE("small-jump mean") {
  // At alpha = beta = 1/2 the closed form reduces to 1/sqrt(2 pi).
  const double exact = 1 / std::sqrt(2 * std::numbers::pi);
  CHECK(small_jump_mean(AlphaStableMeasure(0.5, 0.5)) == doctest::Approx(exact).epsilon(1e-14));
  CHECK(std::abs(small_jump_mean(AlphaStableMeasure(0.5, 0.5)) - 0.3989) <= 1e-4);
  CHECK(small_jump_mean(AlphaStableMeasure(0.5, -0.5)) ==
        doctest::Approx(-exact).epsilon(1e-14));
  CHECK(small_jump_mean(AlphaStableMeasure(0.3, 0.0)) == 0.0);
  for (double a : {0.2, 0.5, 0.8}) {
    for (double b : {-0.7, 0.3, 1.0}) {
      CAPTURE(a);
      CAPTURE(b);
      CHECK(small_jump_mean(AlphaStableMeasure(a, b)) ==
            doctest::Approx(oracle_truncated_mean(a, b, 1.0)).epsilon(1e-9));
    }
  }
}

TEST_CASE("tail mass") {
  const AlphaStableMeasure nu(0.5, 0.5);
  CHECK(tail_mass(nu, 0.01) == doctest::Approx(7.97885).epsilon(1e-6));
  CHECK(tail_mass(nu, 0.01) == doctest::Approx(oracle_tail(0.5, 0.5, 0.01)).epsilon(1e-9));
  CHECK(2 * tail_mass(nu, 0.01) == doctest::Approx(15.9577).epsilon(1e-5));
  CHECK(tail_mass(AlphaStableMeasure(0.5, -0.9), 0.01) == tail_mass(nu, 0.01));
  CHECK(tail_mass(AlphaStableMeasure(0.7, 0.2), 0.3) ==
        doctest::Approx(oracle_tail(0.7, 0.2, 0.3)).epsilon(1e-9));
  CHECK(tail_mass(nu, 1e12) < 1e-5);
  CHECK_THROWS_AS(tail_mass(nu, 0.0), DomainError);
}

TEST_CASE("truncated small-jump mean") {
  const AlphaStableMeasure nu(0.5, 0.5);
  CHECK(truncated_small_mean(nu, 0.04) == doctest::Approx(0.0797885).epsilon(1e-6));
  CHECK(truncated_small_mean(nu, 0.04) ==
        doctest::Approx(oracle_truncated_mean(0.5, 0.5, 0.04)).epsilon(1e-9));
  CHECK(truncated_small_mean(nu, 1 - 1e-12) == doctest::Approx(nu.lambda_mean()).epsilon(1e-9));
  CHECK(truncated_small_mean(AlphaStableMeasure(0.4, 0.0), 0.1) == 0.0);
  double prev = 0.0;
  for (double d : {1e-6, 1e-4, 1e-2, 0.5}) {
    const double m = truncated_small_mean(nu, d);
    CHECK(m > prev);
    prev = m;
  }
  CHECK_THROWS_AS(truncated_small_mean(nu, 1.0), DomainError);
}

TEST_CASE("jump trains") {
  const AlphaStableMeasure nu(0.5, 0.5);
  RandomStream a(7, 3), b(7, 3);
  const JumpTrain ja = sample_jumps(nu, 2.0, 0.01, a);
  const JumpTrain jb = sample_jumps(nu, 2.0, 0.01, b);
  CHECK(ja.times == jb.times);
  CHECK(ja.sizes == jb.sizes);
  CHECK(ja.compensator_drift == truncated_small_mean(nu, 0.01));

  long long big = 0, total = 0;
  for (int i = 0; i < 2000; ++i) {
    RandomStream rng(11, i);
    const JumpTrain jt = sample_jumps(nu, 2.0, 0.01, rng);
    for (std::size_t k = 0; k < jt.sizes.size(); ++k) {
      REQUIRE(std::abs(jt.sizes[k]) >= 0.01);
      REQUIRE(jt.times[k] > 0.0);
      REQUIRE(jt.times[k] <= 2.0);
      if (k) REQUIRE(jt.times[k] >= jt.times[k - 1]);
      big += std::abs(jt.sizes[k]) > 0.04;
      ++total;
    }
  }
  // P(|xi| > 4 delta | |xi| >= delta) = 4^(-alpha) = 1/2.
  const double frac = static_cast<double>(big) / total;
  CHECK(std::abs(frac - 0.5) < 4 * std::sqrt(0.25 / total));

  RandomStream r1(1), r2(2);
  for (double s : sample_jumps(AlphaStableMeasure(0.5, 1.0), 50.0, 0.01, r1).sizes) CHECK(s > 0);
  for (double s : sample_jumps(AlphaStableMeasure(0.5, -1.0), 50.0, 0.01, r2).sizes) CHECK(s < 0);
  CHECK_THROWS_AS(sample_jumps(nu, 0.0, 0.01, r1), DomainError);
}

TEST_CASE("random stream is stable and splittable") {
  RandomStream r(42);
  CHECK(r() == 0x28efe333b266f103ULL);
  CHECK(r() == 0x47526757130f9f52ULL);
  CHECK(r() == 0x581ce1ff0e4ae394ULL);
  CHECK(derive_seed(42, 7) == 0x1f9bbdaac1906dbcULL);
  CHECK(derive_seed(42, 7) != derive_seed(42, 8));
  CHECK(derive_seed(42, 7) != derive_seed(43, 7));

  RandomStream s(5, 0);
  double sum = 0, sum2 = 0, lo = 1, hi = 0;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    const double z = s.normal();
    sum += z;
    sum2 += z * z;
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(std::abs(sum / n) < 4 / std::sqrt(n));
  CHECK(std::abs(sum2 / n - 1) < 4 * std::sqrt(2.0 / n));
  for (int i = 0; i < 1000; ++i) CHECK(s.exponential() > 0.0);
}
