#include "omlevy/levy.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "omlevy/errors.hpp"

namespace omlevy {

double k_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("k_alpha: alpha must lie in (0, 1], got " + std::to_string(alpha));
  }
  if (alpha == 1.0) return 2.0 / std::numbers::pi;
  return alpha * (1.0 - alpha) /
         (std::tgamma(2.0 - alpha) * std::cos(std::numbers::pi * alpha / 2.0));
}

AlphaStableMeasure::AlphaStableMeasure(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("alpha-stable measure: alpha must lie in (0, 1), got " +
                      std::to_string(alpha));
  }
  if (!(beta >= -1.0 && beta <= 1.0)) {
    throw DomainError("alpha-stable measure: beta must lie in [-1, 1], got " +
                      std::to_string(beta));
  }
  k_ = k_alpha(alpha);
  c1_ = k_ * (1.0 + beta) / 2.0;
  c2_ = k_ * (1.0 - beta) / 2.0;
  lambda_ = alpha * beta /
            (std::tgamma(2.0 - alpha) * std::cos(std::numbers::pi * alpha / 2.0));
}

double small_jump_mean(const AlphaStableMeasure& measure) { return measure.lambda_mean(); }

double tail_mass(const AlphaStableMeasure& measure, double delta) {
  if (!(delta > 0.0)) throw DomainError("tail_mass: delta must be positive");
  return measure.k() * std::pow(delta, -measure.alpha()) / measure.alpha();
}

double truncated_small_mean(const AlphaStableMeasure& measure, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("truncated_small_mean: delta must lie in (0, 1)");
  }
  const double a = measure.alpha();
  return (measure.c_plus() - measure.c_minus()) * std::pow(delta, 1.0 - a) / (1.0 - a);
}

JumpTrain sample_jumps(const AlphaStableMeasure& measure, double horizon, double delta,
                       RandomStream& rng) {
  if (!(horizon > 0.0)) throw DomainError("sample_jumps: horizon must be positive");
  JumpTrain train;
  train.delta = delta;
  train.horizon = horizon;
  train.compensator_drift = truncated_small_mean(measure, delta);

  const double rate = tail_mass(measure, delta);
  const double p_plus = (1.0 + measure.beta()) / 2.0;
  const double inv_alpha = 1.0 / measure.alpha();
  double t = 0.0;
  for (;;) {
    t += rng.exponential() / rate;
    if (t > horizon) break;
    const bool positive = rng.uniform() < p_plus;
    const double magnitude = delta * std::pow(rng.uniform_open(), -inv_alpha);
    train.times.push_back(t);
    train.sizes.push_back(positive ? magnitude : -magnitude);
  }
  return train;
}

}  // namespace omlevy
