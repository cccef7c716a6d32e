#pragma once

#include <vector>

#include "omlevy/rng.hpp"

namespace omlevy {

/// Normalization k_alpha of the alpha-stable jump measure, for alpha in (0, 1].
double k_alpha(double alpha);

/// Asymmetric alpha-stable jump measure
///   nu(dxi) = c1 |xi|^{-1-alpha} 1{xi>0} dxi + c2 |xi|^{-1-alpha} 1{xi<0} dxi
/// restricted to the bounded-variation regime 0 < alpha < 1.
class AlphaStableMeasure {
 public:
  /// Throws DomainError unless 0 < alpha < 1 and -1 <= beta <= 1.
  AlphaStableMeasure(double alpha, double beta);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double k() const { return k_; }
  double c_plus() const { return c1_; }
  double c_minus() const { return c2_; }
  /// Mean of the jumps below unit size, int_{|xi|<1} xi nu(dxi).
  double lambda_mean() const { return lambda_; }

 private:
  double alpha_, beta_, k_, c1_, c2_, lambda_;
};

/// Closed form of int_{|xi|<1} xi nu(dxi); equals measure.lambda_mean().
double small_jump_mean(const AlphaStableMeasure& measure);

/// Poisson rate of jumps with |xi| >= delta.
double tail_mass(const AlphaStableMeasure& measure, double delta);

/// int_{|xi|<delta} xi nu(dxi) for 0 < delta < 1.
double truncated_small_mean(const AlphaStableMeasure& measure, double delta);

/// Realized jumps of size |xi| >= delta on [0, horizon].
struct JumpTrain {
  std::vector<double> times;  // strictly increasing in [0, horizon]
  std::vector<double> sizes;  // |size| >= delta
  double delta = 0.0;
  double horizon = 0.0;
  /// Mean drift of the discarded sub-threshold jumps, m_delta.
  double compensator_drift = 0.0;
};

/// Compound-Poisson sample of the jumps above `delta`: exponential inter-arrival
/// times at rate tail_mass(delta), then per jump a sign draw (positive with
/// probability (1+beta)/2) and a Pareto magnitude delta * U^{-1/alpha}.
/// The draws are taken from `rng` in exactly that order.
JumpTrain sample_jumps(const AlphaStableMeasure& measure, double horizon, double delta,
                       RandomStream& rng);

}  // namespace omlevy
