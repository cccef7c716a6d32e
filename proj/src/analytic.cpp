#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "omlevy/errors.hpp"
#include "omlevy/pathways.hpp"

namespace omlevy {

void BoundaryProblem::validate() const {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("boundary problem: T must be positive");
  if (!std::isfinite(x0) || !std::isfinite(xT) || (y0 && !std::isfinite(*y0)) ||
      (yT && !std::isfinite(*yT))) {
    throw DomainError("boundary problem: boundary data must be finite");
  }
}

double QuadraticMPTP::position(double t) const {
  double x = offset;
  for (std::size_t i = 0; i < exponents.size(); ++i) x += coeffs[i] * std::exp(exponents[i] * t);
  return x;
}

double QuadraticMPTP::derivative(double t, int order) const {
  double d = 0.0;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    d += coeffs[i] * std::pow(exponents[i], order) * std::exp(exponents[i] * t);
  }
  return d;
}

Path QuadraticMPTP::sample(double T, int nodes) const {
  Path p = make_path(0.0, T, nodes - 1, true);
  for (int i = 0; i < nodes; ++i) {
    const double t = p.time(i);
    p.phi1[i] = position(t);
    p.phi2[i] = derivative(t, 1);
    (*p.dphi2)[i] = derivative(t, 2);
  }
  return p;
}

std::array<double, 4> quadratic_el4_exponents(double gamma) {
  const double g2 = gamma * gamma;
  const double root = gamma * std::sqrt(g2 + 4.0);
  const double big = std::sqrt((2.0 + g2 + root) / 2.0);
  const double small = std::sqrt((2.0 + g2 - root) / 2.0);
  return {-big, -small, small, big};
}

std::array<double, 2> quadratic_global_exponents(double gamma) {
  const double s = std::sqrt(gamma * gamma + 4.0);
  return {(-gamma - s) / 2.0, (-gamma + s) / 2.0};
}

QuadraticMPTP quadratic_analytic_mptp(double gamma, double Lambda, const BoundaryProblem& bp) {
  bp.validate();
  if (!bp.has_velocities()) {
    throw DomainError("quadratic_analytic_mptp: both boundary velocities are required");
  }
  if (!(gamma > 0.0)) throw DomainError("quadratic_analytic_mptp: gamma must be positive");
  const auto lam = quadratic_el4_exponents(gamma);
  Eigen::Matrix4d A;
  for (int i = 0; i < 4; ++i) {
    const double e = std::exp(lam[i] * bp.T);
    A.col(i) << 1.0, e, lam[i], lam[i] * e;
  }
  const Eigen::Vector4d rhs(bp.x0 - Lambda, bp.xT - Lambda, *bp.y0, *bp.yT);
  Eigen::PartialPivLU<Eigen::Matrix4d> lu(A);
  if (!(lu.rcond() > 1e-14)) {
    throw SingularSystem("quadratic_analytic_mptp: boundary system is numerically singular");
  }
  const Eigen::Vector4d C = lu.solve(rhs);
  QuadraticMPTP out;
  out.exponents.assign(lam.begin(), lam.end());
  out.coeffs = {C[0], C[1], C[2], C[3]};
  out.offset = Lambda;
  return out;
}

GlobalQuadraticMPTP quadratic_global_mptp(double gamma, double Lambda, double x0, double xT,
                                          double T) {
  if (!(T > 0.0)) throw DomainError("quadratic_global_mptp: T must be positive");
  const auto [l1, l2] = quadratic_global_exponents(gamma);
  const double e1 = std::exp(l1 * T);
  const double e2 = std::exp(l2 * T);
  const double a = x0 - Lambda;
  const double b = xT - Lambda;
  GlobalQuadraticMPTP g;
  g.solution.exponents = {l1, l2};
  g.solution.coeffs = {(b - e2 * a) / (e1 - e2), (e1 * a - b) / (e1 - e2)};
  g.solution.offset = Lambda;
  g.y0 = g.solution.derivative(0.0, 1);
  g.yT = g.solution.derivative(T, 1);
  return g;
}

std::optional<std::array<double, 2>> linearized_el4_guess(const LangevinModel& model,
                                                         const BoundaryProblem& bp) {
  using cd = std::complex<double>;
  if (!bp.has_velocities()) return std::nullopt;
  const double k = model.potential.d2U(bp.x0);
  if (std::abs(k) < 1e-8) return std::nullopt;
  // x'''' + x''(2k - gamma^2) + k (U'(x0) + k (x - x0) + Lambda) = 0
  const double xp = bp.x0 - (model.potential.dU(bp.x0) + model.lambda()) / k;
  const double g2 = model.gamma * model.gamma;
  const cd disc = std::sqrt(cd(g2 * (g2 - 4.0 * k)));
  const cd s_plus = std::sqrt((cd(g2 - 2.0 * k) + disc) / 2.0);
  const cd s_minus = std::sqrt((cd(g2 - 2.0 * k) - disc) / 2.0);
  const std::array<cd, 4> r{-s_plus, -s_minus, s_minus, s_plus};
  Eigen::Matrix4cd A;
  for (int i = 0; i < 4; ++i) {
    const cd e = std::exp(r[i] * bp.T);
    A.col(i) << 1.0, e, r[i], r[i] * e;
  }
  const Eigen::Vector4cd rhs(bp.x0 - xp, bp.xT - xp, *bp.y0, *bp.yT);
  Eigen::FullPivLU<Eigen::Matrix4cd> lu(A);
  if (lu.rank() < 4 || !(lu.rcond() > 1e-12)) return std::nullopt;
  const Eigen::Vector4cd C = lu.solve(rhs);
  cd d2 = 0.0, d3 = 0.0;
  for (int i = 0; i < 4; ++i) {
    d2 += C[i] * r[i] * r[i];
    d3 += C[i] * r[i] * r[i] * r[i];
  }
  if (!std::isfinite(d2.real()) || !std::isfinite(d3.real())) return std::nullopt;
  return std::array<double, 2>{d2.real(), d3.real()};
}

}  // namespace omlevy
