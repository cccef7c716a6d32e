#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "omlevy/levy.hpp"
#include "omlevy/path.hpp"

namespace omlevy {

using Field = std::function<double(double, double)>;
using Scalar = std::function<double(double)>;

/// Degenerate SDE on the plane,
///   dX = g(X, Y) dt,   dY = f(X, Y) dt + c dW + dL,
/// with L a pure-jump process with jump measure `measure` (absent = Brownian only).
///
/// The Onsager-Machlup results assume f in C_b^2 and g in C_b^1; that is the
/// caller's responsibility and is not checked (the quadratic-potential examples
/// violate boundedness and are used anyway).
struct DegenerateModel {
  Field g, f;
  Field g_x, g_y;
  Field f_x, f_y, f_xy, f_yy;
  double c = 1.0;
  std::optional<AlphaStableMeasure> measure;

  /// Mean of small jumps entering the OM function; 0 without a jump measure.
  double lambda() const { return measure ? measure->lambda_mean() : 0.0; }
};

struct DriftParts {
  Field g, f;
  Field g_x, g_y;
  Field f_x, f_y, f_xy, f_yy;
};

/// Validates c > 0 and, unless `self_check` is false, compares the supplied
/// partials with central differences at random points (DomainError on mismatch).
DegenerateModel make_degenerate_model(DriftParts parts, double c,
                                      std::optional<AlphaStableMeasure> measure,
                                      bool self_check = true);

/// Builds all partials by central finite differences. The derived partials carry
/// O(h^2) truncation and O(eps/h) roundoff, roughly 1e-7 relative for first
/// derivatives and 1e-5 for the second ones.
DegenerateModel make_degenerate_model_fd(Field g, Field f, double c,
                                         std::optional<AlphaStableMeasure> measure);

/// Max relative discrepancy between supplied and finite-difference partials over
/// `samples` points drawn uniformly from [-2, 2]^2.
double partials_discrepancy(const DegenerateModel& model, int samples = 16,
                            std::uint64_t seed = 0);

/// Potential U with its first three derivatives.
struct Potential {
  std::string name;
  Scalar U, dU, d2U, d3U;
};

/// U(x) = -x^2/2.
Potential quadratic_potential();
/// U(x) = (x^2 - 1)^2 / 4.
Potential double_well_potential();
/// U(x) = x^2/2.
Potential harmonic_potential();
/// Looks up one of the builtins above by name; DomainError otherwise.
Potential potential_by_name(const std::string& name);

/// Underdamped Langevin system  X'' + gamma X' = -U'(X) + sqrt(mu gamma) W' + L'.
struct LangevinModel {
  Potential potential;
  double gamma = 1.0;
  double mu = 1.0;
  std::optional<AlphaStableMeasure> measure;

  double c() const;
  double lambda() const { return measure ? measure->lambda_mean() : 0.0; }
  /// g = y, f = -gamma y - U'(x), c = sqrt(mu gamma).
  DegenerateModel to_degenerate() const;
  /// Throws DomainError unless gamma > 0 and mu > 0.
  void validate() const;
};

/// 0.5 ((ydot - f(x, y) + Lambda) / c)^2 + 0.5 f_y(x, y).
double om_function(const DegenerateModel& model, double x, double y, double ydot);

enum class ConstraintCheck { Enforce, Warn, Skip };

struct ActionOptions {
  ConstraintCheck check = ConstraintCheck::Enforce;
  double constraint_tol = 1e-6;
};

/// max_i |dphi1/dt - g(phi1, phi2)| with dphi1/dt from `differentiate`.
double kinematic_residual(const DegenerateModel& model, const Path& path);

/// Onsager-Machlup action by composite Simpson quadrature of om_function along the
/// path. dphi2/dt comes from the path's dphi2 channel when present, else from
/// 4th-order finite differences. Throws GridTooCoarse for n < 2 and
/// ConstraintViolation when the kinematic check is enforced and fails;
/// ConstraintCheck::Warn reports the violation on stderr instead.
double action(const DegenerateModel& model, const Path& path, const ActionOptions& opts = {});

/// Pointwise residual of the fourth-order Euler-Lagrange equation
///   x'''' + x''(2U''(x) - gamma^2) + x'^2 U'''(x) + (U'(x) + Lambda) U''(x)
/// on the interior nodes 2..n-2 (n - 3 values).
///
/// Uses the kinematic relation x' = phi2, takes x'' from dphi2 (or differentiates
/// phi2), and obtains x'''' as the second difference of x'' with a 4th-order
/// centered stencil, which keeps roundoff at O(eps/h^2) instead of O(eps/h^4).
/// Needs n >= 8.
std::vector<double> variational_residual(const LangevinModel& model, const Path& path);

}  // namespace omlevy
