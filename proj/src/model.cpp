#include "omlevy/model.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "omlevy/errors.hpp"
#include "omlevy/rng.hpp"

namespace omlevy {

namespace {

double fd_step(double x) { return 1e-5 * (1.0 + std::abs(x)); }

double fd_dx(const Field& h, double x, double y) {
  const double s = fd_step(x);
  return (h(x + s, y) - h(x - s, y)) / (2.0 * s);
}

double fd_dy(const Field& h, double x, double y) {
  const double s = fd_step(y);
  return (h(x, y + s) - h(x, y - s)) / (2.0 * s);
}

double fd_dyy(const Field& h, double x, double y) {
  const double s = 1e-4 * (1.0 + std::abs(y));
  return (h(x, y + s) - 2.0 * h(x, y) + h(x, y - s)) / (s * s);
}

double fd_dxy(const Field& h, double x, double y) {
  const double sx = 1e-4 * (1.0 + std::abs(x));
  const double sy = 1e-4 * (1.0 + std::abs(y));
  return (h(x + sx, y + sy) - h(x + sx, y - sy) - h(x - sx, y + sy) + h(x - sx, y - sy)) /
         (4.0 * sx * sy);
}

double rel_err(double supplied, double numeric) {
  return std::abs(supplied - numeric) / std::max(1.0, std::abs(numeric));
}

}  // namespace

double partials_discrepancy(const DegenerateModel& m, int samples, std::uint64_t seed) {
  RandomStream rng(seed, 0x9A27);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double x = 4.0 * rng.uniform() - 2.0;
    const double y = 4.0 * rng.uniform() - 2.0;
    worst = std::max({worst, rel_err(m.g_x(x, y), fd_dx(m.g, x, y)),
                      rel_err(m.g_y(x, y), fd_dy(m.g, x, y)),
                      rel_err(m.f_x(x, y), fd_dx(m.f, x, y)),
                      rel_err(m.f_y(x, y), fd_dy(m.f, x, y)),
                      rel_err(m.f_xy(x, y), fd_dy(m.f_x, x, y)),
                      rel_err(m.f_yy(x, y), fd_dy(m.f_y, x, y))});
  }
  return worst;
}

DegenerateModel make_degenerate_model(DriftParts parts, double c,
                                      std::optional<AlphaStableMeasure> measure,
                                      bool self_check) {
  if (!(c > 0.0)) throw DomainError("noise intensity c must be positive");
  if (!parts.g || !parts.f || !parts.g_x || !parts.g_y || !parts.f_x || !parts.f_y ||
      !parts.f_xy || !parts.f_yy) {
    throw DomainError("degenerate model: every drift and partial must be supplied");
  }
  DegenerateModel m{std::move(parts.g),    std::move(parts.f),    std::move(parts.g_x),
                    std::move(parts.g_y),  std::move(parts.f_x),  std::move(parts.f_y),
                    std::move(parts.f_xy), std::move(parts.f_yy), c,
                    measure};
  if (self_check) {
    const double d = partials_discrepancy(m);
    if (!(d <= 1e-5)) {
      std::ostringstream os;
      os << "degenerate model: supplied partials disagree with finite differences (max rel "
         << d << ")";
      throw DomainError(os.str());
    }
  }
  return m;
}

DegenerateModel make_degenerate_model_fd(Field g, Field f, double c,
                                         std::optional<AlphaStableMeasure> measure) {
  DriftParts p;
  p.g = g;
  p.f = f;
  p.g_x = [g](double x, double y) { return fd_dx(g, x, y); };
  p.g_y = [g](double x, double y) { return fd_dy(g, x, y); };
  p.f_x = [f](double x, double y) { return fd_dx(f, x, y); };
  p.f_y = [f](double x, double y) { return fd_dy(f, x, y); };
  p.f_xy = [f](double x, double y) { return fd_dxy(f, x, y); };
  p.f_yy = [f](double x, double y) { return fd_dyy(f, x, y); };
  return make_degenerate_model(std::move(p), c, measure, false);
}

Potential quadratic_potential() {
  return {"quadratic", [](double x) { return -0.5 * x * x; }, [](double x) { return -x; },
          [](double) { return -1.0; }, [](double) { return 0.0; }};
}

Potential double_well_potential() {
  return {"double-well", [](double x) { return 0.25 * (x * x - 1.0) * (x * x - 1.0); },
          [](double x) { return x * x * x - x; }, [](double x) { return 3.0 * x * x - 1.0; },
          [](double x) { return 6.0 * x; }};
}

Potential harmonic_potential() {
  return {"harmonic", [](double x) { return 0.5 * x * x; }, [](double x) { return x; },
          [](double) { return 1.0; }, [](double) { return 0.0; }};
}

Potential potential_by_name(const std::string& name) {
  if (name == "quadratic") return quadratic_potential();
  if (name == "double-well") return double_well_potential();
  if (name == "harmonic") return harmonic_potential();
  throw DomainError("unknown potential '" + name + "' (quadratic | double-well | harmonic)");
}

double LangevinModel::c() const { return std::sqrt(mu * gamma); }

void LangevinModel::validate() const {
  if (!(gamma > 0.0)) throw DomainError("Langevin model: gamma must be positive");
  if (!(mu > 0.0)) throw DomainError("Langevin model: mu must be positive");
  if (!potential.dU || !potential.d2U || !potential.d3U) {
    throw DomainError("Langevin model: potential derivatives missing");
  }
}

DegenerateModel LangevinModel::to_degenerate() const {
  validate();
  const double gam = gamma;
  const Scalar dU = potential.dU;
  const Scalar d2U = potential.d2U;
  DriftParts p;
  p.g = [](double, double y) { return y; };
  p.g_x = [](double, double) { return 0.0; };
  p.g_y = [](double, double) { return 1.0; };
  p.f = [gam, dU](double x, double y) { return -gam * y - dU(x); };
  p.f_x = [d2U](double x, double) { return -d2U(x); };
  p.f_y = [gam](double, double) { return -gam; };
  p.f_xy = [](double, double) { return 0.0; };
  p.f_yy = [](double, double) { return 0.0; };
  return make_degenerate_model(std::move(p), c(), measure, false);
}

double om_function(const DegenerateModel& m, double x, double y, double ydot) {
  const double r = (ydot - m.f(x, y) + m.lambda()) / m.c;
  return 0.5 * r * r + 0.5 * m.f_y(x, y);
}

double kinematic_residual(const DegenerateModel& m, const Path& path) {
  path.validate();
  const auto d1 = differentiate(path.phi1, path.step());
  double worst = 0.0;
  for (std::size_t i = 0; i < path.nodes(); ++i) {
    worst = std::max(worst, std::abs(d1[i] - m.g(path.phi1[i], path.phi2[i])));
  }
  return worst;
}

double action(const DegenerateModel& m, const Path& path, const ActionOptions& opts) {
  path.validate();
  if (opts.check != ConstraintCheck::Skip) {
    const double res = kinematic_residual(m, path);
    if (!(res <= opts.constraint_tol)) {
      std::ostringstream os;
      os << "kinematic constraint violated: max |dphi1/dt - g| = " << res << " > "
         << opts.constraint_tol;
      if (opts.check == ConstraintCheck::Enforce) throw ConstraintViolation(os.str(), res);
      std::cerr << "warning: " << os.str() << '\n';
    }
  }
  const double h = path.step();
  const std::vector<double> d2 = path.dphi2 ? *path.dphi2 : differentiate(path.phi2, h);
  std::vector<double> om(path.nodes());
  for (std::size_t i = 0; i < om.size(); ++i) {
    om[i] = om_function(m, path.phi1[i], path.phi2[i], d2[i]);
  }
  return integrate_uniform(om, h);
}

std::vector<double> variational_residual(const LangevinModel& model, const Path& path) {
  path.validate();
  if (path.n < 8) throw GridTooCoarse("variational_residual: need at least 8 grid intervals");
  const double h = path.step();
  const std::vector<double> d2 = path.dphi2 ? *path.dphi2 : differentiate(path.phi2, h);
  const double lam = model.lambda();
  const double g2 = model.gamma * model.gamma;
  const auto& pot = model.potential;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(path.n) - 3);
  for (std::size_t i = 2; i + 2 <= static_cast<std::size_t>(path.n); ++i) {
    const double d4 =
        (-d2[i - 2] + 16.0 * d2[i - 1] - 30.0 * d2[i] + 16.0 * d2[i + 1] - d2[i + 2]) /
        (12.0 * h * h);
    const double x = path.phi1[i];
    const double v = path.phi2[i];
    const double u2 = pot.d2U(x);
    out.push_back(d4 + d2[i] * (2.0 * u2 - g2) + v * v * pot.d3U(x) + (pot.dU(x) + lam) * u2);
  }
  return out;
}

}  // namespace omlevy
