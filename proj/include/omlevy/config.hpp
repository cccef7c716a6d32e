#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "omlevy/model.hpp"
#include "omlevy/pathways.hpp"
#include "omlevy/simulate.hpp"

namespace omlevy {

/// Fully resolved run configuration. Defaults reproduce the quadratic Langevin
/// transition from x = -1 to x = 1 (gamma = 3, mu = 0.8, alpha = beta = 0.5, T = 2).
///
/// File format: `[section]` headers followed by `key = value` lines; `#` starts a
/// comment. Sections and keys:
///   [model]    potential, gamma, mu, levy (stable | none), alpha, beta
///   [problem]  x0, y0, xT, yT, T          (y0 / yT optional)
///   [numerics] nodes, dt, delta, rtol, atol, bvp_tol, max_newton, solver
///              (auto | analytic | el4 | hp), segments, warm_start, restarts,
///              vel_tol, max_outer, seed, threads
///   [simulate] n_keep, bridge, end_tol, max_attempts
///   [tube]     epsilon (comma list), samples, path_a, path_b
///   [output]   dir, prefix
/// Tube reference paths are `mptp`, `flow`, `bend:<kappa>` or a path CSV file.
struct RunConfig {
  std::string potential = "quadratic";
  double gamma = 3.0;
  double mu = 0.8;
  bool levy = true;
  double alpha = 0.5;
  double beta = 0.5;

  double x0 = -1.0;
  std::optional<double> y0;
  double xT = 1.0;
  std::optional<double> yT;
  double T = 2.0;

  int nodes = 2001;
  double dt = 1e-3;
  double delta = 1e-3;
  double rtol = 1e-10;
  double atol = 1e-12;
  double bvp_tol = 1e-9;
  int max_newton = 50;
  std::string solver = "auto";
  int segments = 1;
  bool warm_start = false;
  int restarts = 5;
  double vel_tol = 1e-6;
  int max_outer = 500;
  std::uint64_t seed = 20240601;
  int threads = 1;

  int n_keep = 15;
  bool bridge = true;
  double end_tol = 0.1;
  long long max_attempts = 10'000'000;

  std::vector<double> epsilons{0.5};
  long long samples = 10000;
  std::string path_a = "mptp";
  std::string path_b;

  std::string out_dir = ".";
  std::string prefix;

  /// Throws ConfigError on out-of-range values.
  void validate() const;

  LangevinModel langevin() const;
  BoundaryProblem problem() const;
  SolverConfig solver_config() const;
  SimulationOptions simulation_options() const;
};

/// Parses and validates; ConfigError messages carry the offending line number.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& filename);

/// Writes the configuration in the input format; parse_config reads it back.
void print_config(std::ostream& os, const RunConfig& cfg);

}  // namespace omlevy
