#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "omlevy/config.hpp"
#include "omlevy/pathways.hpp"

namespace omlevy {

/// Exit-code contract of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitConfig = 2, kExitNumerical = 3 };

struct MptpResult {
  std::string solver;  // analytic | analytic-global | el4 | hp | velocity-optimization
  Path path;
  double action = 0.0;
  double kinematic_residual = 0.0;
  double el_residual = 0.0;  // max |variational_residual|
  std::optional<double> y0_opt, yT_opt;  // set when velocities were optimized
  std::optional<BvpReport> bvp;
  std::optional<VelocityOptimum> optimum;
};

/// Dispatches on config: analytic (quadratic potential with full boundary data),
/// el4 / hp shooting, or velocity optimization for configuration-only problems.
MptpResult compute_mptp(const RunConfig& cfg);

/// Reference path for tube estimation: `mptp`, `flow` (noise-free flow from
/// (x0, y0)), `bend:<kappa>` (that flow plus kappa t^2) or a path CSV file.
Path resolve_reference(const RunConfig& cfg, const std::string& spec);

// Commands print key=value report blocks to `out`, diagnostics to `err`, and
// return an ExitCode.
int cmd_mptp(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_tube(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace omlevy
