#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace omlevy {

/// Phase-space path (phi1, phi2) sampled on a uniform grid of n intervals (n + 1 nodes)
/// over [t0, t0 + T]. `dphi2` optionally carries the exact time derivative of phi2;
/// when absent, consumers differentiate phi2 numerically.
struct Path {
  double t0 = 0.0;
  double T = 0.0;
  int n = 0;
  std::vector<double> phi1;
  std::vector<double> phi2;
  std::optional<std::vector<double>> dphi2;

  double step() const { return T / n; }
  double time(int i) const { return t0 + T * static_cast<double>(i) / n; }
  std::size_t nodes() const { return static_cast<std::size_t>(n) + 1; }

  /// Throws GridTooCoarse (n < 2) or DomainError (mismatched lengths, T <= 0).
  void validate() const;
};

/// Allocates a path with n intervals and zeroed channels.
Path make_path(double t0, double T, int n, bool with_dphi2 = false);

/// Derivative of uniformly sampled values: 4th-order central differences in the
/// interior with 4th-order one-sided stencils at the two nodes nearest each end.
/// Falls back to 2nd order when fewer than 5 nodes are available. Needs >= 3 nodes.
std::vector<double> differentiate(std::span<const double> values, double h);

/// Composite Simpson rule on uniform samples; the last three intervals use the 3/8
/// rule when the interval count is odd. Needs >= 3 nodes.
double integrate_uniform(std::span<const double> values, double h);

/// CSV with header `t,phi1,phi2[,dphi2]`, 17 significant digits.
void write_path_csv(std::ostream& os, const Path& path);
void write_path_csv(const std::string& filename, const Path& path);
/// Parses the CSV format above; checks the grid is uniform to 1e-9 relative.
Path read_path_csv(std::istream& is);
Path read_path_csv(const std::string& filename);

}  // namespace omlevy
