#include "omlevy/path.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "omlevy/errors.hpp"

namespace omlevy {

void Path::validate() const {
  if (n < 2) throw GridTooCoarse("path needs at least 2 grid intervals, got " + std::to_string(n));
  if (!(T > 0.0)) throw DomainError("path horizon must be positive");
  if (phi1.size() != nodes() || phi2.size() != nodes() || (dphi2 && dphi2->size() != nodes())) {
    throw DomainError("path channels must all hold n + 1 values");
  }
}

Path make_path(double t0, double T, int n, bool with_dphi2) {
  Path p;
  p.t0 = t0;
  p.T = T;
  p.n = n;
  p.phi1.assign(static_cast<std::size_t>(n) + 1, 0.0);
  p.phi2.assign(static_cast<std::size_t>(n) + 1, 0.0);
  if (with_dphi2) p.dphi2.emplace(static_cast<std::size_t>(n) + 1, 0.0);
  return p;
}

std::vector<double> differentiate(std::span<const double> v, double h) {
  const std::size_t m = v.size();
  if (m < 3) throw GridTooCoarse("differentiate: need at least 3 samples");
  std::vector<double> d(m);
  if (m < 5) {
    for (std::size_t i = 1; i + 1 < m; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    d[m - 1] = (3.0 * v[m - 1] - 4.0 * v[m - 2] + v[m - 3]) / (2.0 * h);
    return d;
  }
  for (std::size_t i = 2; i + 2 < m; ++i) {
    d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
  }
  d[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h);
  d[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / (12.0 * h);
  const std::size_t e = m - 1;
  d[e] = (25.0 * v[e] - 48.0 * v[e - 1] + 36.0 * v[e - 2] - 16.0 * v[e - 3] + 3.0 * v[e - 4]) /
         (12.0 * h);
  d[e - 1] = (3.0 * v[e] + 10.0 * v[e - 1] - 18.0 * v[e - 2] + 6.0 * v[e - 3] - v[e - 4]) /
             (12.0 * h);
  return d;
}

double integrate_uniform(std::span<const double> v, double h) {
  const std::size_t m = v.size();
  if (m < 3) throw GridTooCoarse("integrate_uniform: need at least 3 samples");
  const std::size_t intervals = m - 1;
  std::size_t simpson_end = intervals % 2 == 0 ? intervals : intervals - 3;
  double sum = 0.0;
  if (simpson_end > 0) {
    double odd = 0.0, even = 0.0;
    for (std::size_t i = 1; i < simpson_end; i += 2) odd += v[i];
    for (std::size_t i = 2; i < simpson_end; i += 2) even += v[i];
    sum = h / 3.0 * (v[0] + 4.0 * odd + 2.0 * even + v[simpson_end]);
  }
  if (simpson_end != intervals) {
    const std::size_t s = simpson_end;
    sum += 3.0 * h / 8.0 * (v[s] + 3.0 * v[s + 1] + 3.0 * v[s + 2] + v[s + 3]);
  }
  return sum;
}

void write_path_csv(std::ostream& os, const Path& path) {
  path.validate();
  os << (path.dphi2 ? "t,phi1,phi2,dphi2\n" : "t,phi1,phi2\n");
  char buf[128];
  for (std::size_t i = 0; i < path.nodes(); ++i) {
    const int i_int = static_cast<int>(i);
    if (path.dphi2) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", path.time(i_int), path.phi1[i],
                    path.phi2[i], (*path.dphi2)[i]);
    } else {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", path.time(i_int), path.phi1[i],
                    path.phi2[i]);
    }
    os << buf;
  }
}

void write_path_csv(const std::string& filename, const Path& path) {
  std::ofstream os(filename);
  if (!os) throw Error("cannot open " + filename + " for writing");
  write_path_csv(os, path);
}

Path read_path_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("path csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  bool with_d;
  if (line == "t,phi1,phi2") {
    with_d = false;
  } else if (line == "t,phi1,phi2,dphi2") {
    with_d = true;
  } else {
    throw ConfigError("path csv: unexpected header '" + line + "'", 1);
  }
  std::vector<double> t, a, b, d;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError("path csv: bad number '" + cell + "'", lineno);
      }
    }
    if (row.size() != (with_d ? 4u : 3u)) throw ConfigError("path csv: wrong column count", lineno);
    t.push_back(row[0]);
    a.push_back(row[1]);
    b.push_back(row[2]);
    if (with_d) d.push_back(row[3]);
  }
  if (t.size() < 3) throw GridTooCoarse("path csv: need at least 3 rows");
  Path p;
  p.t0 = t.front();
  p.T = t.back() - t.front();
  p.n = static_cast<int>(t.size()) - 1;
  if (!(p.T > 0.0)) throw ConfigError("path csv: time column must increase");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (std::abs(t[i] - p.time(static_cast<int>(i))) > 1e-9 * std::max(1.0, std::abs(p.T))) {
      throw ConfigError("path csv: grid is not uniform", static_cast<int>(i) + 2);
    }
  }
  p.phi1 = std::move(a);
  p.phi2 = std::move(b);
  if (with_d) p.dphi2 = std::move(d);
  return p;
}

Path read_path_csv(const std::string& filename) {
  std::ifstream is(filename);
  if (!is) throw ConfigError("cannot open path file " + filename);
  return read_path_csv(is);
}

}  // namespace omlevy
