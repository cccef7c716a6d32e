#include "omlevy/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "omlevy/errors.hpp"

namespace omlevy {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, int line) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    throw ConfigError("expected a finite number, got '" + v + "'", line);
  }
  return out;
}

long long parse_integer(const std::string& v, int line) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("expected an integer, got '" + v + "'", line);
  }
  return out;
}

int parse_int(const std::string& v, int line) {
  const long long x = parse_integer(v, line);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw ConfigError("integer out of range: '" + v + "'", line);
  }
  return static_cast<int>(x);
}

std::uint64_t parse_u64(const std::string& v, int line) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("expected an unsigned 64-bit integer, got '" + v + "'", line);
  }
  return out;
}

bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError("expected a boolean, got '" + v + "'", line);
}

std::vector<double> parse_list(const std::string& v, int line) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item), line));
  if (out.empty()) throw ConfigError("expected a comma-separated list of numbers", line);
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, int)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"model.potential", [](RunConfig& c, const std::string& v, int) { c.potential = v; }},
      {"model.gamma", [](RunConfig& c, const std::string& v, int l) { c.gamma = parse_double(v, l); }},
      {"model.mu", [](RunConfig& c, const std::string& v, int l) { c.mu = parse_double(v, l); }},
      {"model.levy",
       [](RunConfig& c, const std::string& v, int l) {
         if (v == "none") c.levy = false;
         else if (v == "stable") c.levy = true;
         else throw ConfigError("levy must be 'stable' or 'none', got '" + v + "'", l);
       }},
      {"model.alpha", [](RunConfig& c, const std::string& v, int l) { c.alpha = parse_double(v, l); }},
      {"model.beta", [](RunConfig& c, const std::string& v, int l) { c.beta = parse_double(v, l); }},
      {"problem.x0", [](RunConfig& c, const std::string& v, int l) { c.x0 = parse_double(v, l); }},
      {"problem.y0", [](RunConfig& c, const std::string& v, int l) { c.y0 = parse_double(v, l); }},
      {"problem.xT", [](RunConfig& c, const std::string& v, int l) { c.xT = parse_double(v, l); }},
      {"problem.yT", [](RunConfig& c, const std::string& v, int l) { c.yT = parse_double(v, l); }},
      {"problem.T", [](RunConfig& c, const std::string& v, int l) { c.T = parse_double(v, l); }},
      {"numerics.nodes", [](RunConfig& c, const std::string& v, int l) { c.nodes = parse_int(v, l); }},
      {"numerics.dt", [](RunConfig& c, const std::string& v, int l) { c.dt = parse_double(v, l); }},
      {"numerics.delta", [](RunConfig& c, const std::string& v, int l) { c.delta = parse_double(v, l); }},
      {"numerics.rtol", [](RunConfig& c, const std::string& v, int l) { c.rtol = parse_double(v, l); }},
      {"numerics.atol", [](RunConfig& c, const std::string& v, int l) { c.atol = parse_double(v, l); }},
      {"numerics.bvp_tol", [](RunConfig& c, const std::string& v, int l) { c.bvp_tol = parse_double(v, l); }},
      {"numerics.max_newton", [](RunConfig& c, const std::string& v, int l) { c.max_newton = parse_int(v, l); }},
      {"numerics.solver", [](RunConfig& c, const std::string& v, int) { c.solver = v; }},
      {"numerics.segments", [](RunConfig& c, const std::string& v, int l) { c.segments = parse_int(v, l); }},
      {"numerics.warm_start", [](RunConfig& c, const std::string& v, int l) { c.warm_start = parse_bool(v, l); }},
      {"numerics.restarts", [](RunConfig& c, const std::string& v, int l) { c.restarts = parse_int(v, l); }},
      {"numerics.vel_tol", [](RunConfig& c, const std::string& v, int l) { c.vel_tol = parse_double(v, l); }},
      {"numerics.max_outer", [](RunConfig& c, const std::string& v, int l) { c.max_outer = parse_int(v, l); }},
      {"numerics.seed", [](RunConfig& c, const std::string& v, int l) { c.seed = parse_u64(v, l); }},
      {"numerics.threads", [](RunConfig& c, const std::string& v, int l) { c.threads = parse_int(v, l); }},
      {"simulate.n_keep", [](RunConfig& c, const std::string& v, int l) { c.n_keep = parse_int(v, l); }},
      {"simulate.bridge", [](RunConfig& c, const std::string& v, int l) { c.bridge = parse_bool(v, l); }},
      {"simulate.end_tol", [](RunConfig& c, const std::string& v, int l) { c.end_tol = parse_double(v, l); }},
      {"simulate.max_attempts", [](RunConfig& c, const std::string& v, int l) { c.max_attempts = parse_integer(v, l); }},
      {"tube.epsilon", [](RunConfig& c, const std::string& v, int l) { c.epsilons = parse_list(v, l); }},
      {"tube.samples", [](RunConfig& c, const std::string& v, int l) { c.samples = parse_integer(v, l); }},
      {"tube.path_a", [](RunConfig& c, const std::string& v, int) { c.path_a = v; }},
      {"tube.path_b", [](RunConfig& c, const std::string& v, int) { c.path_b = v; }},
      {"output.dir", [](RunConfig& c, const std::string& v, int) { c.out_dir = v; }},
      {"output.prefix", [](RunConfig& c, const std::string& v, int) { c.prefix = v; }},
  };
  return table;
}

bool valid_reference(const std::string& spec) {
  if (spec.empty() || spec == "mptp" || spec == "flow") return true;
  if (spec.rfind("bend:", 0) == 0) {
    const std::string k = spec.substr(5);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(k.data(), k.data() + k.size(), v);
    return ec == std::errc() && ptr == k.data() + k.size() && std::isfinite(v);
  }
  return true;  // treated as a file name; checked when read
}

void check(const RunConfig& c, const std::map<std::string, int>& lines) {
  auto fail = [&lines](const std::string& key, const std::string& msg) {
    const auto it = lines.find(key);
    throw ConfigError(key + ": " + msg, it == lines.end() ? 0 : it->second);
  };
  try {
    potential_by_name(c.potential);
  } catch (const DomainError&) {
    fail("model.potential", "unknown potential '" + c.potential + "'");
  }
  if (!(c.gamma > 0.0)) fail("model.gamma", "must be positive");
  if (!(c.mu > 0.0)) fail("model.mu", "must be positive");
  if (c.levy) {
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) fail("model.alpha", "must lie in (0, 1)");
    if (!(c.beta >= -1.0 && c.beta <= 1.0)) fail("model.beta", "must lie in [-1, 1]");
  }
  if (!(c.T > 0.0)) fail("problem.T", "must be positive");
  if (c.nodes < 8) fail("numerics.nodes", "must be at least 8");
  if (!(c.dt > 0.0) || std::llround(c.T / c.dt) < 2) {
    fail("numerics.dt", "must be positive with T/dt >= 2");
  }
  if (!(c.delta > 0.0 && c.delta < 1.0)) fail("numerics.delta", "must lie in (0, 1)");
  if (!(c.rtol > 0.0)) fail("numerics.rtol", "must be positive");
  if (!(c.atol > 0.0)) fail("numerics.atol", "must be positive");
  if (!(c.bvp_tol > 0.0)) fail("numerics.bvp_tol", "must be positive");
  if (c.max_newton < 1) fail("numerics.max_newton", "must be at least 1");
  if (c.solver != "auto" && c.solver != "analytic" && c.solver != "el4" && c.solver != "hp") {
    fail("numerics.solver", "must be one of auto, analytic, el4, hp");
  }
  if (c.segments < 1) fail("numerics.segments", "must be at least 1");
  if (c.restarts < 1) fail("numerics.restarts", "must be at least 1");
  if (!(c.vel_tol > 0.0)) fail("numerics.vel_tol", "must be positive");
  if (c.max_outer < 3) fail("numerics.max_outer", "must be at least 3");
  if (c.threads < 1) fail("numerics.threads", "must be at least 1");
  if (c.n_keep < 0) fail("simulate.n_keep", "must be non-negative");
  if (!(c.end_tol > 0.0)) fail("simulate.end_tol", "must be positive");
  if (c.max_attempts < 1) fail("simulate.max_attempts", "must be at least 1");
  if (c.epsilons.empty()) fail("tube.epsilon", "needs at least one radius");
  for (double e : c.epsilons) {
    if (!(e > 0.0)) fail("tube.epsilon", "radii must be positive");
  }
  if (c.samples < 1) fail("tube.samples", "must be at least 1");
  if (!valid_reference(c.path_a)) fail("tube.path_a", "malformed reference '" + c.path_a + "'");
  if (!valid_reference(c.path_b)) fail("tube.path_b", "malformed reference '" + c.path_b + "'");
  if (c.out_dir.empty()) fail("output.dir", "must not be empty");
}

// Shortest representation that reads back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

void RunConfig::validate() const { check(*this, {}); }

LangevinModel RunConfig::langevin() const {
  LangevinModel m;
  m.potential = potential_by_name(potential);
  m.gamma = gamma;
  m.mu = mu;
  if (levy) m.measure = AlphaStableMeasure(alpha, beta);
  return m;
}

BoundaryProblem RunConfig::problem() const {
  BoundaryProblem p;
  p.x0 = x0;
  p.y0 = y0;
  p.xT = xT;
  p.yT = yT;
  p.T = T;
  return p;
}

SolverConfig RunConfig::solver_config() const {
  SolverConfig s;
  s.rtol = rtol;
  s.atol = atol;
  s.bvp_tol = bvp_tol;
  s.max_newton = max_newton;
  s.segments = segments;
  s.nodes = nodes;
  s.warm_start = warm_start;
  s.vel_tol = vel_tol;
  s.max_outer = max_outer;
  s.restarts = restarts;
  s.seed = seed;
  return s;
}

SimulationOptions RunConfig::simulation_options() const {
  SimulationOptions o;
  o.delta = delta;
  o.threads = threads;
  return o;
}

RunConfig parse_config(std::istream& is) {
  RunConfig cfg;
  std::map<std::string, int> lines;
  std::string section;
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ConfigError("malformed section header", line);
      section = trim(text.substr(1, text.size() - 2));
      static const std::set<std::string> known = {"model", "problem", "numerics",
                                                  "simulate", "tube", "output"};
      if (!known.count(section)) throw ConfigError("unknown section [" + section + "]", line);
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (section.empty()) throw ConfigError("key '" + key + "' outside any section", line);
    const std::string full = section + "." + key;
    const auto it = setters().find(full);
    if (it == setters().end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]", line);
    if (lines.count(full)) throw ConfigError("duplicate key '" + key + "'", line);
    if (value.empty()) throw ConfigError("missing value for '" + key + "'", line);
    it->second(cfg, value, line);
    lines[full] = line;
  }
  check(cfg, lines);
  return cfg;
}

RunConfig load_config(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw ConfigError("cannot open config file '" + filename + "'");
  try {
    return parse_config(in);
  } catch (const ConfigError& e) {
    throw ConfigError(filename + ": " + e.what());
  }
}

void print_config(std::ostream& os, const RunConfig& c) {
  os << "[model]\n"
     << "potential = " << c.potential << "\n"
     << "gamma = " << fmt(c.gamma) << "\n"
     << "mu = " << fmt(c.mu) << "\n"
     << "levy = " << (c.levy ? "stable" : "none") << "\n"
     << "alpha = " << fmt(c.alpha) << "\n"
     << "beta = " << fmt(c.beta) << "\n\n"
     << "[problem]\n"
     << "x0 = " << fmt(c.x0) << "\n";
  if (c.y0) os << "y0 = " << fmt(*c.y0) << "\n";
  os << "xT = " << fmt(c.xT) << "\n";
  if (c.yT) os << "yT = " << fmt(*c.yT) << "\n";
  os << "T = " << fmt(c.T) << "\n\n"
     << "[numerics]\n"
     << "nodes = " << c.nodes << "\n"
     << "dt = " << fmt(c.dt) << "\n"
     << "delta = " << fmt(c.delta) << "\n"
     << "rtol = " << fmt(c.rtol) << "\n"
     << "atol = " << fmt(c.atol) << "\n"
     << "bvp_tol = " << fmt(c.bvp_tol) << "\n"
     << "max_newton = " << c.max_newton << "\n"
     << "solver = " << c.solver << "\n"
     << "segments = " << c.segments << "\n"
     << "warm_start = " << (c.warm_start ? "true" : "false") << "\n"
     << "restarts = " << c.restarts << "\n"
     << "vel_tol = " << fmt(c.vel_tol) << "\n"
     << "max_outer = " << c.max_outer << "\n"
     << "seed = " << c.seed << "\n"
     << "threads = " << c.threads << "\n\n"
     << "[simulate]\n"
     << "n_keep = " << c.n_keep << "\n"
     << "bridge = " << (c.bridge ? "true" : "false") << "\n"
     << "end_tol = " << fmt(c.end_tol) << "\n"
     << "max_attempts = " << c.max_attempts << "\n\n"
     << "[tube]\n"
     << "epsilon = ";
  for (std::size_t i = 0; i < c.epsilons.size(); ++i) os << (i ? ", " : "") << fmt(c.epsilons[i]);
  os << "\n"
     << "samples = " << c.samples << "\n"
     << "path_a = " << c.path_a << "\n";
  if (!c.path_b.empty()) os << "path_b = " << c.path_b << "\n";
  os << "\n[output]\n"
     << "dir = " << c.out_dir << "\n";
  if (!c.prefix.empty()) os << "prefix = " << c.prefix << "\n";
}

}  // namespace omlevy
