#include "omlevy/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>

#include "omlevy/acceptance.hpp"
#include "omlevy/errors.hpp"
#include "omlevy/simulate.hpp"

namespace omlevy {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string output_file(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / (cfg.prefix + name)).string();
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const GridTooCoarse& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConstraintViolation& e) {
    err << "invalid reference path: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "output error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

void finish(const LangevinModel& m, MptpResult& r) {
  const DegenerateModel d = m.to_degenerate();
  r.action = action(d, r.path);
  r.kinematic_residual = kinematic_residual(d, r.path);
  double worst = 0.0;
  for (double v : variational_residual(m, r.path)) worst = std::max(worst, std::abs(v));
  r.el_residual = worst;
}

// Linear interpolation of a path's X channel onto `nodes` uniform nodes.
std::vector<double> resample_x(const Path& p, std::size_t nodes) {
  std::vector<double> out(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    const double s = static_cast<double>(i) * p.n / static_cast<double>(nodes - 1);
    const auto k = std::min(static_cast<std::size_t>(s), static_cast<std::size_t>(p.n - 1));
    const double w = s - static_cast<double>(k);
    out[i] = (1.0 - w) * p.phi1[k] + w * p.phi1[k + 1];
  }
  return out;
}

}  // namespace

MptpResult compute_mptp(const RunConfig& cfg) {
  const LangevinModel m = cfg.langevin();
  const BoundaryProblem bp = cfg.problem();
  bp.validate();
  const SolverConfig sc = cfg.solver_config();
  if (bp.y0.has_value() != bp.yT.has_value()) {
    throw ConfigError("problem: give both y0 and yT, or neither for velocity optimization");
  }
  const bool quadratic = m.potential.name == "quadratic";
  MptpResult r;
  if (cfg.solver == "analytic") {
    if (!quadratic) throw ConfigError("numerics.solver = analytic needs the quadratic potential");
    if (bp.has_velocities()) {
      r.solver = "analytic";
      r.path = quadratic_analytic_mptp(m.gamma, m.lambda(), bp).sample(bp.T, cfg.nodes);
    } else {
      const auto g = quadratic_global_mptp(m.gamma, m.lambda(), bp.x0, bp.xT, bp.T);
      r.solver = "analytic-global";
      r.path = g.solution.sample(bp.T, cfg.nodes);
      r.y0_opt = g.y0;
      r.yT_opt = g.yT;
    }
  } else if (!bp.has_velocities()) {
    if (cfg.solver != "auto") {
      throw ConfigError("numerics.solver = " + cfg.solver + " needs both y0 and yT");
    }
    auto opt = optimize_boundary_velocities(m, bp.x0, bp.xT, bp.T, sc);
    r.solver = "velocity-optimization";
    r.path = opt.path;
    r.y0_opt = opt.y0;
    r.yT_opt = opt.yT;
    r.bvp = opt.inner;
    r.optimum = std::move(opt);
  } else if (cfg.solver == "hp") {
    auto s = solve_hp_bvp(m, bp, sc);
    r.solver = "hp";
    r.path = std::move(s.path);
    r.bvp = s.report;
  } else if (cfg.solver == "el4" || !quadratic) {
    auto s = solve_el4_bvp(m, bp, sc);
    r.solver = "el4";
    r.path = std::move(s.path);
    r.bvp = s.report;
  } else {
    r.solver = "analytic";
    r.path = quadratic_analytic_mptp(m.gamma, m.lambda(), bp).sample(bp.T, cfg.nodes);
  }
  finish(m, r);
  return r;
}

Path resolve_reference(const RunConfig& cfg, const std::string& spec) {
  if (spec == "mptp") return compute_mptp(cfg).path;
  const bool bend = spec.rfind("bend:", 0) == 0;
  if (spec == "flow" || bend) {
    if (!cfg.y0) throw ConfigError("tube: reference '" + spec + "' needs problem.y0");
    const DegenerateModel d = cfg.langevin().to_degenerate();
    Path flow = deterministic_flow(d, {cfg.x0, *cfg.y0}, cfg.T, cfg.nodes, cfg.solver_config());
    return bend ? bend_path(flow, std::stod(spec.substr(5))) : flow;
  }
  return read_path_csv(spec);
}

int cmd_mptp(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const MptpResult r = compute_mptp(cfg);
    const std::string file = output_file(cfg, "mptp.csv");
    write_path_csv(file, r.path);
    out << "[mptp]\n"
        << "solver=" << r.solver << "\n"
        << "potential=" << cfg.potential << "\n"
        << "gamma=" << num(cfg.gamma) << "\n"
        << "mu=" << num(cfg.mu) << "\n"
        << "lambda=" << num(cfg.langevin().lambda()) << "\n"
        << "T=" << num(cfg.T) << "\n"
        << "x0=" << num(r.path.phi1.front()) << "\n"
        << "y0=" << num(r.path.phi2.front()) << "\n"
        << "xT=" << num(r.path.phi1.back()) << "\n"
        << "yT=" << num(r.path.phi2.back()) << "\n"
        << "action=" << num(r.action) << "\n"
        << "action_floor=" << num(-cfg.gamma * cfg.T / 2.0) << "\n"
        << "kinematic_residual=" << num(r.kinematic_residual) << "\n"
        << "el_residual=" << num(r.el_residual) << "\n";
    if (r.bvp) {
      out << "newton_iterations=" << r.bvp->iterations << "\n"
          << "bvp_mismatch=" << num(r.bvp->mismatch) << "\n";
    }
    if (r.y0_opt) out << "y0_opt=" << num(*r.y0_opt) << "\n" << "yT_opt=" << num(*r.yT_opt) << "\n";
    if (r.optimum) {
      out << "evaluations=" << r.optimum->evaluations << "\n"
          << "restarts_converged=" << r.optimum->restarts_converged << "\n"
          << "simplex_diameter=" << num(r.optimum->simplex_diameter) << "\n";
    }
    out << "nodes=" << r.path.nodes() << "\n"
        << "path_csv=" << file << "\n";
    return kExitOk;
  });
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const LangevinModel m = cfg.langevin();
    const MptpResult mptp = compute_mptp(cfg);
    const double y0 = mptp.path.phi2.front();
    const double tol = cfg.bridge ? cfg.end_tol : std::numeric_limits<double>::infinity();
    const auto ens =
        simulate_bridge_ensemble(m.to_degenerate(), {cfg.x0, y0}, cfg.xT, tol, cfg.n_keep,
                                 cfg.T, cfg.dt, cfg.seed, cfg.simulation_options(),
                                 cfg.max_attempts);
    const std::string mptp_file = output_file(cfg, "mptp.csv");
    write_path_csv(mptp_file, mptp.path);
    const std::string manifest_file = output_file(cfg, "manifest.csv");
    {
      std::ofstream mf(manifest_file);
      if (!mf) throw ConfigError("cannot write '" + manifest_file + "'");
      mf << "seed,accepted,endpoint_error\n";
      char buf[64];
      for (const auto& a : ens.manifest) {
        std::snprintf(buf, sizeof buf, "%.17g", a.endpoint_error);
        mf << a.seed << "," << (a.accepted ? 1 : 0) << "," << buf << "\n";
      }
    }
    for (std::size_t i = 0; i < ens.kept.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "path_%04zu.csv", i);
      write_path_csv(output_file(cfg, name), ens.kept[i].path);
    }
    long long accepted = 0;
    for (const auto& a : ens.manifest) accepted += a.accepted;
    out << "[simulate]\n"
        << "mode=" << (cfg.bridge ? "bridge" : "raw") << "\n"
        << "x0=" << num(cfg.x0) << "\n"
        << "y0=" << num(y0) << "\n"
        << "xT=" << num(cfg.xT) << "\n"
        << "T=" << num(cfg.T) << "\n"
        << "dt=" << num(cfg.T / euler_steps(cfg.T, cfg.dt)) << "\n"
        << "seed=" << cfg.seed << "\n"
        << "attempts=" << ens.attempts << "\n"
        << "accepted=" << accepted << "\n"
        << "kept=" << ens.kept.size() << "\n"
        << "acceptance_rate="
        << num(ens.attempts ? static_cast<double>(accepted) / ens.attempts : 0.0) << "\n";
    if (ens.kept.size() >= 2) {
      const auto [lo, hi] = percentile_band(ens.kept, 0.1, 0.9);
      out << "band_coverage_10_90=" << num(band_coverage(lo, hi, resample_x(mptp.path, lo.size())))
          << "\n";
    }
    out << "mptp_csv=" << mptp_file << "\n"
        << "manifest_csv=" << manifest_file << "\n";
    return kExitOk;
  });
}

int cmd_tube(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const DegenerateModel d = cfg.langevin().to_degenerate();
    const auto opts = cfg.simulation_options();
    const Path a = resolve_reference(cfg, cfg.path_a);
    out << "[tube]\n"
        << "path_a=" << cfg.path_a << "\n";
    if (!cfg.path_b.empty()) out << "path_b=" << cfg.path_b << "\n";
    out << "samples=" << cfg.samples << "\n"
        << "dt=" << num(cfg.dt) << "\n"
        << "seed=" << cfg.seed << "\n";
    if (cfg.path_b.empty()) {
      for (const auto& e :
           estimate_tube_probabilities(d, a, cfg.epsilons, cfg.samples, cfg.dt, cfg.seed, opts)) {
        out << "\n[estimate]\n"
            << "epsilon=" << num(e.epsilon) << "\n"
            << "hits=" << e.hits << "\n"
            << "n=" << e.n << "\n"
            << "p_hat=" << num(e.p_hat) << "\n"
            << "ci_low=" << num(e.ci_low) << "\n"
            << "ci_high=" << num(e.ci_high) << "\n"
            << "one_sided=" << (e.one_sided ? "true" : "false") << "\n";
      }
      return kExitOk;
    }
    const Path b = resolve_reference(cfg, cfg.path_b);
    int code = kExitOk;
    for (double eps : cfg.epsilons) {
      const RatioReport r = om_ratio_check(d, a, b, eps, cfg.samples, cfg.dt, cfg.seed, opts);
      out << "\n[ratio]\n"
          << "epsilon=" << num(eps) << "\n"
          << "n=" << r.a.n << "\n"
          << "hits_a=" << r.a.hits << "\n"
          << "hits_b=" << r.b.hits << "\n"
          << "joint_hits=" << r.joint_hits << "\n"
          << "p_hat_a=" << num(r.a.p_hat) << "\n"
          << "p_hat_b=" << num(r.b.p_hat) << "\n"
          << "action_a=" << num(r.action_a) << "\n"
          << "action_b=" << num(r.action_b) << "\n"
          << "delta_theory=" << num(r.delta_theory) << "\n";
      if (r.degenerate) {
        out << "degenerate=true\n"
            << "bound_kind=" << (r.bound_kind > 0 ? "upper" : r.bound_kind < 0 ? "lower" : "none")
            << "\n"
            << "bound=" << num(r.bound) << "\n";
        err << "tube: zero hits at epsilon=" << num(eps)
            << "; the log-ratio is not estimable (increase samples or epsilon)\n";
        code = kExitNumerical;
        continue;
      }
      out << "delta_hat=" << num(r.delta_hat) << "\n"
          << "difference=" << num(r.difference) << "\n"
          << "std_error=" << num(r.std_error) << "\n"
          << "within_tolerance=" << (r.within() ? "true" : "false") << "\n";
    }
    return code;
  });
}

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    acceptance::Options opts;
    opts.seed = cfg.seed;
    opts.threads = cfg.threads;
    const auto results = acceptance::run_all(opts);
    out << acceptance::render(results);
    const bool ok = acceptance::all_passed(results);
    out << "summary=" << (ok ? "pass" : "fail") << "\n";
    return ok ? kExitOk : kExitValidation;
  });
}

}  // namespace omlevy
