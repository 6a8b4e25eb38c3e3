#include "hypersde_cli/run.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "config.hpp"
#include "hypersde/algebra_io.hpp"
#include "hypersde/csv.hpp"
#include "hypersde/reducibility.hpp"
#include "hypersde/sim.hpp"
#include "hypersde/solvers.hpp"
#include "svg.hpp"

namespace hypersde::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Context {
  const RunRequest& req;
  const json& cfg;
  fs::path out;
  std::size_t workers = 0;
  std::vector<std::string> artifacts;
  json summary;
};

std::uint64_t seed_of(const Context& c) {
  if (c.req.seed) return *c.req.seed;
  const auto* s = find(c.cfg, "seed");
  if (!s) throw ConfigError("task '" + c.req.task + "' is stochastic and needs a seed (config 'seed' or --seed)");
  if (!s->is_number_integer() || s->get<long long>() < 0) throw ConfigError("seed must be a non-negative integer");
  return s->get<std::uint64_t>();
}

void write_artifact(Context& c, const std::string& name, const std::function<void(std::ostream&)>& body) {
  fs::create_directories(c.out);
  std::ostringstream ss;
  body(ss);
  const auto path = c.out / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  f << ss.str();
  if (!f) throw ConfigError("failed writing '" + path.string() + "'");
  c.artifacts.push_back(name);
}

void write_json(Context& c, const std::string& name, const json& doc) {
  write_artifact(c, name, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
}

const json& tolerances(const Context& c) {
  static const json empty = json::object();
  const auto* t = find(c.cfg, "tolerances");
  return t ? *t : empty;
}

double tolerance(const Context& c, std::string_view key, double fallback) {
  return number_or(tolerances(c), key, fallback, "tolerances");
}

SolverOptions solver_options(const Context& c) {
  SolverOptions o;
  const auto* s = find(c.cfg, "solver");
  if (!s) return o;
  const auto corr = string_or(*s, "correction", "quadratic_variation", "solver");
  if (corr == "unit") o.correction = ItoCorrection::unit;
  else if (corr != "quadratic_variation")
    throw ConfigError("solver.correction must be 'quadratic_variation' or 'unit'");
  const auto quad = string_or(*s, "quadrature", "trapezoid", "solver");
  if (quad == "left_point") o.quadrature = Quadrature::left_point;
  else if (quad != "trapezoid") throw ConfigError("solver.quadrature must be 'trapezoid' or 'left_point'");
  o.singular_tol = number_or(*s, "singular_tol", -1.0, "solver");
  return o;
}

struct GridSpec {
  double T = 1.0;
  std::size_t steps = 1024;
  std::uint64_t path_id = 0;
  std::size_t n_paths = 1;
};

GridSpec grid_spec(const Context& c, std::size_t default_paths = 1) {
  GridSpec g;
  g.n_paths = default_paths;
  const auto* j = find(c.cfg, "grid");
  if (!j) return g;
  g.T = number_or(*j, "T", g.T, "grid");
  g.steps = count_or(*j, "steps", g.steps, "grid");
  g.path_id = count_or(*j, "path_id", 0, "grid");
  g.n_paths = count_or(*j, "n_paths", g.n_paths, "grid");
  if (!(g.T > 0)) throw ConfigError("grid.T must be positive");
  if (g.steps == 0) throw ConfigError("grid.steps must be positive");
  if (g.n_paths == 0) throw ConfigError("grid.n_paths must be positive");
  return g;
}

Algebra load_algebra(const Context& c) {
  return algebra_from_json(require(c.cfg, "algebra", ""), c.req.base_dir);
}

struct Model {
  std::string kind;
  std::optional<Algebra> alg;
  LinearBaseCoeffs linear;
  LvCoeffs lv;
  HValue z0;
  SdeSystemSpec system;
  std::vector<double> x0;
};

Model load_model(const Context& c, std::initializer_list<std::string_view> allowed, bool need_state = true) {
  Model m;
  m.kind = string_or(c.cfg, "model", "", "");
  if (std::find(allowed.begin(), allowed.end(), m.kind) == allowed.end()) {
    std::string list;
    for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
    throw ConfigError("task '" + c.req.task + "' needs 'model' to be one of: " + list);
  }
  if (m.kind == "system") {
    const std::size_t n = count_or(c.cfg, "n", 0, "");
    const std::size_t mm = count_or(c.cfg, "m", 0, "");
    if (n == 0 || mm == 0) throw ConfigError("model 'system' needs positive 'n' and 'm'");
    expr::ParseOptions po;
    po.dim = n;
    auto drift = expressions(require(c.cfg, "drift", ""), po, "drift", n);
    const auto& rows = require(c.cfg, "diffusion", "");
    if (!rows.is_array() || rows.size() != n) throw ConfigError("diffusion needs " + std::to_string(n) + " rows");
    std::vector<expr::Expr> diff;
    for (std::size_t i = 0; i < n; ++i) {
      auto row = expressions(rows[i], po, "diffusion[" + std::to_string(i) + "]", mm);
      diff.insert(diff.end(), row.begin(), row.end());
    }
    m.system = system_from_exprs(n, mm, std::move(drift), std::move(diff), "user system");
    m.x0 = numbers(require(c.cfg, "X0", ""), "X0", n);
    return m;
  }

  m.alg = load_algebra(c);
  const Algebra& alg = *m.alg;
  const std::size_t n = alg.dim();
  const auto& co = require(c.cfg, "coefficients", "");
  if (m.kind == "linear") {
    expr::ParseOptions po;
    po.dim = 0;
    m.linear.f1 = expressions(require(co, "f1", "coefficients"), po, "coefficients.f1", n);
    m.linear.f2 = expressions(require(co, "f2", "coefficients"), po, "coefficients.f2", n);
    m.linear.g1 = expressions(require(co, "g1", "coefficients"), po, "coefficients.g1", n);
    m.linear.g2 = expressions(require(co, "g2", "coefficients"), po, "coefficients.g2", n);
    m.system = expand_linear_system(alg, m.linear);
  } else if (m.kind == "lv") {
    m.lv.a = element(alg, numbers(require(co, "a", "coefficients"), "coefficients.a", n));
    m.lv.b = element(alg, numbers(require(co, "b", "coefficients"), "coefficients.b", n));
    m.lv.G = element(alg, numbers(require(co, "G", "coefficients"), "coefficients.G", n));
    m.system = expand_lv_system(alg, m.lv);
  } else {
    expr::ParseOptions po;
    po.dim = n;
    const auto a = expressions(require(co, "a", "coefficients"), po, "coefficients.a", n);
    const auto b = expressions(require(co, "b", "coefficients"), po, "coefficients.b", n);
    m.system = expand_general_system(alg, a, b, count_or(c.cfg, "m", n, ""));
  }
  if (need_state || find(c.cfg, "Z0")) {
    m.x0 = numbers(require(c.cfg, "Z0", ""), "Z0", n);
    m.z0 = element(alg, m.x0);
    m.lv.Z0 = m.z0;
  }
  return m;
}

ClosedForm closed_form(const Model& m, const SolverOptions& o) {
  const Algebra alg = *m.alg;
  if (m.kind == "linear") {
    return [alg, co = m.linear, z0 = m.z0, o](const WienerGrid& g) { return solve_linear_base(alg, co, z0, g, o).to_real(); };
  }
  if (m.kind == "lv") return [alg, co = m.lv, o](const WienerGrid& g) { return solve_lv_base(alg, co, g, o).to_real(); };
  throw ConfigError("model '" + m.kind + "' has no closed form");
}

// The real-arithmetic route on C_p, used as an independent cross-check.
std::optional<ClosedForm> cp_route(const Model& m, const SolverOptions& o) {
  if (!m.alg || m.alg->kind() != AlgebraKind::generalized_complex) return std::nullopt;
  const double p = m.alg->parameter();
  const std::pair<double, double> x0{m.x0[0], m.x0[1]};
  if (m.kind == "linear") {
    const auto& l = m.linear;
    CpLinearCoeffs cc{l.f1[0], l.f1[1], l.f2[0], l.f2[1], l.g1[0], l.g1[1], l.g2[0], l.g2[1]};
    return [p, cc, x0, o](const WienerGrid& g) { return solve_linear_cp(p, cc, x0, g, o); };
  }
  if (m.kind == "lv") {
    const auto& l = m.lv;
    CpLvCoeffs cc{l.a[0], l.a[1], l.b[0], l.b[1], l.G[0], l.G[1]};
    return [p, cc, x0, o](const WienerGrid& g) { return solve_lv_cp(p, cc, x0, g, o); };
  }
  return std::nullopt;
}

std::vector<Series> path_series(const RealPath& p, const std::string& prefix) {
  std::vector<Series> out;
  for (std::size_t i = 0; i < p.dim; ++i) out.push_back({prefix + std::to_string(i + 1), p.times, p.component(i)});
  return out;
}

json endpoint(const RealPath& p) {
  const auto s = p.state(p.size() - 1);
  return std::vector<double>(s.begin(), s.end());
}

// --- tasks -----------------------------------------------------------------

void task_verify_algebra(Context& c) {
  const auto& spec = require(c.cfg, "algebra", "");
  const double tol = tolerance(c, "algebra", 1e-12);
  AlgebraTable table;
  try {
    if (find(spec, "gamma")) {
      table = table_from_json(spec);
    } else if (const auto* file = find(spec, "table_file"); file && !find(spec, "builtin")) {
      fs::path path = file->get<std::string>();
      if (path.is_relative()) path = c.req.base_dir / path;
      std::ifstream in(path);
      if (!in) throw ConfigError("cannot open algebra table '" + path.string() + "'");
      table = table_from_json(json::parse(in));
    } else {
      table = load_algebra(c).table();
    }
  } catch (const AxiomViolation& e) {
    c.summary["pass"] = false;
    write_json(c, "report.json", {{"pass", false}, {"error", e.what()}, {"axiom", e.axiom()}, {"witness", e.witness()}});
    throw ValidationFailure(e.what());
  } catch (const NoIdentity& e) {
    c.summary["pass"] = false;
    write_json(c, "report.json", {{"pass", false}, {"error", e.what()}});
    throw ValidationFailure(e.what());
  }
  const auto report = verify_table(table, tol);
  const double worst = std::max({report.commutativity.max_residual, report.associativity.max_residual,
                                 report.identity.max_residual});
  write_json(c, "report.json", {{"label", table.label}, {"dim", table.dim}, {"report", report_to_json(report)}});
  c.summary["algebra"] = table.label;
  c.summary["dim"] = table.dim;
  c.summary["pass"] = report.pass();
  c.summary["max_residual"] = worst;
  if (!report.pass()) throw ValidationFailure("algebra axioms violated in '" + table.label + "'");
}

void task_expand(Context& c) {
  const Model m = load_model(c, {"linear", "lv", "general"}, false);
  json drift = json::array(), diffusion = json::array();
  for (std::size_t i = 0; i < m.system.n; ++i) {
    drift.push_back(expr::to_string(m.system.drift_expr[i]));
    json row = json::array();
    for (std::size_t k = 0; k < m.system.m; ++k) row.push_back(expr::to_string(m.system.diffusion_expr[i * m.system.m + k]));
    diffusion.push_back(std::move(row));
  }
  write_json(c, "expansion.json",
             {{"algebra", m.alg->label()}, {"model", m.kind}, {"n", m.system.n}, {"m", m.system.m},
              {"drift", drift}, {"diffusion", diffusion}});
  c.summary["algebra"] = m.alg->label();
  c.summary["n"] = m.system.n;
  c.summary["m"] = m.system.m;
}

void task_solve(Context& c, const std::string& kind) {
  const Model m = load_model(c, {kind});
  const auto opts = solver_options(c);
  const auto route = string_or(c.cfg, "route", "base", "");
  const auto grid = grid_spec(c);
  const WienerGrid g = sample_wiener(m.system.m, grid.T, grid.steps, seed_of(c), grid.path_id);
  RealPath path;
  if (route == "base") {
    path = closed_form(m, opts)(g);
  } else if (route == "cp") {
    auto cp = cp_route(m, opts);
    if (!cp) throw ConfigError("route 'cp' needs a C_p algebra");
    path = (*cp)(g);
  } else {
    throw ConfigError("route must be 'base' or 'cp'");
  }
  write_artifact(c, "path.csv", [&](std::ostream& os) { write_path_csv(os, path); });
  write_artifact(c, "wiener.csv", [&](std::ostream& os) { write_grid_csv(os, g); });
  write_artifact(c, "path.svg", [&](std::ostream& os) { write_svg_chart(os, "closed form (" + kind + ")", path_series(path, "X")); });
  c.summary["algebra"] = m.alg->label();
  c.summary["route"] = route;
  c.summary["steps"] = grid.steps;
  c.summary["endpoint"] = endpoint(path);
}

void task_simulate(Context& c) {
  const Model m = load_model(c, {"linear", "lv", "general", "system"});
  const auto grid = grid_spec(c);
  const WienerGrid g = sample_wiener(m.system.m, grid.T, grid.steps, seed_of(c), grid.path_id);
  const RealPath path = euler_maruyama(m.system, m.x0, g);
  write_artifact(c, "em.csv", [&](std::ostream& os) { write_path_csv(os, path); });
  write_artifact(c, "wiener.csv", [&](std::ostream& os) { write_grid_csv(os, g); });
  write_artifact(c, "em.svg", [&](std::ostream& os) { write_svg_chart(os, "Euler-Maruyama", path_series(path, "X")); });
  c.summary["steps"] = grid.steps;
  c.summary["endpoint"] = endpoint(path);
}

void task_compare(Context& c) {
  const Model m = load_model(c, {"linear", "lv"});
  const auto opts = solver_options(c);
  const auto grid = grid_spec(c);
  const std::uint64_t seed = seed_of(c);
  const ClosedForm exact = closed_form(m, opts);
  const auto cp = cp_route(m, opts);
  const double tol = tolerance(c, "compare", 0.1);
  const double route_tol = tolerance(c, "routes", 1e-9);

  struct PathResult {
    bool ok = false;
    double endpoint = 0, sup = 0, route = 0;
    std::exception_ptr error;
  };
  std::vector<PathResult> res(grid.n_paths);
  RealPath first_exact, first_em;
  run_parallel(grid.n_paths, c.workers, [&](std::size_t i) {
    auto& r = res[i];
    try {
      const WienerGrid g = sample_wiener(m.system.m, grid.T, grid.steps, seed, grid.path_id + i);
      RealPath ref = exact(g);
      RealPath em = euler_maruyama(m.system, m.x0, g);
      r.endpoint = pathwise_error(ref, em, ErrorMode::endpoint);
      r.sup = pathwise_error(ref, em, ErrorMode::sup);
      if (cp) r.route = pathwise_error(ref, (*cp)(g), ErrorMode::sup);
      r.ok = std::isfinite(r.endpoint) && std::isfinite(r.sup) && std::isfinite(r.route);
      if (i == 0) {
        first_exact = std::move(ref);
        first_em = std::move(em);
      }
    } catch (const MathDomainError&) {
      r.error = std::current_exception();
    }
  });

  std::size_t excluded = 0;
  double sum = 0, max_route = 0;
  for (const auto& r : res) {
    if (!r.ok) {
      ++excluded;
      continue;
    }
    sum += r.endpoint * r.endpoint;
    max_route = std::max(max_route, r.route);
  }
  if (excluded == res.size() && res.front().error) std::rethrow_exception(res.front().error);

  write_artifact(c, "compare.csv", [&](std::ostream& os) {
    const std::string header[] = {"path", "endpoint_error", "sup_error", "route_discrepancy"};
    write_csv_row(os, header);
    for (std::size_t i = 0; i < res.size(); ++i) {
      const auto& r = res[i];
      const std::string row[] = {std::to_string(grid.path_id + i), r.ok ? format_double(r.endpoint) : "",
                                 r.ok ? format_double(r.sup) : "", r.ok && cp ? format_double(r.route) : ""};
      write_csv_row(os, row);
    }
  });
  if (res.front().ok) {
    write_artifact(c, "closed.csv", [&](std::ostream& os) { write_path_csv(os, first_exact); });
    write_artifact(c, "em.csv", [&](std::ostream& os) { write_path_csv(os, first_em); });
    write_artifact(c, "compare.svg", [&](std::ostream& os) {
      auto s = path_series(first_exact, "closed X");
      const auto e = path_series(first_em, "EM X");
      s.insert(s.end(), e.begin(), e.end());
      write_svg_chart(os, "closed form vs Euler-Maruyama", s);
    });
  }

  const std::size_t used = res.size() - excluded;
  const double rms = used ? std::sqrt(sum / static_cast<double>(used)) : std::nan("");
  c.summary["algebra"] = m.alg->label();
  c.summary["n_paths"] = grid.n_paths;
  c.summary["excluded"] = excluded;
  c.summary["rms_endpoint_error"] = rms;
  c.summary["tolerance"] = tol;
  c.summary["max_route_discrepancy"] = cp ? json(max_route) : json(nullptr);

  if (static_cast<double>(excluded) > 0.05 * static_cast<double>(res.size()))
    throw ValidationFailure(std::to_string(excluded) + " of " + std::to_string(res.size()) + " paths excluded");
  if (!(rms <= tol)) throw ValidationFailure("RMS endpoint error " + format_double(rms) + " exceeds " + format_double(tol));
  if (cp && !(max_route <= route_tol))
    throw ValidationFailure("C_p route differs from the base route by " + format_double(max_route));
}

void task_convergence(Context& c) {
  const Model m = load_model(c, {"linear", "lv"});
  const auto sopts = solver_options(c);
  const auto grid = grid_spec(c, 200);
  ConvergenceOptions o;
  o.horizon = grid.T;
  o.n_paths = grid.n_paths;
  o.seed = seed_of(c);
  o.workers = c.workers;
  if (const auto* s = find(c.cfg, "study")) {
    o.base_steps = count_or(*s, "base_steps", o.base_steps, "study");
    o.levels = count_or(*s, "levels", o.levels, "study");
    o.reference_refinement = count_or(*s, "reference_refinement", o.reference_refinement, "study");
    const auto mode = string_or(*s, "mode", "endpoint", "study");
    if (mode == "sup") o.mode = ErrorMode::sup;
    else if (mode != "endpoint") throw ConfigError("study.mode must be 'endpoint' or 'sup'");
  }
  if (o.levels < 3) throw ConfigError("study.levels must be at least 3");
  if (o.base_steps == 0 || o.reference_refinement == 0) throw ConfigError("study shape must be positive");
  std::vector<double> band{0.25, 0.75};
  if (const auto* b = find(tolerances(c), "order")) band = numbers(*b, "tolerances.order", 2);

  const auto study = convergence_study(m.system, closed_form(m, sopts), m.x0, o);
  write_artifact(c, "study.csv", [&](std::ostream& os) { write_study_csv(os, study); });
  write_json(c, "study.json", to_json(study));
  write_artifact(c, "study.svg", [&](std::ostream& os) {
    Series s{"log2 rms error", {}, {}}, fit{"fit", {}, {}};
    for (std::size_t l = 0; l < study.dt.size(); ++l) {
      s.x.push_back(std::log2(study.dt[l]));
      s.y.push_back(std::log2(study.rms_error[l]));
      fit.x.push_back(s.x.back());
      fit.y.push_back(study.slope * s.x.back() + study.intercept);
    }
    write_svg_chart(os, "strong convergence, slope " + format_double(std::round(study.slope * 1000) / 1000), {s, fit},
                    "log2 dt", "log2 rms error");
  });
  c.summary["algebra"] = m.alg->label();
  c.summary["slope"] = study.slope;
  c.summary["intercept"] = study.intercept;
  c.summary["excluded"] = study.excluded;
  c.summary["n_paths"] = study.n_paths;
  c.summary["valid"] = study.valid;
  c.summary["order_band"] = band;
  if (!study.valid)
    throw ValidationFailure(std::to_string(study.excluded) + " of " + std::to_string(study.n_paths) + " paths excluded");
  if (!(study.slope >= band[0] && study.slope <= band[1]))
    throw ValidationFailure("fitted order " + format_double(study.slope) + " outside [" + format_double(band[0]) +
                            ", " + format_double(band[1]) + "]");
}

std::vector<double> axis(const json& samples, std::string_view key, std::vector<double> fallback) {
  const auto* v = find(samples, key);
  const auto spec = v ? numbers(*v, "samples." + std::string(key), 3) : fallback;
  if (spec[2] < 1 || spec[2] != std::floor(spec[2]))
    throw ConfigError("samples." + std::string(key) + " must be [lo, hi, count] with count >= 1");
  return linspace(spec[0], spec[1], static_cast<std::size_t>(spec[2]));
}

void task_check_reducible(Context& c) {
  expr::ParseOptions po;
  po.dim = 1;
  po.aliases = {{"z", 1}, {"Z", 1}};
  const auto f = expression(require(c.cfg, "f", ""), po, "f");
  const auto g = expression(require(c.cfg, "g", ""), po, "g");
  static const json empty = json::object();
  const auto* sj = find(c.cfg, "samples");
  const auto& samples = sj ? *sj : empty;
  const auto ts = axis(samples, "t", {0.0, 1.0, 5});
  const auto zs = axis(samples, "z", {0.5, 2.0, 8});
  const double tol = tolerance(c, "reducibility", 1e-7);
  const double sigma = number_or(c.cfg, "sigma", 1.0, "");
  const auto report = check_reducible_scalar(f, g, grid2(ts, zs), tol, sigma);
  write_json(c, "report.json", to_json(report));
  c.summary["verdict"] = to_string(report.verdict);
  c.summary["max_residual"] = report.conditions.empty() ? 0.0 : report.conditions.front().max_residual;
  if (bool_or(c.cfg, "construct", false, "") && report.verdict == Verdict::reducible) {
    const double anchor = number_or(c.cfg, "anchor", zs.front(), "");
    const auto r = construct_reduction(f, g, ts, zs, anchor, number_or(tolerances(c), "reduction", 1e-6, "tolerances"),
                                       sigma);
    write_json(c, "reduction.json", to_json(r));
    c.summary["reduction_diffusion"] = r.diffusion;
    c.summary["reduction_drift"] = r.drift;
  }
}

void task_check_cp(Context& c) {
  const double p = number(require(c.cfg, "p", ""), "p");
  expr::ParseOptions po;
  po.dim = 2;
  po.aliases = {{"X", 1}, {"Y", 2}};
  const auto f1 = expression(require(c.cfg, "f1", ""), po, "f1");
  const auto f2 = expression(require(c.cfg, "f2", ""), po, "f2");
  const auto g1 = expression(require(c.cfg, "g1", ""), po, "g1");
  const auto g2 = expression(require(c.cfg, "g2", ""), po, "g2");
  static const json empty = json::object();
  const auto* sj = find(c.cfg, "samples");
  const auto& samples = sj ? *sj : empty;
  CpCheckOptions o;
  o.tol = tolerance(c, "reducibility", o.tol);
  o.zero_divisor_gap = tolerance(c, "zero_divisor_gap", o.zero_divisor_gap);
  o.correction = solver_options(c).correction;
  const auto report = check_cp_system(p, f1, f2, g1, g2,
                                      grid3(axis(samples, "t", {0.0, 1.0, 3}), axis(samples, "X", {0.5, 1.5, 4}),
                                            axis(samples, "Y", {-0.5, 0.5, 4})),
                                      o);
  write_json(c, "report.json", to_json(report));
  c.summary["verdict"] = to_string(report.verdict);
  c.summary["hypercomplexifiable"] = report.hypercomplexifiable;
  c.summary["branch"] = report.branch;
}

using TaskFn = std::function<void(Context&)>;

const std::map<std::string, TaskFn, std::less<>>& tasks() {
  static const std::map<std::string, TaskFn, std::less<>> t{
      {"verify-algebra", task_verify_algebra},
      {"expand", task_expand},
      {"solve-linear", [](Context& c) { task_solve(c, "linear"); }},
      {"solve-lv", [](Context& c) { task_solve(c, "lv"); }},
      {"simulate", task_simulate},
      {"compare", task_compare},
      {"convergence", task_convergence},
      {"check-reducible", task_check_reducible},
      {"check-cp", task_check_cp},
  };
  return t;
}

const char* status_name(int code) {
  switch (code) {
    case ok: return "ok";
    case math_error: return "math_error";
    case validation_failure: return "validation_failure";
    default: return "config_error";
  }
}

}  // namespace

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : tasks()) v.push_back(k);
    return v;
  }();
  return names;
}

RunResult run(const RunRequest& req) {
  RunResult result;
  Context c{req, req.config, {}, 0, {}, json::object()};
  c.summary["task"] = req.task;
  try {
    if (!req.config.is_object()) throw ConfigError("config must be a JSON object");
    const auto it = tasks().find(req.task);
    if (it == tasks().end()) throw ConfigError("unknown task '" + req.task + "'");
    if (const auto* t = find(req.config, "task"); t && (!t->is_string() || t->get<std::string>() != req.task))
      throw ConfigError("config is for task '" + t->dump() + "', not '" + req.task + "'");
    c.out = req.out ? *req.out : req.base_dir / string_or(req.config, "out", "hypersde-out", "");
    c.workers = req.workers ? *req.workers : count_or(req.config, "workers", 0, "");
    it->second(c);
  } catch (const ValidationFailure& e) {
    result.exit_code = validation_failure;
    result.message = e.what();
  } catch (const MathDomainError& e) {
    result.exit_code = math_error;
    result.message = e.what();
  } catch (const EvaluationError& e) {
    result.exit_code = math_error;
    result.message = e.what();
  } catch (const json::exception& e) {
    result.exit_code = config_error;
    result.message = std::string("invalid config: ") + e.what();
  } catch (const std::exception& e) {
    result.exit_code = config_error;
    result.message = e.what();
  }
  c.summary["exit_code"] = result.exit_code;
  c.summary["status"] = status_name(result.exit_code);
  c.summary["artifacts"] = c.artifacts;
  if (!result.message.empty()) c.summary["error"] = result.message;
  result.summary = std::move(c.summary);
  return result;
}

RunResult run_file(const std::string& task, const fs::path& config_path, std::optional<fs::path> out,
                   std::optional<std::uint64_t> seed, std::optional<std::size_t> workers) {
  RunRequest req;
  req.task = task;
  req.out = std::move(out);
  req.seed = seed;
  req.workers = workers;
  req.base_dir = config_path.parent_path();
  std::ifstream in(config_path);
  if (!in) {
    RunResult r;
    r.exit_code = config_error;
    r.message = "cannot open config '" + config_path.string() + "'";
    r.summary = {{"task", task}, {"exit_code", r.exit_code}, {"status", status_name(r.exit_code)},
                 {"artifacts", json::array()}, {"error", r.message}};
    return r;
  }
  try {
    req.config = json::parse(in);
  } catch (const json::parse_error& e) {
    RunResult r;
    r.exit_code = config_error;
    r.message = std::string("config is not valid JSON: ") + e.what();
    r.summary = {{"task", task}, {"exit_code", r.exit_code}, {"status", status_name(r.exit_code)},
                 {"artifacts", json::array()}, {"error", r.message}};
    return r;
  }
  return run(req);
}

}  // namespace hypersde::cli
