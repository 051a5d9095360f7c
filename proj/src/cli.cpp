#include "grim/cli.hpp"

#include "grim/csv.hpp"
#include "grim/diagnostics.hpp"
#include "grim/error.hpp"
#include "grim/geim.hpp"
#include "grim/kernel_quadrature.hpp"
#include "grim/log.hpp"
#include "grim/problems.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace grim::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

const std::vector<std::string> kModes = {"approx", "quadrature", "cubature", "l2-demo",
                                         "geim-compare"};

template <class T>
T get_as(const json& doc, const std::string& key, const char* expected) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "': expected " + expected);
  }
}

std::vector<int> schedule_from(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (v.is_number_integer()) return {v.get<int>()};
  if (v.is_array() && !v.empty()) return get_as<std::vector<int>>(doc, key, "integer or list");
  throw ConfigError("config key '" + key + "': expected integer or non-empty list of integers");
}

json result_json(const GrimResult& r) {
  json j;
  j["support"] = r.support;
  j["coefficients"] = r.coefficients;
  j["support_size"] = r.support.size();
  j["achieved_sup"] = r.achieved_sup;
  j["steps_completed"] = r.steps_completed;
  j["terminated_early"] = r.terminated_early;
  j["best_step"] = r.trace.best_step;
  j["mass"] = r.mass;
  j["epsilon0"] = r.epsilon0;
  return j;
}

Index kappa_cap(const ProblemInstance& inst, bool grouped) {
  if (grouped && inst.group_of) {
    Index groups = 0;
    for (Index g : *inst.group_of) groups = std::max(groups, g + 1);
    return groups;
  }
  return std::min(std::max<Index>(inst.feature_count() - 1, 1), inst.functional_count());
}

int default_steps(const Settings& s, Index cap) {
  const int k = s.k_schedule.size() == 1 ? std::max(s.k_schedule.front(), 1) : 1;
  return std::max<int>(1, static_cast<int>(cap / k));
}

json diagnostics_block(const Settings& s, const GrimConfig& cfg, const GrimResult& r,
                       const ProblemInstance& inst, const Matrix* dist) {
  if (!s.diagnostics) return nullptr;
  json d;
  if (dist == nullptr) {
    d["skipped"] = "no distance matrix between functionals is available for this run";
    return d;
  }
  if (dist->rows() != inst.functional_count()) {
    throw DataError("distance matrix is " + std::to_string(dist->rows()) + " x " +
                    std::to_string(dist->cols()) + " but there are " +
                    std::to_string(inst.functional_count()) + " functionals");
  }
  const double eps0 = r.epsilon0;
  d["separation"] = to_json(separation_check(r.trace, *dist, cfg.epsilon, eps0, r.mass,
                                             cfg.k_schedule, cfg.s_schedule));
  d["step_bound"] = to_json(step_bound_report(r.trace, *dist, cfg.epsilon, eps0, r.mass,
                                              inst.feature_count(), inst.functional_count()));
  return d;
}

RunOutput run_approx(const Settings& s) {
  if (!s.evals || !s.weights) throw ConfigError("approx needs --evals and --weights");
  ProblemInstance inst = load_csv_instance(*s.evals, *s.weights, s.norms);
  if (s.groups) {
    const Vector g = csv::read_vector(*s.groups);
    if (g.size() != inst.functional_count()) {
      throw DataError(s.groups->string() + ": " + std::to_string(g.size()) +
                      " group ids for " + std::to_string(inst.functional_count()) +
                      " functionals");
    }
    std::vector<Index> ids(static_cast<std::size_t>(g.size()));
    for (Index j = 0; j < g.size(); ++j) {
      if (g(j) != std::floor(g(j))) throw DataError(s.groups->string() + ": group ids must be integers");
      ids[static_cast<std::size_t>(j)] = static_cast<Index>(g(j));
    }
    inst.group_of = std::move(ids);
  }
  if (s.distances) inst.dual_distance = csv::read_matrix(*s.distances);
  inst.validate();

  const GrimConfig cfg = resolve_config(s, default_steps(s, kappa_cap(inst, s.grouped)));
  GrimResult r = run_grim(inst, cfg);
  RunOutput out;
  out.report["result"] = result_json(r);
  out.report["diagnostics"] =
      diagnostics_block(s, cfg, r, inst, inst.dual_distance ? &*inst.dual_distance : nullptr);
  out.trace = std::move(r.trace);
  return out;
}

Vector probability_weights(const std::optional<Vector>& raw, Index n) {
  if (!raw) return Vector::Constant(n, 1.0 / double(n));
  if ((raw->array() <= 0.0).any()) throw DataError("point weights must be > 0");
  const double total = raw->sum();
  if (std::abs(total - 1.0) > 1e-10) log::info("normalizing point weights to sum 1");
  return *raw / total;
}

RunOutput run_quadrature(const Settings& s) {
  if (!s.points) throw ConfigError("quadrature needs --points");
  const LoadedCloud loaded = load_point_cloud(*s.points);
  const Index n = loaded.cloud.count();
  const Vector mu = probability_weights(loaded.weights, n);
  KernelSpec spec;
  spec.bandwidth = s.bandwidth ? *s.bandwidth : median_heuristic(loaded.cloud, 1000, s.seed);
  if (!(spec.bandwidth > 0.0)) {
    throw DataError("bandwidth must be > 0 (median heuristic gives 0 for a cloud of one point)");
  }

  GrimConfig cfg;
  if (s.nodes) {
    if (s.max_steps || s.k_schedule.size() != 1) {
      throw ConfigError("--nodes fixes the schedule; give a single --k and no --max-steps");
    }
    if (*s.nodes < 2 || *s.nodes > n) {
      throw ConfigError("--nodes must lie in [2, " + std::to_string(n) + "]");
    }
    cfg = GrimConfig::for_budget(s.epsilon, *s.nodes - 1, s.k_schedule.front(),
                                 s.s_schedule.front(), s.seed);
    if (s.s_schedule.size() != 1) {
      throw ConfigError("--nodes needs a single --s value");
    }
    cfg.epsilon0 = s.epsilon0;
    cfg.method = resolve_config(s, 1).method;
  } else {
    cfg = resolve_config(s, default_steps(s, n - 1));
  }
  QuadratureResult q = kernel_quadrature_grim(loaded.cloud, mu, spec, cfg);

  RunOutput out;
  out.report["result"] = result_json(q.run);
  out.report["metrics"] = {{"wce_squared", q.wce_squared},
                           {"bandwidth", spec.bandwidth},
                           {"node_count", q.node_indices.size()}};
  if (s.diagnostics) {
    const Matrix dist = functional_distance_matrix(gram_matrix(loaded.cloud, spec));
    const ProblemInstance inst = kernel_quadrature_instance(loaded.cloud, mu, spec);
    out.report["diagnostics"] = diagnostics_block(s, cfg, q.run, inst, &dist);
  } else {
    out.report["diagnostics"] = nullptr;
  }
  out.trace = std::move(q.run.trace);
  return out;
}

RunOutput run_cubature(const Settings& s) {
  if (!s.points) throw ConfigError("cubature needs --points");
  const LoadedCloud loaded = load_point_cloud(*s.points);
  const Index n = loaded.cloud.count();
  Vector w;
  if (loaded.weights && s.weights) {
    throw ConfigError("weights given both as a column of --points and as --weights");
  } else if (loaded.weights) {
    w = *loaded.weights;
  } else if (s.weights) {
    w = csv::read_vector(*s.weights);
    if (w.size() != n) throw DataError(s.weights->string() + ": weight count does not match points");
  } else {
    w = Vector::Constant(n, 1.0 / double(n));
  }
  MomentSpec spec{s.degree, loaded.cloud.dimension()};

  std::optional<GrimConfig> cfg;
  const bool explicit_schedule =
      s.max_steps || s.k_schedule.size() > 1 || s.s_schedule.size() > 1 ||
      s.k_schedule.front() != 1 || s.s_schedule.front() != 1;
  if (explicit_schedule) cfg = resolve_config(s, 1);
  CubatureResult c = reduce_cubature(loaded.cloud, w, spec, cfg);

  const ProblemInstance inst = build_monomial_cubature(loaded.cloud, w, spec);
  Vector reduced = Vector::Zero(inst.functional_count());
  for (std::size_t t = 0; t < c.nodes.size(); ++t) {
    reduced += c.weights[t] * inst.evaluations.col(c.nodes[t]);
  }
  const Vector scale = inst.evaluations.cwiseAbs() * w.cwiseAbs();
  double worst = 0.0;
  for (Index e = 0; e < reduced.size(); ++e) {
    const double denom = scale(e) > 0.0 ? scale(e) : 1.0;
    worst = std::max(worst, std::abs(reduced(e) - inst.target(e)) / denom);
  }

  RunOutput out;
  out.report["result"] = result_json(c.run);
  json pts = json::array();
  for (Index node : c.nodes) {
    std::vector<double> p(static_cast<std::size_t>(loaded.cloud.dimension()));
    for (Index k = 0; k < loaded.cloud.dimension(); ++k) {
      p[static_cast<std::size_t>(k)] = loaded.cloud.points(node, k);
    }
    pts.push_back(p);
  }
  out.report["metrics"] = {{"moment_count", inst.functional_count()},
                           {"moment_max_rel_error", worst},
                           {"node_points", pts}};
  out.report["diagnostics"] = diagnostics_block(s, GrimConfig{}, c.run, inst, nullptr);
  out.trace = std::move(c.run.trace);
  return out;
}

L2DemoSpec demo_spec(const Settings& s, bool with_gram) {
  L2DemoSpec spec;
  spec.n_grid = s.n_grid;
  spec.n_functionals = s.n_functionals;
  spec.mollifier_width = s.mollifier_width;
  spec.domain_points = s.domain_points;
  spec.local_points = s.local_points;
  spec.with_gram = with_gram;
  return spec;
}

json metrics_json(const L2Metrics& m) {
  return {{"l2_error", m.l2_error}, {"sup_error", m.sup_error}};
}

RunOutput run_l2_demo(const Settings& s) {
  const L2Demo demo = build_l2_demo(demo_spec(s, false));
  const GrimConfig cfg = resolve_config(s, std::max(1, s.n_grid - 1));
  GrimResult r = run_grim(demo.instance, cfg);
  RunOutput out;
  out.report["result"] = result_json(r);
  out.report["metrics"] = metrics_json(eval_l2_metrics(demo, r.support, r.coefficients));
  out.report["diagnostics"] = diagnostics_block(s, cfg, r, demo.instance, nullptr);
  out.trace = std::move(r.trace);
  return out;
}

RunOutput run_geim_compare(const Settings& s) {
  const L2Demo demo = build_l2_demo(demo_spec(s, true));
  const int features = s.geim_features ? *s.geim_features : s.n_grid;
  if (features < 1) throw ConfigError("geim_features must be >= 1");
  const GrimConfig cfg = resolve_config(s, std::max(1, features - 1));
  GrimResult r = run_grim(demo.instance, cfg);

  const GeimFit fit = geim_fit(demo.instance, *demo.norm, features);
  const Vector& coeffs = fit.interpolants.back();
  Index nonzero = 0;
  for (Index i = 0; i < coeffs.size(); ++i) nonzero += coeffs(i) != 0.0 ? 1 : 0;

  RunOutput out;
  out.report["result"] = result_json(r);
  out.report["metrics"] = metrics_json(eval_l2_metrics(demo, r.support, r.coefficients));
  out.report["geim"] = {{"selected_features", fit.state.selected_features},
                        {"selected_functionals", fit.state.selected_functionals},
                        {"support_size", nonzero},
                        {"metrics", metrics_json(eval_l2_metrics(demo, coeffs))}};
  out.report["diagnostics"] = diagnostics_block(s, cfg, r, demo.instance, nullptr);
  out.trace = std::move(r.trace);
  return out;
}

std::string join(const std::vector<Index>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ';';
    out += std::to_string(v[i]);
  }
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path.string() + " for writing");
  f << text;
  f.close();
  if (!f) throw DataError("failed writing " + path.string());
}

// Option values shared by the subcommands; optional ones are copied into
// Settings only when given on the chosen subcommand.
struct CommonOptions {
  double epsilon0 = 0.0;
  int max_steps = 0;
  std::string evals, weights, norms, groups, distances, points, out, trace;
  double bandwidth = 0.0;
  int nodes = 0, geim_features = 0;
};

void add_grim_options(CLI::App* app, Settings& s, CommonOptions& c) {
  app->add_option("--epsilon", s.epsilon, "target sup residual over all functionals");
  app->add_option("--epsilon0", c.epsilon0, "per-functional recombination tolerance");
  app->add_option("--max-steps", c.max_steps, "step limit M");
  app->add_option("--k", s.k_schedule, "functionals added per step (scalar or comma list)")
      ->delimiter(',');
  app->add_option("--s", s.s_schedule, "shuffle trials per step (scalar or comma list)")
      ->delimiter(',');
  app->add_option("--seed", s.seed, "seed for shuffles and subsampling");
  app->add_option("--method", s.method, "recombination variant")
      ->check(CLI::IsMember({"tree", "basic"}));
  app->add_option("--out", c.out, "report JSON path (default stdout)");
  app->add_option("--trace", c.trace, "trace CSV path (default beside --out)");
}

void copy_common(const CLI::App* chosen, const CommonOptions& c, Settings& s) {
  auto given = [chosen](const char* name) {
    try {
      return chosen->get_option(name)->count() > 0;
    } catch (const CLI::OptionNotFound&) {
      return false;
    }
  };
  auto set_path = [&](const char* name, const std::string& v, std::optional<fs::path>& dst) {
    if (given(name)) dst = v;
  };
  if (given("--epsilon0")) s.epsilon0 = c.epsilon0;
  if (given("--max-steps")) s.max_steps = c.max_steps;
  set_path("--evals", c.evals, s.evals);
  set_path("--weights", c.weights, s.weights);
  set_path("--norms", c.norms, s.norms);
  set_path("--groups", c.groups, s.groups);
  set_path("--distances", c.distances, s.distances);
  set_path("--points", c.points, s.points);
  set_path("--out", c.out, s.out);
  set_path("--trace", c.trace, s.trace);
  if (given("--bandwidth")) s.bandwidth = c.bandwidth;
  if (given("--nodes")) s.nodes = c.nodes;
  if (given("--features")) s.geim_features = c.geim_features;
}

void add_demo_options(CLI::App* app, Settings& s) {
  app->add_option("--n", s.n_grid, "parameter points per axis (features = n^2)");
  app->add_option("--functionals", s.n_functionals, "number of window functionals");
  app->add_option("--width", s.mollifier_width, "Gaussian window width");
  app->add_option("--domain-points", s.domain_points, "grid size for L2 norms");
  app->add_option("--local-points", s.local_points, "grid size per window");
}

int report_error(const char* kind, const std::string& what, int code) {
  std::string line = what;
  std::replace(line.begin(), line.end(), '\n', ' ');
  std::cerr << "grim: " << kind << ": " << line << "\n";
  return code;
}

}  // namespace

Settings settings_from_json(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {
      "mode",     "epsilon",     "epsilon0",   "max_steps",     "k_schedule",
      "s_schedule", "seed",      "grouped",    "method",        "evals",
      "weights",  "norms",       "groups",     "distances",     "points",
      "out",      "trace",       "diagnostics", "bandwidth",    "nodes",
      "degree",   "n_grid",      "n_functionals", "mollifier_width", "domain_points",
      "local_points", "geim_features"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  Settings s;
  if (!doc.contains("mode")) throw ConfigError("config needs a 'mode'");
  s.mode = get_as<std::string>(doc, "mode", "string");
  if (std::find(kModes.begin(), kModes.end(), s.mode) == kModes.end()) {
    throw ConfigError("unknown mode '" + s.mode + "'");
  }
  auto path = [&](const char* key, std::optional<fs::path>& dst) {
    if (!doc.contains(key) || doc.at(key).is_null()) return;
    fs::path p = get_as<std::string>(doc, key, "path string");
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    dst = p;
  };
  if (doc.contains("epsilon")) s.epsilon = get_as<double>(doc, "epsilon", "number");
  if (doc.contains("epsilon0") && !doc.at("epsilon0").is_null()) {
    s.epsilon0 = get_as<double>(doc, "epsilon0", "number");
  }
  if (doc.contains("max_steps")) s.max_steps = get_as<int>(doc, "max_steps", "integer");
  if (doc.contains("k_schedule")) s.k_schedule = schedule_from(doc, "k_schedule");
  if (doc.contains("s_schedule")) s.s_schedule = schedule_from(doc, "s_schedule");
  if (doc.contains("seed")) s.seed = get_as<std::uint64_t>(doc, "seed", "non-negative integer");
  if (doc.contains("grouped")) s.grouped = get_as<bool>(doc, "grouped", "boolean");
  if (doc.contains("method")) s.method = get_as<std::string>(doc, "method", "'tree' or 'basic'");
  path("evals", s.evals);
  path("weights", s.weights);
  path("norms", s.norms);
  path("groups", s.groups);
  path("distances", s.distances);
  path("points", s.points);
  path("out", s.out);
  path("trace", s.trace);
  if (doc.contains("diagnostics")) s.diagnostics = get_as<bool>(doc, "diagnostics", "boolean");
  if (doc.contains("bandwidth")) s.bandwidth = get_as<double>(doc, "bandwidth", "number");
  if (doc.contains("nodes")) s.nodes = get_as<int>(doc, "nodes", "integer");
  if (doc.contains("degree")) s.degree = get_as<int>(doc, "degree", "integer");
  if (doc.contains("n_grid")) s.n_grid = get_as<int>(doc, "n_grid", "integer");
  if (doc.contains("n_functionals")) s.n_functionals = get_as<int>(doc, "n_functionals", "integer");
  if (doc.contains("mollifier_width")) {
    s.mollifier_width = get_as<double>(doc, "mollifier_width", "number");
  }
  if (doc.contains("domain_points")) s.domain_points = get_as<int>(doc, "domain_points", "integer");
  if (doc.contains("local_points")) s.local_points = get_as<int>(doc, "local_points", "integer");
  if (doc.contains("geim_features")) s.geim_features = get_as<int>(doc, "geim_features", "integer");
  return s;
}

json settings_to_json(const Settings& s) {
  json j;
  j["mode"] = s.mode;
  j["epsilon"] = s.epsilon;
  if (s.epsilon0) j["epsilon0"] = *s.epsilon0;
  if (s.max_steps) j["max_steps"] = *s.max_steps;
  j["k_schedule"] = s.k_schedule;
  j["s_schedule"] = s.s_schedule;
  j["seed"] = s.seed;
  j["grouped"] = s.grouped;
  j["method"] = s.method;
  auto path = [&](const char* key, const std::optional<fs::path>& p) {
    if (p) j[key] = p->generic_string();
  };
  path("evals", s.evals);
  path("weights", s.weights);
  path("norms", s.norms);
  path("groups", s.groups);
  path("distances", s.distances);
  path("points", s.points);
  path("out", s.out);
  path("trace", s.trace);
  j["diagnostics"] = s.diagnostics;
  if (s.mode == "quadrature") {
    if (s.bandwidth) j["bandwidth"] = *s.bandwidth;
    if (s.nodes) j["nodes"] = *s.nodes;
  }
  if (s.mode == "cubature") j["degree"] = s.degree;
  if (s.mode == "l2-demo" || s.mode == "geim-compare") {
    j["n_grid"] = s.n_grid;
    j["n_functionals"] = s.n_functionals;
    j["mollifier_width"] = s.mollifier_width;
    j["domain_points"] = s.domain_points;
    j["local_points"] = s.local_points;
    if (s.geim_features) j["geim_features"] = *s.geim_features;
  }
  return j;
}

GrimConfig resolve_config(const Settings& s, int default_max_steps) {
  if (s.k_schedule.empty() || s.s_schedule.empty()) throw ConfigError("schedules must be non-empty");
  int steps = default_max_steps;
  if (s.max_steps) {
    steps = *s.max_steps;
  } else if (s.k_schedule.size() > 1 || s.s_schedule.size() > 1) {
    steps = static_cast<int>(std::max(s.k_schedule.size(), s.s_schedule.size()));
  }
  if (steps < 1) throw ConfigError("max_steps must be >= 1");
  auto broadcast = [steps](const std::vector<int>& v, const char* name) {
    if (v.size() == 1) return std::vector<int>(static_cast<std::size_t>(steps), v.front());
    if (v.size() != static_cast<std::size_t>(steps)) {
      throw ConfigError(std::string(name) + " has " + std::to_string(v.size()) +
                        " entries but max_steps is " + std::to_string(steps));
    }
    return v;
  };
  GrimConfig cfg;
  cfg.epsilon = s.epsilon;
  cfg.epsilon0 = s.epsilon0;
  cfg.max_steps = steps;
  cfg.k_schedule = broadcast(s.k_schedule, "k_schedule");
  cfg.s_schedule = broadcast(s.s_schedule, "s_schedule");
  cfg.seed = s.seed;
  cfg.grouped = s.grouped;
  if (s.method == "tree") {
    cfg.method = RecombinationMethod::tree;
  } else if (s.method == "basic") {
    cfg.method = RecombinationMethod::basic;
  } else {
    throw ConfigError("method must be 'tree' or 'basic'");
  }
  return cfg;
}

RunOutput execute(const Settings& s) {
  RunOutput out;
  if (s.mode == "approx") {
    out = run_approx(s);
  } else if (s.mode == "quadrature") {
    out = run_quadrature(s);
  } else if (s.mode == "cubature") {
    out = run_cubature(s);
  } else if (s.mode == "l2-demo") {
    out = run_l2_demo(s);
  } else if (s.mode == "geim-compare") {
    out = run_geim_compare(s);
  } else {
    throw ConfigError("unknown mode '" + s.mode + "'");
  }
  out.report["mode"] = s.mode;
  out.report["config"] = settings_to_json(s);
  return out;
}

std::string trace_csv(const GrimTrace& trace) {
  std::string text = "step,selected_indices,residual_sup,support_size,shuffle_winner\n";
  for (const GrimStep& st : trace.steps) {
    text += std::to_string(st.step) + ',' + join(st.added) + ',' +
            csv::format_number(st.residual_sup) + ',' + std::to_string(st.support.size()) + ',' +
            std::to_string(st.shuffle_winner) + '\n';
  }
  return text;
}

void write_results(const json& report, const GrimTrace& trace,
                   const std::optional<fs::path>& report_path,
                   const std::optional<fs::path>& trace_path) {
  if (trace_path) write_file(*trace_path, trace_csv(trace));
  const std::string text = report.dump(2) + "\n";
  if (report_path) {
    write_file(*report_path, text);
  } else {
    std::cout << text;
  }
}

std::optional<fs::path> trace_path_for(const Settings& s) {
  if (s.trace) return s.trace;
  if (!s.out) return std::nullopt;
  fs::path p = *s.out;
  p.replace_extension(".trace.csv");
  return p;
}

int run_command(const std::vector<std::string>& argv) {
  CLI::App app{"Sparse approximation by greedy recombination interpolation", "grim"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  Settings s;
  CommonOptions c;
  std::string config_path;

  CLI::App* approx = app.add_subcommand("approx", "generic instance from CSV files");
  add_grim_options(approx, s, c);
  approx->add_option("--evals", c.evals, "Lambda x N evaluation matrix CSV")->required();
  approx->add_option("--weights", c.weights, "N feature weights CSV")->required();
  approx->add_option("--norms", c.norms, "N feature norms CSV (default ones)");
  approx->add_option("--groups", c.groups, "group id per functional CSV");
  approx->add_option("--distances", c.distances, "Lambda x Lambda distance CSV");
  approx->add_flag("--grouped", s.grouped, "extend by whole groups");
  approx->add_flag("--diagnostics", s.diagnostics, "separation and step-bound checks");

  CLI::App* quad = app.add_subcommand("quadrature", "kernel quadrature of a point cloud");
  add_grim_options(quad, s, c);
  quad->add_option("--points", c.points, "point cloud CSV")->required();
  quad->add_option("--bandwidth", c.bandwidth, "RBF bandwidth (default median heuristic)");
  quad->add_option("--nodes", c.nodes, "node budget; schedule adds --k per step");
  quad->add_flag("--diagnostics", s.diagnostics, "separation and step-bound checks");

  CLI::App* cub = app.add_subcommand("cubature", "moment-preserving measure reduction");
  add_grim_options(cub, s, c);
  cub->add_option("--points", c.points, "point cloud CSV")->required();
  cub->add_option("--weights", c.weights, "point weights CSV (default uniform)");
  cub->add_option("--degree", s.degree, "largest total monomial degree");

  CLI::App* demo = app.add_subcommand("l2-demo", "L2(0,1) approximation demo");
  add_grim_options(demo, s, c);
  add_demo_options(demo, s);

  CLI::App* cmp = app.add_subcommand("geim-compare", "L2 demo with the GEIM baseline");
  add_grim_options(cmp, s, c);
  add_demo_options(cmp, s);
  cmp->add_option("--features", c.geim_features, "GEIM features (default n)");

  CLI::App* run = app.add_subcommand("run", "run from a JSON config file");
  run->add_option("--config", config_path, "config path")->required();

  std::vector<const char*> raw;
  raw.reserve(argv.size());
  for (const auto& a : argv) raw.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage error", e.what(), kConfigError);
    std::cerr << app.help();
    return kConfigError;
  }

  CLI::App* chosen = app.get_subcommands().front();

  try {
    if (chosen == run) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open config " + config_path);
      json doc;
      try {
        doc = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ConfigError(config_path + ": " + e.what());
      }
      s = settings_from_json(doc, fs::path(config_path).parent_path());
    } else {
      s.mode = chosen->get_name();
      copy_common(chosen, c, s);
    }

    const auto start = std::chrono::steady_clock::now();
    RunOutput out = execute(s);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::optional<fs::path> trace_path = trace_path_for(s);
    out.report["trace_file"] = trace_path ? json(trace_path->generic_string()) : json(nullptr);
    out.report["wall_time_seconds"] = seconds;
    write_results(out.report, out.trace, s.out, trace_path);
    return kOk;
  } catch (const ConfigError& e) {
    return report_error("config error", e.what(), kConfigError);
  } catch (const DataError& e) {
    return report_error("data error", e.what(), kDataError);
  } catch (const NumericalError& e) {
    return report_error("numerical failure", e.what(), kNumericalError);
  } catch (const std::exception& e) {
    return report_error("internal error", e.what(), kInternalError);
  }
}

}  // namespace grim::cli
