// Batch front end: ingest a JSON config, run one pipeline, write artifacts.
// Exit codes: 0 success (and validation/comparison passed), 1 a validation or
// comparison failed, 2 usage/config/IO error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"

#include "chainrec/chains.hpp"
#include "chainrec/control.hpp"
#include "chainrec/json_io.hpp"
#include "chainrec/recurrence.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace chainrec;

namespace {

struct Params {
  double eps = 0.0;
  double eps_conley = 0.0;
  double eps_shadow = 0.0;
  double t_min = 2.0;
  double tau_step = kDefaultTauStep;
  int time_samples = 5;
  int samples_per_box = 0;
  std::uint64_t seed = 0;
  std::string semantics = "shadow";
  double h_max = 0.1;
};

struct Config {
  fs::path base;
  SemiflowSpec system;
  std::vector<int> subdivisions;
  Params params;
  json raw;
};

SemiflowSpec parse_system(const json& j) {
  expect_keys(j,
              {"kind", "name", "field", "step", "coeffs", "domain", "metric", "v_max",
               "lipschitz"},
              "system");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "analytic") {
    return builtin_semiflow(j.at("name").get<std::string>(), SpecKind::analytic);
  }
  if (kind != "ode") throw std::invalid_argument("system.kind must be analytic or ode");
  const double step = j.contains("step") ? j.at("step").get<double>() : 1e-3;
  const std::string field = j.at("field").get<std::string>();
  if (field != "custom") return builtin_semiflow(field, SpecKind::ode, step);

  PolyField poly;
  for (const auto& dim_terms : j.at("coeffs")) {
    std::vector<PolyTerm> terms;
    for (const auto& t : dim_terms) {
      PolyTerm term;
      term.coeff = t.at(0).get<double>();
      term.exponents = t.at(1).get<std::vector<int>>();
      terms.push_back(std::move(term));
    }
    poly.push_back(std::move(terms));
  }
  BoxDomain dom;
  for (const auto& iv : j.at("domain"))
    dom.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
  Metric metric = Metric::euclidean(int(dom.size()));
  if (j.contains("metric") && j.at("metric").get<std::string>() == "torus") {
    std::vector<double> periods;
    for (const auto& iv : dom) periods.push_back(iv.hi - iv.lo);
    metric = Metric::torus(periods);
  }
  const double v_max = j.contains("v_max") ? j.at("v_max").get<double>() : 1.0;
  std::optional<double> lip;
  if (j.contains("lipschitz")) lip = j.at("lipschitz").get<double>();
  return custom_ode(std::move(poly), std::move(dom), std::move(metric), v_max, lip,
                    step);
}

Params parse_params(const json& j) {
  Params p;
  if (j.is_null()) return p;
  expect_keys(j,
              {"eps", "eps_conley", "eps_shadow", "t_min", "tau_step", "time_samples",
               "samples_per_box", "seed", "semantics", "h_max"},
              "params");
  if (j.contains("eps")) p.eps = j.at("eps").get<double>();
  p.eps_conley = j.contains("eps_conley") ? j.at("eps_conley").get<double>() : p.eps;
  p.eps_shadow = j.contains("eps_shadow") ? j.at("eps_shadow").get<double>() : p.eps;
  if (j.contains("t_min")) p.t_min = j.at("t_min").get<double>();
  if (j.contains("tau_step")) p.tau_step = j.at("tau_step").get<double>();
  if (j.contains("time_samples")) p.time_samples = j.at("time_samples").get<int>();
  if (j.contains("samples_per_box"))
    p.samples_per_box = j.at("samples_per_box").get<int>();
  if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("semantics")) p.semantics = j.at("semantics").get<std::string>();
  if (j.contains("h_max")) p.h_max = j.at("h_max").get<double>();
  return p;
}

Config load_config(const std::string& path) {
  Config c;
  c.base = fs::path(path).parent_path();
  c.raw = load_json_file(path);
  expect_keys(c.raw, {"system", "grid", "params", "validate", "convert", "perturb"},
              "config");
  c.system = parse_system(c.raw.at("system"));
  if (c.raw.contains("grid")) {
    expect_keys(c.raw.at("grid"), {"subdivisions"}, "grid");
    c.subdivisions = c.raw.at("grid").at("subdivisions").get<std::vector<int>>();
  }
  c.params = parse_params(c.raw.contains("params") ? c.raw.at("params") : json());
  return c;
}

fs::path resolve(const Config& c, const std::string& p) {
  fs::path q(p);
  return q.is_absolute() ? q : c.base / q;
}

BoxGrid make_grid(const Config& c) {
  if (c.subdivisions.empty())
    throw std::invalid_argument("config: grid.subdivisions required for this command");
  return BoxGrid(c.system.domain, c.subdivisions, c.system.metric);
}

std::string defect_report_json(const DefectReport& r, const char* kind) {
  std::string s = "{\"kind\":\"";
  s += kind;
  s += "\",\"passed\":";
  s += r.passed ? "true" : "false";
  s += ",\"max_defect\":" + fmt_double(r.max_defect);
  s += ",\"argmax_t\":" + fmt_double(r.argmax_t);
  s += ",\"argmax_tau\":" + fmt_double(r.argmax_tau);
  s += ",\"argmax_hop\":" + std::to_string(r.argmax_hop);
  s += ",\"time_floor_ok\":";
  s += r.time_floor_ok ? "true" : "false";
  s += ",\"checked_pairs\":" + std::to_string(r.checked_pairs);
  s += "}";
  return s;
}

double continuity_budget(const Config& c) {
  return 10.0 * c.params.h_max * std::max(1.0, c.system.v_max);
}

int cmd_analyze(const Config& c, const fs::path& out) {
  const BoxGrid grid = make_grid(c);
  const Rng rng(c.params.seed);
  TransitionGraph g =
      c.params.semantics == "conley"
          ? conley_transition_graph(c.system, grid, c.params.eps_conley,
                                    c.params.t_min, c.params.time_samples,
                                    c.params.samples_per_box, rng)
          : shadow_transition_graph(c.system, grid, c.params.eps_shadow,
                                    c.params.samples_per_box, rng);
  const ChainGraph cg = chain_graph(g);
  const std::string gname =
      c.params.semantics == "conley" ? "graph_conley.json" : "graph_shadow.json";
  write_text_file((out / gname).string(), graph_to_json(g));
  write_text_file((out / "chaingraph.dot").string(), chain_graph_to_dot(cg, grid));
  write_text_file((out / "chaingraph.json").string(), chain_graph_to_json(cg));
  write_text_file((out / "recurrent.csv").string(), recurrent_csv(cg, grid));
  return 0;
}

int cmd_compare(const Config& c, const fs::path& out) {
  const BoxGrid grid = make_grid(c);
  CompareParams p;
  p.eps_conley = c.params.eps_conley;
  p.eps_shadow = c.params.eps_shadow;
  p.t_min = c.params.t_min;
  p.time_samples = c.params.time_samples;
  p.samples_per_box = c.params.samples_per_box;
  p.seed = c.params.seed;
  const Rng rng(p.seed);
  const TransitionGraph gs =
      shadow_transition_graph(c.system, grid, p.eps_shadow, p.samples_per_box, rng);
  const TransitionGraph gc = conley_transition_graph(
      c.system, grid, p.eps_conley, p.t_min, p.time_samples, p.samples_per_box, rng);
  write_text_file((out / "graph_shadow.json").string(), graph_to_json(gs));
  write_text_file((out / "graph_conley.json").string(), graph_to_json(gc));
  const EquivalenceReport rep = compare_graphs(c.system, gs, gc, p);
  write_text_file((out / "report.json").string(), report_to_json(rep));
  return rep.all_match() ? 0 : 1;
}

int cmd_validate(const Config& c, const fs::path& out) {
  if (!c.raw.contains("validate"))
    throw std::invalid_argument("config: validate section required");
  expect_keys(c.raw.at("validate"), {"input"}, "validate");
  const json data = load_json_file(
      resolve(c, c.raw.at("validate").at("input").get<std::string>()).string());
  DefectReport rep;
  const char* kind = "shadow";
  if (data.contains("samples")) {
    const Curve curve = curve_from_json(data, c.system.metric, c.params.h_max,
                                        continuity_budget(c));
    rep = validate_shadow(curve, c.system, c.params.eps_shadow, c.params.tau_step);
  } else {
    kind = "conley";
    rep = validate_conley(chain_from_json(data), c.system, c.params.eps_conley,
                          c.params.t_min);
  }
  const std::string text = defect_report_json(rep, kind);
  std::cout << text << "\n";
  if (!out.empty()) write_text_file((out / "report.json").string(), text);
  return rep.passed ? 0 : 1;
}

int cmd_convert(const Config& c, const fs::path& out) {
  if (!c.raw.contains("convert"))
    throw std::invalid_argument("config: convert section required");
  const json& cv = c.raw.at("convert");
  expect_keys(cv, {"input", "direction", "loop", "sample_step"}, "convert");
  const std::string direction = cv.at("direction").get<std::string>();
  const json data = load_json_file(resolve(c, cv.at("input").get<std::string>()).string());
  const double h = cv.contains("sample_step") ? cv.at("sample_step").get<double>() : 0.01;

  if (direction == "conley_to_shadow") {
    const ConleyChain chain = chain_from_json(data);
    const Curve curve = conley_to_shadow(chain, c.system, h);
    write_text_file((out / "curve.json").string(), curve_to_json(curve));
    return 0;
  }
  if (direction != "shadow_to_conley")
    throw std::invalid_argument("convert.direction must be conley_to_shadow or shadow_to_conley");
  const Curve curve =
      curve_from_json(data, c.system.metric, c.params.h_max, continuity_budget(c));
  std::optional<Curve> loop;
  if (cv.contains("loop")) {
    const json ld = load_json_file(resolve(c, cv.at("loop").get<std::string>()).string());
    loop = curve_from_json(ld, c.system.metric, c.params.h_max, continuity_budget(c));
  }
  const ConleyChain chain =
      shadow_to_conley(curve, loop, c.system, c.params.eps_conley, c.params.t_min);
  write_text_file((out / "chain.json").string(), chain_to_json(chain));
  return 0;
}

ControlSignal parse_signal(const json& j) {
  expect_keys(j, {"kind", "value", "breakpoints", "values", "amplitude", "frequency",
                  "duration"},
              "signal");
  const std::string kind = j.at("kind").get<std::string>();
  const double duration = j.at("duration").get<double>();
  if (kind == "constant")
    return ControlSignal::constant(j.at("value").get<Point>(), duration);
  if (kind == "piecewise_constant") {
    std::vector<Point> values;
    for (const auto& v : j.at("values")) values.push_back(v.get<Point>());
    return ControlSignal::piecewise(j.at("breakpoints").get<std::vector<double>>(),
                                    std::move(values), duration);
  }
  if (kind == "sinusoidal")
    return ControlSignal::sinusoidal(j.at("amplitude").get<Point>(),
                                     j.at("frequency").get<double>(), duration);
  throw std::invalid_argument("signal.kind must be constant, piecewise_constant or sinusoidal");
}

int cmd_perturb(const Config& c, const fs::path& out) {
  if (!c.raw.contains("perturb"))
    throw std::invalid_argument("config: perturb section required");
  const json& pj = c.raw.at("perturb");
  expect_keys(pj, {"x0", "duration", "sample_step", "eps", "signal"}, "perturb");
  const Point x0 = pj.at("x0").get<Point>();
  const double T = pj.at("duration").get<double>();
  const double h = pj.contains("sample_step") ? pj.at("sample_step").get<double>() : 0.01;
  const double eps = pj.contains("eps") ? pj.at("eps").get<double>() : c.params.eps;
  const ControlSignal u = parse_signal(pj.at("signal"));

  const PerturbedOrbit orbit = perturbed_orbit(c.system, u, x0, T, h);
  write_text_file((out / "curve.json").string(), curve_to_json(orbit.curve));

  const double L = *c.system.lipschitz;
  const double budget = gronwall_budget(eps, L);
  std::string cert = "{\"budget\":" + fmt_double(budget);
  cert += ",\"worst_window_integral\":" + fmt_double(orbit.worst_window_integral);
  cert += ",\"budget_violated\":";
  cert += orbit.worst_window_integral >= budget ? "true" : "false";
  cert += ",\"bound_vs_measured\":[";
  // probe table: coarse subsample of (t, tau)
  const auto& times = orbit.curve.times();
  const size_t stride = std::max<size_t>(1, times.size() / 40);
  bool first = true;
  for (size_t i = 0; i < times.size(); i += stride) {
    for (double tau : {0.25, 0.5, 0.75, 1.0}) {
      const double t = times[i];
      if (t + tau > T + 1e-12) continue;
      const Point expected = orbit.curve.value_at(t + tau);
      const Point image = evaluate(c.system, tau, orbit.curve.points()[i]);
      const double measured = c.system.metric.distance(expected, image);
      const double bound = gronwall_deviation_bound(u, L, tau, t);
      if (!first) cert += ',';
      first = false;
      cert += '[' + fmt_double(t) + ',' + fmt_double(tau) + ',' + fmt_double(bound) +
              ',' + fmt_double(measured) + ']';
    }
  }
  cert += "]}";
  write_text_file((out / "certificate.json").string(), cert);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chain recurrence analysis for continuous-time systems"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;
  app.add_option("--config", config_path, "JSON config path")->required();
  app.add_option("--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "override config seed");
  app.add_option("--workers", workers, "worker threads (0 = library default)");

  auto* analyze = app.add_subcommand("analyze", "build one transition graph and its chain graph");
  auto* compare = app.add_subcommand("compare", "run both semantics and compare");
  auto* validate = app.add_subcommand("validate", "check a chain or curve file");
  auto* convert = app.add_subcommand("convert", "convert between chain kinds");
  auto* perturb = app.add_subcommand("perturb", "integrate a controlled orbit");

  CLI11_PARSE(app, argc, argv);
  seed_set = seed_opt->count() > 0;

#ifdef _OPENMP
  if (workers > 0) omp_set_num_threads(workers);
#endif

  try {
    Config c = load_config(config_path);
    if (seed_set) c.params.seed = seed;
    fs::path out(out_dir);
    fs::create_directories(out);
    if (analyze->parsed()) return cmd_analyze(c, out);
    if (compare->parsed()) return cmd_compare(c, out);
    if (validate->parsed()) return cmd_validate(c, out);
    if (convert->parsed()) return cmd_convert(c, out);
    if (perturb->parsed()) return cmd_perturb(c, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
